#pragma once

#include <tmf/clifford.hpp>

#include <map>

namespace tmf {

// a_l (x) ... (x) a_1 with a rational-Novikov scalar; factors[0] is a_l.
struct TensorWord {
    std::vector<EndMorphism> factors;
    NovikovSeries scalar;

    int length() const { return static_cast<int>(factors.size()); }
};

struct Chain {
    std::vector<TensorWord> words;
};

// |a_l| + sum_{i<l} (|a_i| - 1); nullopt when some factor is non-homogeneous.
std::optional<long> word_degree(const TensorWord& w);
// sum of factor norms plus the scalar valuation.
ValOrInf word_valuation(const TensorWord& w);

// Hochschild differential b(mu_1) + b(mu_2) with the cyclic sign conventions.
Chain d_cc(const TensorWord& w);
Chain d_cc(const Chain& c);

// Cyclic rotation t with the sign (-1)^{|sa_l| (eps_1 - |sa_l|)}.
TensorWord cyclic_t(const TensorWord& w);

// exp(b) = 1_A + sum b^{(x)l} / l, truncated by word valuation <= cutoff.
Chain exp_chain(const EndMorphism& b, const Rat& cutoff);

// Constants of the canonical y_b, keyed by the lexicographically minimal
// rotation of (j_0,...,j_m). Level of a class is |J|.
using CJKey = std::vector<long>;
using CJTable = std::map<CJKey, Rat>;
CJTable cj_constants(int level_max);
CJKey cj_canonical(CJKey j);

// The canonical y_b: -sum C_J (c 1 (x) 1)^{(x)j_0} (x) b^{(x)i_0} (x) ...,
// truncated by word valuation <= cutoff.
Chain y_b_chain(const EndMorphism& b, const NovikovSeries& c, const Rat& cutoff);

// The projection pi: End(M)^s -> R^s used by the homotopy bookkeeping:
// the z-degree-zero coefficient of the first diagonal entry.
NovikovSeries pi_projection(const EndMorphism& phi);

}  // namespace tmf
