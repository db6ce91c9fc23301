#pragma once

#include <tmf/laurent.hpp>

namespace tmf {

struct UnsupportedSuperpotential : std::runtime_error {
    UnsupportedSuperpotential()
        : std::runtime_error("residue engine supports the standard simplex superpotential only") {}
};

// Integrand  numerator * Omega / prod_j (d_j W)^{l_j}  in cleared form.
struct ResidueIntegrand {
    LaurentElement numerator;
    std::vector<long> pole_orders;
};

// Res_infinity of g_m = prod z_j^{m_j} / prod (z_j prod z_k - Tbar)^{l_j} dz.
NovikovSeries res_infinity(const ModelPtr& model, const std::vector<long>& m,
                           const std::vector<long>& l, int64_t cutoff_num = kNoCutoff);

// Res_0 of the same family; vanishes unless all m_j < 0.
NovikovSeries res_zero(const ModelPtr& model, const std::vector<long>& m,
                       const std::vector<long>& l, int64_t cutoff_num = kNoCutoff);

// Sum over the critical points of W: -Res_infinity - Res_0, extended linearly
// over the numerator monomials with their Novikov coefficients.
NovikovSeries residue_sum(const ResidueIntegrand& g, int64_t cutoff_num = kNoCutoff);

namespace detail {

// The closed form for a single monomial z^p with coefficient weight already
// handled by the caller: returns the residue sum of
// z^p * Omega / prod (d_j W)^{l_j} as (rational, T-power numerator), or
// nothing when it vanishes.
struct MonoResidue {
    Rat q;
    int64_t t_num;
};
std::optional<MonoResidue> residue_mono(const Model& model, const int16_t* p,
                                        const std::vector<long>& l, long sum_l);

}  // namespace detail

}  // namespace tmf
