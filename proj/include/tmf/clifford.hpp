#pragma once

#include <tmf/laurent.hpp>

#include <unordered_map>

namespace tmf {

// S-linear combination of normally ordered Clifford words e_{i_1}...e_{i_k},
// i_1 < ... < i_k, encoded as facet-index bitmasks.
class CliffordElement {
  public:
    CliffordElement() = default;
    explicit CliffordElement(ModelPtr m) : model_(std::move(m)) {}

    static CliffordElement word(ModelPtr m, uint32_t mask, LaurentElement coeff);
    static CliffordElement generator(ModelPtr m, int i);

    const ModelPtr& model() const { return model_; }
    const std::vector<std::pair<uint32_t, LaurentElement>>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(uint32_t mask, const LaurentElement& coeff);
    CliffordElement& operator+=(const CliffordElement& o);
    friend CliffordElement operator+(CliffordElement a, const CliffordElement& b) {
        return a += b;
    }
    CliffordElement operator-() const;
    CliffordElement scaled(const Rat& q) const;

    std::string str() const;

  private:
    ModelPtr model_;
    std::vector<std::pair<uint32_t, LaurentElement>> terms_;  // sorted by mask
};

// Normally ordered product with the commutation signs of the model and the
// square rewriting e_i^2 = z_i; no module reduction.
CliffordElement cl_mul(const CliffordElement& a, const CliffordElement& b);

struct DiracModule;
using DiracPtr = std::shared_ptr<const DiracModule>;

// Z^{2^n x 2^n} matrix over the LG algebra in the module basis {e_I}, rows
// indexed by targets. Column c holds the image of basis element c.
class EndMorphism {
  public:
    EndMorphism() = default;
    EndMorphism(DiracPtr mod, int rank);

    static EndMorphism identity(const DiracPtr& mod);
    static EndMorphism zero(const DiracPtr& mod);

    const DiracPtr& module() const { return mod_; }
    int rank() const { return rank_; }
    LaurentElement& at(int row, int col) { return m_[static_cast<size_t>(row) * rank_ + col]; }
    const LaurentElement& at(int row, int col) const {
        return m_[static_cast<size_t>(row) * rank_ + col];
    }
    bool is_zero() const;

    EndMorphism& operator+=(const EndMorphism& o);
    EndMorphism& operator-=(const EndMorphism& o);
    friend EndMorphism operator+(EndMorphism a, const EndMorphism& b) { return a += b; }
    friend EndMorphism operator-(EndMorphism a, const EndMorphism& b) { return a -= b; }
    friend EndMorphism operator*(const EndMorphism& a, const EndMorphism& b);  // composition
    EndMorphism operator-() const;
    EndMorphism scaled(const Rat& q) const;
    EndMorphism scaled(const NovikovSeries& c) const;
    friend bool operator==(const EndMorphism& a, const EndMorphism& b);

    // Homogeneous Z-degree per the entry + basis bookkeeping; nullopt if mixed.
    std::optional<long> degree() const;
    // True for elements of R^s id (equal scalar diagonal, zero off-diagonal).
    bool is_scalar() const;
    EndMorphism diff(int j) const;  // entrywise d/dz_j
    LaurentElement supertrace() const;
    ValOrInf end_norm() const;
    EndMorphism truncate_norm(const Rat& bound) const;
    // Keeps entry terms whose end-valuation lies in (lo, hi].
    EndMorphism slice_norm(const Rat& lo, const Rat& hi) const;

    std::string str() const;
    size_t hash() const;

  private:
    DiracPtr mod_;
    int rank_ = 0;
    std::vector<LaurentElement> m_;
};

// The Dirac factorization: module basis (an F_2 coset transversal of the
// kernel lattice), reduction rules, D, and the obstruction scalar w.
struct DiracModule {
    ModelPtr model;
    std::vector<uint32_t> basis;                 // transversal masks, canonical order
    std::unordered_map<uint32_t, int> index;     // mask -> basis position
    struct Reduction {
        uint32_t target = 0;                     // transversal mask
        LaurentElement factor;                   // e_mask = factor * e_target in M
    };
    std::vector<Reduction> reduce;               // indexed by mask over all 2^d subsets
    std::vector<std::vector<Rat>> basis_vertex_val;  // [basis][vertex] of nu_v(e_I)

    EndMorphism d_op;      // left multiplication by e_0 + ... + e_{d-1}
    NovikovSeries w;       // the Maslov-2 obstruction scalar

    int rank() const { return static_cast<int>(basis.size()); }
    int parity(int i) const { return __builtin_popcount(basis[static_cast<size_t>(i)]) & 1; }
};

struct ConsistencyFailure : std::logic_error {
    explicit ConsistencyFailure(const std::string& what) : std::logic_error(what) {}
};

// Builds M, D and w; requires a combinatorially relatively spin model with a
// free sigma'. Verifies D^2 = (W - w) id exactly.
DiracPtr dirac_build(const ModelPtr& model);

// Reduces a Clifford element into the module basis: image under Cl -> M.
std::vector<std::pair<int, LaurentElement>> module_reduce(const DiracPtr& mod,
                                                          const CliffordElement& x);

// Matrix of left multiplication by x on the module basis.
EndMorphism left_mult(const DiracPtr& mod, const CliffordElement& x);

// delta(phi) = D phi - (-1)^{|phi|} phi D; requires phi homogeneous.
EndMorphism delta(const EndMorphism& phi);

// Left multiplication by -(z_1...z_n) T^{-1/2} e_0 (the simplex h_0).
EndMorphism h0_morphism(const DiracPtr& mod);

}  // namespace tmf
