#pragma once

#include <tmf/novikov.hpp>
#include <tmf/toric.hpp>

#include <array>
#include <memory>

namespace tmf {

inline constexpr int kMaxDense = 8;

// Exponent vector of a Laurent monomial in the dense coordinates z_1..z_n.
struct ZExp {
    std::array<int16_t, kMaxDense> e{};

    int16_t operator[](int i) const { return e[i]; }
    int16_t& operator[](int i) { return e[i]; }
    long total() const {
        long s = 0;
        for (int16_t x : e) s += x;
        return s;
    }
    bool is_zero() const {
        for (int16_t x : e)
            if (x) return false;
        return true;
    }
    friend ZExp operator+(ZExp a, const ZExp& b) {
        for (int i = 0; i < kMaxDense; ++i) a.e[i] = static_cast<int16_t>(a.e[i] + b.e[i]);
        return a;
    }
    friend ZExp operator-(ZExp a, const ZExp& b) {
        for (int i = 0; i < kMaxDense; ++i) a.e[i] = static_cast<int16_t>(a.e[i] - b.e[i]);
        return a;
    }
    friend auto operator<=>(const ZExp&, const ZExp&) = default;
};

struct Model;
using ModelPtr = std::shared_ptr<const Model>;

// The valued LG algebra data for a Delzant polytope in the dense coordinates
// of the first unimodular facet subset: every facet coordinate is a signed
// T-power times a Laurent monomial in z_1..z_n.
struct Model {
    int n = 0;
    int d = 0;
    int32_t denom = 1;     // value group (1/denom)Z
    long t_unit_deg = 2;   // degree of T^(1/denom); |s| = 1 - n
    bool simplex = false;  // the standard simplex model (residue support)
    int tbar_sign = 1;     // T-bar = tbar_sign * T, simplex only

    std::vector<int> dense;  // facet index of z_1..z_n

    struct FacetMono {
        int sign = 1;
        int64_t t_num = 0;  // T-power over denom
        ZExp z;
    };
    std::vector<FacetMono> facet_mono;             // z_i per facet i, reduced form
    std::vector<std::vector<Rat>> vertex_facet;    // [vertex][facet] value of nu_v(z_facet)
    std::vector<std::vector<int>> eps_cl;          // Clifford commutation exponents
    std::vector<std::vector<Rat>> vertices;        // moment-polytope vertices

    KernelLattice kl;
    SpinData spin;
    PolytopeSpec polytope;

    int num_vertices() const { return static_cast<int>(vertex_facet.size()); }
    // nu_v of a dense monomial: sum_j m_j * nu_v(z_dense_j), as numerator over denom.
    Rat vertex_val(int v, const ZExp& m) const {
        Rat acc(0);
        for (int j = 0; j < n; ++j)
            if (m[j]) acc += Rat(m[j]) * vertex_facet[v][dense[j]];
        return acc;
    }
};

// The paper's simplex model in the dense coordinates z_1..z_n with
// z_0 * z_1 ... z_n = T and e_0^2 = T-bar / (z_1...z_n).
ModelPtr simplex_model(int n);

// General Delzant model; does not require spin.
ModelPtr model_from_polytope(const ValidatedPolytope& vp);

class LaurentElement {
  public:
    LaurentElement() = default;
    explicit LaurentElement(ModelPtr m) : model_(std::move(m)) {}

    static LaurentElement zero(ModelPtr m) { return LaurentElement(std::move(m)); }
    static LaurentElement scalar(ModelPtr m, NovikovSeries c);
    static LaurentElement monomial(ModelPtr m, const ZExp& z, NovikovSeries c);
    // z_i for a facet index i (reduced through the relations).
    static LaurentElement coordinate(ModelPtr m, int facet);

    const ModelPtr& model() const { return model_; }
    const std::vector<std::pair<ZExp, NovikovSeries>>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const ZExp& z, const NovikovSeries& c);
    LaurentElement& operator+=(const LaurentElement& o);
    LaurentElement& operator-=(const LaurentElement& o);
    friend LaurentElement operator+(LaurentElement a, const LaurentElement& b) { return a += b; }
    friend LaurentElement operator-(LaurentElement a, const LaurentElement& b) { return a -= b; }
    friend LaurentElement operator*(const LaurentElement& a, const LaurentElement& b);
    LaurentElement operator-() const;
    LaurentElement scaled(const Rat& q) const;
    LaurentElement scaled(const NovikovSeries& c) const;
    friend bool operator==(const LaurentElement& a, const LaurentElement& b);

    // Formal d/dz_j on the dense coordinate j (1-based position, 0..n-1 here).
    LaurentElement diff(int j) const;

    // Valuation at an interior point; accepts n moment coordinates, or n+1
    // tilde coordinates for the simplex model.
    ValOrInf valuation_at(const std::vector<Rat>& zeta) const;
    // min over polytope vertices of the affine valuation.
    ValOrInf norm() const;

    // Drops (monomial, coefficient-term) pairs whose min-vertex valuation
    // exceeds bound (optionally shifted per the caller's basis bookkeeping).
    LaurentElement truncate_norm(const Rat& bound, const std::vector<Rat>& vertex_shift) const;

    // Keeps the terms' s-degree 0 part etc. are not needed; scalar extraction:
    const NovikovSeries* scalar_part() const;  // coefficient at z-exponent 0, null if absent

    std::optional<long> degree() const;  // homogeneous total degree, nullopt otherwise
    std::string str() const;
    size_t hash() const;

  private:
    ModelPtr model_;
    std::vector<std::pair<ZExp, NovikovSeries>> terms_;  // sorted by ZExp, coeffs nonzero
};

LaurentElement superpotential(const ModelPtr& m);
std::vector<LaurentElement> superpotential_partials(const ModelPtr& m);

}  // namespace tmf
