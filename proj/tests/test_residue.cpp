#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <tmf/residue.hpp>

#include <map>
#include <random>

using namespace tmf;

namespace {

// ---- Oracle 1: two-point residues for n = 1 over Q[u]/(u^2 = -T) ----------
//
// Elements a(T) + u b(T) with Laurent-polynomial coefficients; u = i sqrt(T).
struct QU {
    std::map<long, Rat> even, odd;  // T-power -> coefficient

    static QU one() {
        QU r;
        r.even[0] = Rat(1);
        return r;
    }
    void add(const QU& o, const Rat& scale) {
        for (const auto& [k, q] : o.even) {
            even[k] += q * scale;
            if (even[k] == 0) even.erase(k);
        }
        for (const auto& [k, q] : o.odd) {
            odd[k] += q * scale;
            if (odd[k] == 0) odd.erase(k);
        }
    }
    QU mul(const QU& o) const {
        QU r;
        auto acc = [&r](std::map<long, Rat>& dst, const std::map<long, Rat>& x,
                        const std::map<long, Rat>& y, const Rat& sign, long shift) {
            for (const auto& [ka, qa] : x)
                for (const auto& [kb, qb] : y) {
                    dst[ka + kb + shift] += sign * qa * qb;
                    if (dst[ka + kb + shift] == 0) dst.erase(ka + kb + shift);
                }
        };
        acc(r.even, even, o.even, Rat(1), 0);
        acc(r.even, odd, o.odd, Rat(-1), 1);  // u * u = -T
        acc(r.odd, even, o.odd, Rat(1), 0);
        acc(r.odd, odd, o.even, Rat(1), 0);
        return r;
    }
};

// u^k as a QU element (k may be negative: u^{-1} = -u/T).
QU u_pow(long k) {
    QU r = QU::one();
    long tpow = k >= 0 ? k / 2 : -((-k + 1) / 2);
    long rem = k - 2 * tpow;  // 0 or 1
    Rat sign = (tpow % 2 == 0) ? Rat(1) : Rat(-1);  // (-T)^tpow
    QU base;
    if (rem == 0)
        base.even[tpow] = sign;
    else
        base.odd[tpow] = sign;
    return base;
}

Rat falling(long a, long j) {
    Rat r(1);
    for (long i = 0; i < j; ++i) r *= Rat(a - i);
    return r;
}

// Residue of z^m / (z^2 + T)^l at the root sign_u * u, via the derivative
// formula for an order-l pole; exact in Q[u]/(u^2 = -T).
QU residue_at_root(long m, long l, int sign_u) {
    QU total;
    for (long j = 0; j <= l - 1; ++j) {
        // C(l-1, j) * (m)_j z^{m-j} * (-l)_(l-1-j) (z -+ (-u))^{-l-(l-1-j)}
        long k = l - 1 - j;
        Rat c = rat_binomial(l - 1, j) * falling(m, j) * falling(-l, k) / rat_factorial(l - 1);
        if (c == 0) continue;
        // at z = sign_u * u: z^{m-j} = sign_u^{m-j} u^{m-j};
        // (z + sign_u u)^{-l-k} = (2 sign_u u)^{-l-k}
        QU t = u_pow(m - j).mul(u_pow(-(l + k)));
        Rat two_pow(1);
        for (long i = 0; i < l + k; ++i) two_pow *= 2;
        Rat scale = c / two_pow;
        long sgn_exp = (m - j) + (l + k);
        if (sign_u < 0 && (sgn_exp % 2 != 0)) scale = -scale;
        total.add(t, scale);
    }
    return total;
}

// Sum over both critical points; the result must be u-free.
std::map<long, Rat> oracle_two_point(long m, long l) {
    QU total = residue_at_root(m, l, +1);
    total.add(residue_at_root(m, l, -1), Rat(1));
    REQUIRE(total.odd.empty());
    return total.even;
}

std::map<long, Rat> series_as_tmap(const NovikovSeries& s) {
    std::map<long, Rat> out;
    for (const auto& [k, q] : s.terms()) {
        REQUIRE(k.s_exp == 0);
        REQUIRE(k.t_num % s.denom() == 0);
        out[k.t_num / s.denom()] = q;
    }
    return out;
}

// ---- Oracle 2: dense multivariate expansion without binomial aggregation --
//
// Expands every one of the l_j geometric factors separately and collects the
// coefficient of 1/(z_1...z_n).
NovikovSeries oracle_res_zero(const ModelPtr& model, const std::vector<long>& m,
                              const std::vector<long>& l) {
    const int n = model->n;
    long sum_l = 0;
    for (long x : l) sum_l += x;
    // individual exponents a_{j,t} bounded by the target: each raises every
    // z-degree by at least 1
    long amax = 0;
    for (int j = 0; j < n; ++j) amax = std::max(amax, -1 - m[j]);
    if (amax < 0) amax = 0;
    std::vector<std::pair<std::vector<long>, long>> states;  // (z-exponents, sum a)
    states.push_back({std::vector<long>(m.begin(), m.end()), 0});
    for (int j = 0; j < n; ++j)
        for (long t = 0; t < l[j]; ++t) {
            std::vector<std::pair<std::vector<long>, long>> next;
            for (const auto& [z, tot] : states)
                for (long a = 0; a <= amax; ++a) {
                    auto z2 = z;
                    for (int k = 0; k < n; ++k) z2[k] += a;
                    z2[j] += a;
                    next.push_back({std::move(z2), tot + a});
                }
            states = std::move(next);
        }
    // coefficient of z^{-1}: (-1)^{sum_l} Tbar^{-sum_l - sum a}
    NovikovSeries out(model->denom, kNoCutoff);
    for (const auto& [z, tot] : states) {
        bool hit = true;
        for (int k = 0; k < n; ++k) hit = hit && z[k] == -1;
        if (!hit) continue;
        long tpow = -(sum_l + tot);
        Rat q((sum_l % 2 == 0) ? 1 : -1);
        if (model->tbar_sign < 0 && (tpow % 2 != 0)) q = -q;
        out.add_term({0, tpow * model->denom}, q);
    }
    return out;
}

NovikovSeries oracle_res_infinity(const ModelPtr& model, const std::vector<long>& m,
                                  const std::vector<long>& l) {
    const int n = model->n;
    long sum_l = 0;
    for (long x : l) sum_l += x;
    // after z -> 1/z: -prod z_j^{sum_l - 2 + l_j - m_j} prod geometric in
    // Tbar z_j prod z
    std::vector<long> base(n);
    long amax = 0;
    for (int j = 0; j < n; ++j) {
        base[j] = sum_l - 2 + l[j] - m[j];
        amax = std::max(amax, -1 - base[j]);
    }
    if (amax < 0) amax = 0;
    std::vector<std::pair<std::vector<long>, long>> states;
    states.push_back({base, 0});
    for (int j = 0; j < n; ++j)
        for (long t = 0; t < l[j]; ++t) {
            std::vector<std::pair<std::vector<long>, long>> next;
            for (const auto& [z, tot] : states)
                for (long a = 0; a <= amax; ++a) {
                    auto z2 = z;
                    for (int k = 0; k < n; ++k) z2[k] += a;
                    z2[j] += a;
                    next.push_back({std::move(z2), tot + a});
                }
            states = std::move(next);
        }
    NovikovSeries out(model->denom, kNoCutoff);
    for (const auto& [z, tot] : states) {
        bool hit = true;
        for (int k = 0; k < n; ++k) hit = hit && z[k] == -1;
        if (!hit) continue;
        Rat q(-1);
        if (model->tbar_sign < 0 && (tot % 2 != 0)) q = -q;
        out.add_term({0, tot * model->denom}, q);
    }
    return out;
}

ResidueIntegrand monomial_integrand(const ModelPtr& model, const std::vector<long>& p,
                                    std::vector<long> l) {
    ZExp z;
    for (int j = 0; j < model->n; ++j) z[j] = static_cast<int16_t>(p[j]);
    ResidueIntegrand g;
    g.numerator =
        LaurentElement::monomial(model, z, NovikovSeries::constant(Rat(1), model->denom));
    g.pole_orders = std::move(l);
    return g;
}

}  // namespace

TEST_CASE("res1: interior exponents vanish") {
    auto m1 = simplex_model(1);
    for (long l = 1; l <= 5; ++l)
        for (long mm = 0; mm < 2 * l - 1; ++mm) {
            // integrand z^mm / (z^2+T)^l corresponds to numerator z^{p} with
            // p = mm - (l + n + l - 2) ... use residue_sum on the cleared form
            // by direct res_* calls instead:
            CHECK(res_infinity(m1, {mm}, {l}).is_zero());
            CHECK(res_zero(m1, {mm}, {l}).is_zero());
        }
}

TEST_CASE("res2: the top exponent gives 1") {
    auto m1 = simplex_model(1);
    for (long l = 1; l <= 5; ++l) {
        auto ri = res_infinity(m1, {2 * l - 1}, {l});
        auto rz = res_zero(m1, {2 * l - 1}, {l});
        CHECK(rz.is_zero());
        // sum of residues = -Res_inf = 1
        CHECK((-ri) == NovikovSeries::constant(Rat(1), 2));
    }
}

TEST_CASE("res_infinity euler example: m = 2, l = 1") {
    auto m1 = simplex_model(1);
    CHECK(res_infinity(m1, {2}, {1}).is_zero());
}

TEST_CASE("res_zero closed forms") {
    auto m1 = simplex_model(1);
    // g = 1/(z(z^2+T)): Res_0 = -1/Tbar = 1/T for n = 1
    auto r = res_zero(m1, {-1}, {1});
    CHECK(r == NovikovSeries::monomial(Rat(1), 0, -2, 2));

    auto m3 = simplex_model(3);
    // n=3, m=(-1,-1,-1), l=(1,1,1): the expansion oracle fixes the sign to -1/T^3
    auto r3 = res_zero(m3, {-1, -1, -1}, {1, 1, 1});
    CHECK(r3 == NovikovSeries::monomial(Rat(-1), 0, -3 * 4, 4));
    CHECK(r3 == oracle_res_zero(m3, {-1, -1, -1}, {1, 1, 1}));
    // vanishes when some exponent is nonnegative
    CHECK(res_zero(m3, {0, -2, -2}, {1, 1, 1}).is_zero());
}

TEST_CASE("multivariate expansion oracle agrees with the closed forms") {
    std::mt19937_64 rng(4242);
    for (int n : {1, 3}) {
        auto model = simplex_model(n);
        std::uniform_int_distribution<long> md(-6, 6), ld(1, 3);
        for (int it = 0; it < 60; ++it) {
            std::vector<long> m(n), l(n);
            for (int j = 0; j < n; ++j) {
                m[j] = md(rng);
                l[j] = ld(rng);
            }
            CHECK(res_zero(model, m, l) == oracle_res_zero(model, m, l));
            CHECK(res_infinity(model, m, l) == oracle_res_infinity(model, m, l));
        }
    }
}

TEST_CASE("two-point residue oracle for n = 1") {
    auto model = simplex_model(1);
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<long> md(-10, 10), ld(1, 5);
    int checked = 0;
    for (int it = 0; it < 120; ++it) {
        long mm = md(rng), l = ld(rng);
        // residue_sum of z^p Omega / (dW)^l with p = mm - (n + 2l - 2) - ... :
        // use g_m directly: engine total = -res_inf - res_zero
        auto engine = -(res_infinity(model, {mm}, {l}) + res_zero(model, {mm}, {l}));
        auto oracle = oracle_two_point(mm, l);
        CHECK(series_as_tmap(engine) == oracle);
        ++checked;
    }
    CHECK(checked >= 100);
}

TEST_CASE("residue_sum over a cleared integrand") {
    auto model = simplex_model(1);
    // numerator z^{2l-1-(2l-1)} ... : check the l = 1 case str = z:
    // integrand z * Omega / dW = z^2/(z(z^2+T)) dz -> m = 1 + 1 + 1 + 1 - 2 = ...
    // Use the engine's own clearing: numerator z^p with p = 1, l = (1):
    // m = p + l_1 + (sum_l - 1) = 1 + 1 + 0 = 2 ... residue should be the same
    // as g_{2l-1}: for p such that p + l + sum_l - 1 = 2l-1 -> p = l - 1... take l = 1, p = 0:
    auto g = monomial_integrand(model, {0}, {1});
    auto total = residue_sum(g);
    CHECK(total == NovikovSeries::constant(Rat(1), 2));

    // Lemma weight bookkeeping: nonzero residues carry T-power sum(p)/(n+1)
    auto model3 = simplex_model(3);
    auto g3 = monomial_integrand(model3, {4, 4, 4}, {2, 2, 1});
    auto r3 = residue_sum(g3);
    if (!r3.is_zero()) {
        for (const auto& [k, q] : r3.terms()) CHECK(k.t_num == (4 + 4 + 4) / 4 * 4);
    }
}

TEST_CASE("non-simplex models are refused") {
    PolytopeSpec spec;
    spec.n = 2;
    spec.facets = {{{-1, 0}, Rat(0)}, {{1, 0}, Rat(1)}, {{0, -1}, Rat(0)}, {{0, 1}, Rat(1)}};
    auto model = model_from_polytope(validate_delzant(spec));
    CHECK_THROWS_AS(res_infinity(model, {0, 0}, {1, 1}), UnsupportedSuperpotential);
}
