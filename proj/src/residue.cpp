#include <tmf/residue.hpp>

#include <numeric>

namespace tmf {

namespace {

void check_simplex(const Model& m) {
    if (!m.simplex) throw UnsupportedSuperpotential();
}

// Tbar^k as a sign and a T-power.
int tbar_pow_sign(const Model& m, long k) {
    if (m.tbar_sign == 1) return 1;
    return (k % 2 == 0) ? 1 : -1;
}

}  // namespace

NovikovSeries res_infinity(const ModelPtr& model, const std::vector<long>& m,
                           const std::vector<long>& l, int64_t cutoff_num) {
    check_simplex(*model);
    const int n = model->n;
    NovikovSeries r(model->denom, cutoff_num);
    long sum_l = std::accumulate(l.begin(), l.end(), 0L);
    long sum_m = std::accumulate(m.begin(), m.end(), 0L);
    long num = n + sum_m - (n + 1) * sum_l;  // (n+1) * S
    if (num % (n + 1) != 0) return r;
    long s = num / (n + 1);
    if (s < 0) return r;
    Rat coeff(-1);
    for (int j = 0; j < n; ++j) {
        long a = m[j] - l[j] - (sum_l - 1) - s;
        if (a < 0) return r;
        coeff *= rat_binomial(a + l[j] - 1, l[j] - 1);
    }
    coeff *= tbar_pow_sign(*model, s);
    r.add_term({0, s * model->denom}, coeff);
    return r;
}

NovikovSeries res_zero(const ModelPtr& model, const std::vector<long>& m,
                       const std::vector<long>& l, int64_t cutoff_num) {
    check_simplex(*model);
    const int n = model->n;
    NovikovSeries r(model->denom, cutoff_num);
    long sum_l = std::accumulate(l.begin(), l.end(), 0L);
    long sum_m = std::accumulate(m.begin(), m.end(), 0L);
    long num = -n - sum_m;  // (n+1) * S0
    if (num % (n + 1) != 0) return r;
    long s0 = num / (n + 1);
    if (s0 < 0) return r;
    Rat coeff((sum_l % 2 == 0) ? 1 : -1);
    for (int j = 0; j < n; ++j) {
        long a = -1 - m[j] - s0;
        if (a < 0) return r;
        coeff *= rat_binomial(a + l[j] - 1, l[j] - 1);
    }
    long tpow = -(sum_l + s0);
    coeff *= tbar_pow_sign(*model, tpow);
    r.add_term({0, tpow * model->denom}, coeff);
    return r;
}

std::optional<detail::MonoResidue> detail::residue_mono(const Model& model, const int16_t* p,
                                                        const std::vector<long>& l, long sum_l) {
    const int n = model.n;
    long sum_p = 0;
    for (int j = 0; j < n; ++j) sum_p += p[j];
    if (sum_p % (n + 1) != 0) return std::nullopt;
    long s = sum_p / (n + 1);
    if (s >= 0) {
        // -Res_infinity route: A_j = p_j - S >= 0.
        Rat q(1);
        for (int j = 0; j < n; ++j) {
            long a = p[j] - s;
            if (a < 0) return std::nullopt;
            q *= rat_binomial(a + l[j] - 1, l[j] - 1);
        }
        q *= tbar_pow_sign(model, s);
        return MonoResidue{std::move(q), s * model.denom};
    }
    if (s <= -sum_l) {
        // -Res_0 route: A_j = S - p_j - l_j >= 0.
        Rat q((sum_l % 2 == 0) ? -1 : 1);
        for (int j = 0; j < n; ++j) {
            long a = s - p[j] - l[j];
            if (a < 0) return std::nullopt;
            q *= rat_binomial(a + l[j] - 1, l[j] - 1);
        }
        q *= tbar_pow_sign(model, s);
        return MonoResidue{std::move(q), s * model.denom};
    }
    return std::nullopt;
}

NovikovSeries residue_sum(const ResidueIntegrand& g, int64_t cutoff_num) {
    const ModelPtr& model = g.numerator.model();
    check_simplex(*model);
    const int n = model->n;
    if (static_cast<int>(g.pole_orders.size()) != n)
        throw std::invalid_argument("pole order vector has wrong length");
    long sum_l = std::accumulate(g.pole_orders.begin(), g.pole_orders.end(), 0L);
    NovikovSeries out(model->denom, cutoff_num);
    for (const auto& [z, c] : g.numerator.terms()) {
        auto mr = detail::residue_mono(*model, z.e.data(), g.pole_orders, sum_l);
        if (!mr) continue;
        for (const auto& [k, q] : c.terms())
            out.add_term({k.s_exp, k.t_num + mr->t_num}, q * mr->q);
    }
    return out;
}

}  // namespace tmf
