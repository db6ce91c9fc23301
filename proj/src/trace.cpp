#include <tmf/trace.hpp>

#include <algorithm>
#include <functional>
#include <thread>

namespace tmf {

namespace {

// Flat monomial records for the numerator pipeline: coefficient, s/T exponents
// and the z-exponent vector in one struct.
struct TTerm {
    ZExp z;
    int32_t s = 0;
    int64_t t = 0;
    Rat q;
};
using TPoly = std::vector<TTerm>;

struct TMat {
    int rank = 0;
    std::vector<TPoly> e;

    TPoly& at(int r, int c) { return e[static_cast<size_t>(r) * rank + c]; }
    const TPoly& at(int r, int c) const { return e[static_cast<size_t>(r) * rank + c]; }
};

struct Ctx {
    const Model* model = nullptr;
    const DiracModule* mod = nullptr;
    int n = 0;
    int L = 0;
    int32_t denom = 0;
    int64_t zunit = 0;       // denom / (n+1)
    int64_t cutoff_num = 0;  // exclusive bound on result weight numerators

    std::vector<TMat> blocks;      // [idx * n + (a-1)] = f_idx * dD_a
    std::vector<int64_t> blk_min;  // per idx: min over a of the block's min bary
    std::vector<TMat> dd;          // dD_j, j = 1..n
    int64_t dd_min = 0;
    std::vector<long> eps;         // eps[m-1], paper index m = 1..L
    std::vector<int64_t> suffix;   // suffix[idx] = sum of blk_min[idx..L-1]

    // A numerator monomial's residue, when nonzero, has exactly this weight.
    int64_t bary(const TTerm& t) const {
        return static_cast<int64_t>(t.s) * denom + t.t + t.z.total() * zunit;
    }
};

bool term_key_less(const TTerm& a, const TTerm& b) {
    if (a.z != b.z) return a.z < b.z;
    if (a.s != b.s) return a.s < b.s;
    return a.t < b.t;
}

void normalize(TPoly& p) {
    std::sort(p.begin(), p.end(), term_key_less);
    size_t w = 0;
    for (size_t i = 0; i < p.size();) {
        size_t j = i + 1;
        Rat q = p[i].q;
        while (j < p.size() && p[j].z == p[i].z && p[j].s == p[i].s && p[j].t == p[i].t)
            q += p[j++].q;
        if (q != 0) {
            p[w] = p[i];
            p[w].q = std::move(q);
            ++w;
        }
        i = j;
    }
    p.resize(w);
}

TMat to_tmat(const EndMorphism& phi) {
    TMat t;
    t.rank = phi.rank();
    t.e.resize(static_cast<size_t>(t.rank) * t.rank);
    for (int r = 0; r < t.rank; ++r)
        for (int c = 0; c < t.rank; ++c) {
            TPoly& p = t.at(r, c);
            for (const auto& [z, series] : phi.at(r, c).terms())
                for (const auto& [k, q] : series.terms())
                    p.push_back(TTerm{z, k.s_exp, k.t_num, q});
            normalize(p);
        }
    return t;
}

int64_t min_bary(const Ctx& ctx, const TMat& m) {
    int64_t best = std::numeric_limits<int64_t>::max();
    for (const auto& p : m.e)
        for (const auto& t : p) best = std::min(best, ctx.bary(t));
    return best == std::numeric_limits<int64_t>::max() ? 0 : best;
}

// a * b, dropping product terms whose bary weight cannot come back under the
// cutoff given the minimal weight of every factor still to be multiplied in.
TMat mul_pruned(const Ctx& ctx, const TMat& a, const TMat& b, int64_t future_min) {
    TMat r;
    r.rank = a.rank;
    r.e.resize(a.e.size());
    const int64_t bound = ctx.cutoff_num - future_min;
    for (int i = 0; i < a.rank; ++i)
        for (int k = 0; k < a.rank; ++k) {
            const TPoly& x = a.at(i, k);
            if (x.empty()) continue;
            for (int j = 0; j < a.rank; ++j) {
                const TPoly& y = b.at(k, j);
                if (y.empty()) continue;
                TPoly& out = r.at(i, j);
                for (const auto& tx : x)
                    for (const auto& ty : y) {
                        TTerm t;
                        t.z = tx.z + ty.z;
                        t.s = tx.s + ty.s;
                        t.t = tx.t + ty.t;
                        if (ctx.bary(t) >= bound) continue;
                        t.q = tx.q * ty.q;
                        out.push_back(std::move(t));
                    }
            }
        }
    for (auto& p : r.e) normalize(p);
    return r;
}

struct DfsState {
    std::vector<int> i_choice;  // per array position
    std::vector<int> k_count;   // js placed per array position
    std::vector<int> j_seq;
    uint32_t j_used = 0;
    int inv_parity = 0;
};

struct Accum {
    NovikovSeries sum;
    TraceStats stats;
};

void leaf(const Ctx& ctx, const TMat& numerator, const DfsState& st, Accum& acc) {
    const int n = ctx.n;
    if (static_cast<int>(st.j_seq.size()) != n - 1) return;  // all dD_j slots filled
    std::vector<long> r(n + 1, 0);
    for (int a : st.i_choice) ++r[a];
    int i_special = 0;
    for (int a = 1; a <= n; ++a)
        if (!(st.j_used & (1u << a))) {
            i_special = a;
            break;
        }
    if (r[i_special] == 0) return;
    acc.stats.residues_evaluated += 1;

    std::vector<long> pole(n);
    long sum_l = 0;
    for (int j = 1; j <= n; ++j) {
        pole[j - 1] = r[j] + 1 - (j == i_special ? 1 : 0);
        sum_l += pole[j - 1];
    }

    // The composition entry of a block pairs with the suspended degree of the
    // same block; this resolves the transcription ambiguity in the published
    // formula and is pinned by the regression suite.
    long ksign = 0;
    for (int idx = 0; idx < ctx.L; ++idx) {
        int m = ctx.L - idx;  // paper block index of array position idx
        ksign += static_cast<long>(st.k_count[idx]) * ctx.eps[m - 1];
    }
    long sign_exp = i_special + ksign + st.inv_parity;
    Rat coeff((sign_exp % 2 == 0) ? 1 : -1);
    for (int j = 1; j <= n; ++j) coeff *= rat_factorial(r[j]);
    coeff /= rat_factorial(n + ctx.L - 1);

    for (int d = 0; d < numerator.rank; ++d) {
        const TPoly& p = numerator.at(d, d);
        if (p.empty()) continue;
        Rat psign(ctx.mod->parity(d) ? -1 : 1);
        for (const auto& term : p) {
            auto mr = detail::residue_mono(*ctx.model, term.z.e.data(), pole, sum_l);
            if (!mr) continue;
            acc.sum.add_term({term.s, term.t + mr->t_num}, term.q * mr->q * psign * coeff);
        }
    }
}

// Enumerates blocks idx..L-1 given the product of the earlier blocks.
void dfs(const Ctx& ctx, int idx, const TMat& prefix, DfsState& st, Accum& acc) {
    if (idx == ctx.L) {
        leaf(ctx, prefix, st, acc);
        return;
    }
    const int n = ctx.n;
    int placed = 0;
    for (int i = 0; i < idx; ++i) placed += st.k_count[i];
    for (int a = 1; a <= n; ++a) {
        st.i_choice[idx] = a;
        const TMat& base = ctx.blocks[static_cast<size_t>(idx) * n + (a - 1)];
        const int rem0 = n - 1 - placed;
        int64_t future = ctx.suffix[idx + 1] + static_cast<int64_t>(rem0) * ctx.dd_min;
        TMat cur = (idx == 0) ? base : mul_pruned(ctx, prefix, base, future);
        std::function<void(int, const TMat&)> place = [&](int g, const TMat& m) {
            st.k_count[idx] = g;
            dfs(ctx, idx + 1, m, st, acc);
            if (placed + g >= n - 1) return;
            for (int j = 1; j <= n; ++j) {
                if (st.j_used & (1u << j)) continue;
                int inv = 0;
                for (int prev : st.j_seq)
                    if (prev > j) ++inv;
                st.j_used |= 1u << j;
                st.j_seq.push_back(j);
                st.inv_parity ^= (inv & 1);
                int64_t fut = ctx.suffix[idx + 1] +
                              static_cast<int64_t>(n - 1 - placed - g - 1) * ctx.dd_min;
                TMat next = mul_pruned(ctx, m, ctx.dd[j - 1], fut);
                place(g + 1, next);
                st.inv_parity ^= (inv & 1);
                st.j_seq.pop_back();
                st.j_used &= ~(1u << j);
            }
        };
        place(0, cur);
        st.k_count[idx] = 0;
    }
}

// Subtrees rooted at complete block-0 assignments, for the worker pool.
struct Task {
    DfsState st;
    TMat mat;
};

std::vector<Task> block0_tasks(const Ctx& ctx) {
    std::vector<Task> tasks;
    const int n = ctx.n;
    DfsState st;
    st.i_choice.assign(ctx.L, 0);
    st.k_count.assign(ctx.L, 0);
    for (int a = 1; a <= n; ++a) {
        st.i_choice[0] = a;
        const TMat& base = ctx.blocks[static_cast<size_t>(0) * n + (a - 1)];
        std::function<void(int, const TMat&)> place = [&](int g, const TMat& m) {
            st.k_count[0] = g;
            tasks.push_back({st, m});
            if (g >= n - 1) return;
            for (int j = 1; j <= n; ++j) {
                if (st.j_used & (1u << j)) continue;
                int inv = 0;
                for (int prev : st.j_seq)
                    if (prev > j) ++inv;
                st.j_used |= 1u << j;
                st.j_seq.push_back(j);
                st.inv_parity ^= (inv & 1);
                int64_t fut = ctx.suffix[1] +
                              static_cast<int64_t>(n - 1 - g - 1) * ctx.dd_min;
                TMat next = mul_pruned(ctx, m, ctx.dd[j - 1], fut);
                place(g + 1, next);
                st.inv_parity ^= (inv & 1);
                st.j_seq.pop_back();
                st.j_used &= ~(1u << j);
            }
        };
        place(0, base);
        st.k_count[0] = 0;
    }
    return tasks;
}

}  // namespace

NovikovSeries theta_l(const std::vector<EndMorphism>& factors, int64_t cutoff_num,
                      TraceStats* stats, const TraceOptions& opts) {
    if (factors.empty()) throw std::invalid_argument("empty tensor word");
    const DiracPtr& mod = factors.front().module();
    const ModelPtr& model = mod->model;
    if (!model->simplex) throw UnsupportedSuperpotential();
    const int n = model->n;
    const int L = static_cast<int>(factors.size());

    NovikovSeries out(model->denom, cutoff_num);
    std::vector<long> deg(L);
    long deg_sum = 0;
    for (int i = 0; i < L; ++i) {
        if (factors[i].is_zero()) return out;
        auto d = factors[i].degree();
        if (!d) throw std::invalid_argument("non-homogeneous tensor factor");
        deg[i] = *d;
        deg_sum += *d;
    }
    if (stats) stats->words_evaluated += 1;
    // str of an odd operator vanishes: the numerator has matrix parity
    // sum |Phi| + (n + l - 1).
    if (opts.parity_prune && ((deg_sum + n + L - 1) % 2 != 0)) {
        if (stats) stats->words_pruned += 1;
        return out;
    }

    Ctx ctx;
    ctx.model = model.get();
    ctx.mod = mod.get();
    ctx.n = n;
    ctx.L = L;
    ctx.denom = model->denom;
    ctx.zunit = model->denom / (n + 1);
    ctx.cutoff_num = cutoff_num == kNoCutoff ? std::numeric_limits<int64_t>::max() / 4
                                             : cutoff_num;

    ctx.dd.reserve(n);
    for (int j = 0; j < n; ++j) ctx.dd.push_back(to_tmat(mod->d_op.diff(j)));
    ctx.dd_min = std::numeric_limits<int64_t>::max();
    for (const auto& m : ctx.dd) ctx.dd_min = std::min(ctx.dd_min, min_bary(ctx, m));

    ctx.blocks.resize(static_cast<size_t>(L) * n);
    ctx.blk_min.assign(L, std::numeric_limits<int64_t>::max());
    for (int idx = 0; idx < L; ++idx) {
        TMat f = to_tmat(factors[idx]);
        for (int a = 1; a <= n; ++a) {
            TMat blk = mul_pruned(ctx, f, ctx.dd[a - 1],
                                  std::numeric_limits<int64_t>::min() / 4);
            ctx.blk_min[idx] = std::min(ctx.blk_min[idx], min_bary(ctx, blk));
            ctx.blocks[static_cast<size_t>(idx) * n + (a - 1)] = std::move(blk);
        }
    }
    ctx.suffix.assign(L + 1, 0);
    for (int idx = L - 1; idx >= 0; --idx) ctx.suffix[idx] = ctx.suffix[idx + 1] + ctx.blk_min[idx];

    ctx.eps.assign(L, 0);
    for (int m = 1; m <= L; ++m) {
        long e = 0;
        for (int j = m; j <= L; ++j) e += deg[L - j] - 1;
        ctx.eps[m - 1] = e;
    }

    Accum total;
    total.sum = NovikovSeries(model->denom, ctx.cutoff_num);
    const bool parallel = opts.workers > 1 && L >= 3;
    if (!parallel) {
        DfsState st;
        st.i_choice.assign(L, 0);
        st.k_count.assign(L, 0);
        TMat dummy;
        dfs(ctx, 0, dummy, st, total);
    } else {
        std::vector<Task> tasks = block0_tasks(ctx);
        std::vector<Accum> results(tasks.size());
        for (auto& r : results) r.sum = NovikovSeries(model->denom, ctx.cutoff_num);
        std::atomic<size_t> cursor{0};
        auto work = [&]() {
            while (true) {
                size_t t = cursor.fetch_add(1);
                if (t >= tasks.size()) break;
                DfsState st = tasks[t].st;
                dfs(ctx, 1, tasks[t].mat, st, results[t]);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < opts.workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
        for (auto& r : results) {
            total.sum += r.sum;
            total.stats += r.stats;
        }
    }
    if (stats) *stats += total.stats;

    // Dimension and normedness guards on every nonzero evaluation.
    NovikovSeries result = total.sum.truncate(cutoff_num);
    if (!result.is_zero()) {
        long word_deg = deg[0];
        for (int i = 1; i < L; ++i) word_deg += deg[i] - 1;
        auto rd = result.degree(n);
        if (rd != std::optional<long>(word_deg - n))
            throw ConsistencyFailure("trace output violates the dimension property");
        ValOrInf wv = ValOrInf::of(Rat(0));
        for (const auto& f : factors) wv = val_add(wv, f.end_norm());
        if (result.valuation() < wv)
            throw ConsistencyFailure("trace output violates normedness");
    }
    return result;
}

NovikovSeries theta(const Chain& chain, int64_t cutoff_num, TraceStats* stats,
                    const TraceOptions& opts) {
    NovikovSeries out(1, cutoff_num);
    bool init = false;
    for (const auto& w : chain.words) {
        if (w.factors.empty()) continue;
        const auto& model = w.factors.front().module()->model;
        if (!init) {
            out = NovikovSeries(model->denom, cutoff_num);
            init = true;
        }
        bool all_scalar = true;
        for (const auto& f : w.factors) all_scalar = all_scalar && f.is_scalar();
        if (all_scalar) continue;  // cohomological unitality
        if (w.scalar.is_zero()) continue;
        auto v = word_valuation(w);
        if (v.is_inf()) continue;
        if (cutoff_num != kNoCutoff && v.value() * model->denom >= cutoff_num) continue;
        NovikovSeries val = theta_l(w.factors, cutoff_num, stats, opts);
        if (val.is_zero()) continue;
        out += val * w.scalar.truncate(cutoff_num);
    }
    return out;
}

uint64_t theta_word_count(int n, int l) {
    mpz_class count;
    mpz_bin_uiui(count.get_mpz_t(), static_cast<unsigned long>(n + l - 2),
                 static_cast<unsigned long>(l - 1));
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(n - 1));
    mpz_class pw_n, pw_n1;
    mpz_ui_pow_ui(pw_n.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(l));
    mpz_ui_pow_ui(pw_n1.get_mpz_t(), static_cast<unsigned long>(n - 1),
                  static_cast<unsigned long>(l));
    mpz_class total = count * fact * n * (pw_n - pw_n1);
    return total.get_ui();
}

bool theta_weight_admissible(const Model& model, const Rat& e) {
    // k in Z_{>=0} and d in (1/denom)Z with k(1-n) + (t_unit*denom)*d = 1-n
    // and k + d = e.
    const long n = model.n;
    Rat td = Rat(model.t_unit_deg) * model.denom;
    Rat lhs_coeff = Rat(1 - n) - td;
    Rat rhs = Rat(1 - n) - td * e;
    if (lhs_coeff == 0) return rhs == 0;
    Rat k = rhs / lhs_coeff;
    if (!rat_is_int(k) || k < 0) return false;
    Rat d = e - k;
    return rat_is_int(d * model.denom);
}

}  // namespace tmf
