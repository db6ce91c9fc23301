#include <tmf/solver.hpp>

#include <algorithm>
#include <chrono>
#include <set>

namespace tmf {

FiltrationLadder filtration_ladder(const Model& model, const Rat& start, const Rat& cutoff) {
    FiltrationLadder fl;
    fl.denom = model.denom;
    Rat step(1, model.denom);
    for (Rat e = start; e <= cutoff; e += step) fl.levels.push_back(e);
    return fl;
}

EndMorphism mc(const EndMorphism& b) { return delta(b) - b * b; }

ObstructionSlice obstruction_slice(const BoundingCochainState& st, const Rat& lo,
                                   const Rat& hi) {
    EndMorphism resid = mc(st.b);
    EndMorphism cid = EndMorphism::identity(st.b.module()).scaled(st.c.truncate(kNoCutoff));
    resid -= cid;
    if (!resid.truncate_norm(lo).is_zero())
        throw ClosednessFailure("Maurer-Cartan residue below the current level");
    ObstructionSlice s;
    s.o = resid.slice_norm(lo, hi);
    s.level_lo = lo;
    s.level_hi = hi;
    if (!s.o.is_zero()) {
        EndMorphism d_o = delta(s.o).truncate_norm(hi);
        if (!d_o.is_zero()) throw ClosednessFailure("obstruction slice is not closed");
    }
    return s;
}

namespace {

struct SliceKey {
    int row = 0, col = 0;
    ZExp z;
    int32_t s = 0;
    int64_t t = 0;

    friend auto operator<=>(const SliceKey&, const SliceKey&) = default;
};
using SliceVec = std::map<SliceKey, Rat>;

SliceVec to_slice(const EndMorphism& m) {
    SliceVec out;
    for (int r = 0; r < m.rank(); ++r)
        for (int c = 0; c < m.rank(); ++c)
            for (const auto& [z, series] : m.at(r, c).terms())
                for (const auto& [k, q] : series.terms())
                    out[{r, c, z, k.s_exp, k.t_num}] += q;
    for (auto it = out.begin(); it != out.end();)
        it = (it->second == 0) ? out.erase(it) : std::next(it);
    return out;
}

// Candidate correction: left multiplication by q s^k T^t z^m e_B.
struct Candidate {
    uint32_t mask = 0;
    ZExp z;
    int32_t s = 0;
    int64_t t = 0;

    friend auto operator<=>(const Candidate&, const Candidate&) = default;
};

EndMorphism candidate_matrix(const DiracPtr& mod, const Candidate& c) {
    const ModelPtr& model = mod->model;
    auto coeff = LaurentElement::monomial(
        model, c.z, NovikovSeries::monomial(Rat(1), c.s, c.t, model->denom));
    return left_mult(mod, CliffordElement::word(model, c.mask, std::move(coeff)));
}

long candidate_degree(const Model& model, const Candidate& c) {
    return static_cast<long>(c.s) * (1 - model.n) + c.t * model.t_unit_deg + 2 * c.z.total() +
           __builtin_popcount(c.mask);
}

// Gaussian elimination over Q: A x = rhs with the fixed column order; free
// variables are zero.  Returns nullopt when inconsistent.
std::optional<std::vector<Rat>> solve_linear(std::vector<std::vector<Rat>>& a,
                                             std::vector<Rat>& rhs) {
    const size_t rows = a.size();
    const size_t cols = rows ? a[0].size() : 0;
    std::vector<long> pivot_of_col(cols, -1);
    size_t row = 0;
    for (size_t col = 0; col < cols && row < rows; ++col) {
        size_t p = row;
        while (p < rows && a[p][col] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[row]);
        std::swap(rhs[p], rhs[row]);
        for (size_t r = 0; r < rows; ++r) {
            if (r == row || a[r][col] == 0) continue;
            Rat f = a[r][col] / a[row][col];
            for (size_t k = col; k < cols; ++k) a[r][k] -= f * a[row][k];
            rhs[r] -= f * rhs[row];
        }
        pivot_of_col[col] = static_cast<long>(row);
        ++row;
    }
    for (size_t r = row; r < rows; ++r)
        if (rhs[r] != 0) return std::nullopt;
    std::vector<Rat> x(cols, Rat(0));
    for (size_t col = 0; col < cols; ++col)
        if (pivot_of_col[col] >= 0)
            x[col] = rhs[pivot_of_col[col]] / a[pivot_of_col[col]][col];
    return x;
}

}  // namespace

SliceSolution solve_delta(const ObstructionSlice& slice, const DiracPtr& mod) {
    const ModelPtr& model = mod->model;
    const int n = model->n;
    SliceSolution sol;
    sol.c_l = NovikovSeries::zero(model->denom);
    sol.b_l = EndMorphism::zero(mod);
    SliceVec o_vec = to_slice(slice.o);
    if (o_vec.empty()) return sol;

    // z-exponent box around the obstruction support, padded by the reach of
    // the D-monomials.
    std::array<int, kMaxDense> zlo{}, zhi{};
    zlo.fill(std::numeric_limits<int>::max());
    zhi.fill(std::numeric_limits<int>::min());
    for (const auto& [k, q] : o_vec)
        for (int j = 0; j < n; ++j) {
            zlo[j] = std::min(zlo[j], static_cast<int>(k.z[j]));
            zhi[j] = std::max(zhi[j], static_cast<int>(k.z[j]));
        }
    for (int j = 0; j < n; ++j) {
        zlo[j] -= 2;
        zhi[j] += 2;
    }

    // Scalar window monomials of degree 2 (the c id part).
    std::vector<std::pair<int32_t, int64_t>> scalars;
    for (int32_t k = 0;; ++k) {
        if (Rat(k) > slice.level_hi) break;
        long num = 2 - static_cast<long>(k) * (1 - n);
        if (num % model->t_unit_deg != 0) continue;
        int64_t t = num / model->t_unit_deg;
        Rat w = Rat(k) + rat_frac(t, model->denom);
        if (w > slice.level_lo && w <= slice.level_hi) scalars.push_back({k, t});
    }

    // Degree-1 Clifford candidates with end-valuation in the window.
    std::vector<Candidate> candidates;
    const uint32_t nmask = 1u << model->d;
    std::function<void(int, ZExp)> enum_z = [&](int j, ZExp z) {
        if (j == n) {
            for (uint32_t mask = 0; mask < nmask; ++mask) {
                if (!(__builtin_popcount(mask) & 1)) continue;  // degree-1 needs odd words
                for (int32_t k = 0;; ++k) {
                    if (Rat(k) > slice.level_hi) break;
                    long num = 1 - __builtin_popcount(mask) - 2 * z.total() -
                               static_cast<long>(k) * (1 - n);
                    if (num % model->t_unit_deg != 0) continue;
                    Candidate c{mask, z, k, num / model->t_unit_deg};
                    if (candidate_degree(*model, c) != 1) continue;
                    EndMorphism cm = candidate_matrix(mod, c);
                    auto nu = cm.end_norm();
                    if (nu.is_inf()) continue;
                    if (!(nu.value() > slice.level_lo && nu.value() <= slice.level_hi)) continue;
                    candidates.push_back(c);
                }
            }
            return;
        }
        for (int v = zlo[j]; v <= zhi[j]; ++v) {
            ZExp z2 = z;
            z2[j] = static_cast<int16_t>(v);
            enum_z(j + 1, z2);
        }
    };
    enum_z(0, ZExp{});
    // Deterministic pivot preference: balanced monomials first (smallest sum
    // of squared z-exponents), then word mask, then the exponents themselves.
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        long qa = 0, qb = 0;
        for (int j = 0; j < kMaxDense; ++j) {
            qa += static_cast<long>(a.z[j]) * a.z[j];
            qb += static_cast<long>(b.z[j]) * b.z[j];
        }
        if (qa != qb) return qa < qb;
        if (a.mask != b.mask) return a.mask < b.mask;
        return a < b;
    });
    std::vector<EndMorphism> cand_delta;
    for (const auto& c : candidates)
        cand_delta.push_back(
            delta(candidate_matrix(mod, c)).slice_norm(slice.level_lo, slice.level_hi));

    // Row space: union of supports.
    std::set<SliceKey> keys;
    for (const auto& [k, q] : o_vec) keys.insert(k);
    for (const auto& d : cand_delta)
        for (const auto& [k, q] : to_slice(d)) keys.insert(k);
    for (const auto& [k, t] : scalars)
        for (int i = 0; i < mod->rank(); ++i) keys.insert({i, i, ZExp{}, k, t});

    std::vector<SliceKey> key_list(keys.begin(), keys.end());
    std::map<SliceKey, size_t> key_index;
    for (size_t i = 0; i < key_list.size(); ++i) key_index[key_list[i]] = i;

    const size_t rows = key_list.size();
    const size_t cols = candidates.size() + scalars.size();
    std::vector<std::vector<Rat>> a(rows, std::vector<Rat>(cols, Rat(0)));
    std::vector<Rat> rhs(rows, Rat(0));
    for (size_t ci = 0; ci < candidates.size(); ++ci)
        for (const auto& [k, q] : to_slice(cand_delta[ci])) a[key_index[k]][ci] = q;
    for (size_t si = 0; si < scalars.size(); ++si)
        for (int i = 0; i < mod->rank(); ++i) {
            SliceKey k{i, i, ZExp{}, scalars[si].first, scalars[si].second};
            a[key_index[k]][candidates.size() + si] -= Rat(1);
        }
    for (const auto& [k, q] : o_vec) rhs[key_index[k]] = -q;

    auto x = solve_linear(a, rhs);
    if (!x) throw Unsolvable("no correction in the slice window");

    for (size_t ci = 0; ci < candidates.size(); ++ci) {
        if ((*x)[ci] == 0) continue;
        sol.b_l += candidate_matrix(mod, candidates[ci]).scaled((*x)[ci]);
    }
    for (size_t si = 0; si < scalars.size(); ++si) {
        const Rat& v = (*x)[candidates.size() + si];
        if (v != 0) sol.c_l.add_term({scalars[si].first, scalars[si].second}, v);
    }
    return sol;
}

namespace {

// theta of a chain evaluated word by word, tracking per-length residue counts.
NovikovSeries theta_by_word(const Chain& chain, int64_t cutoff_num, TraceStats& stats,
                            std::map<int, uint64_t>& by_length, const TraceOptions& topts,
                            int32_t denom) {
    NovikovSeries out(denom, cutoff_num);
    for (const auto& w : chain.words) {
        if (w.factors.empty() || w.scalar.is_zero()) continue;
        bool all_scalar = true;
        for (const auto& f : w.factors) all_scalar = all_scalar && f.is_scalar();
        if (all_scalar) continue;
        auto v = word_valuation(w);
        if (v.is_inf()) continue;
        if (v.value() * denom >= Rat(cutoff_num)) continue;
        TraceStats st;
        NovikovSeries val = theta_l(w.factors, cutoff_num, &st, topts);
        stats += st;
        by_length[w.length()] += st.residues_evaluated;
        if (!val.is_zero()) out += val * w.scalar.truncate(cutoff_num);
    }
    return out;
}

}  // namespace

SolveResult solve_run(const DiracPtr& mod, const NovikovSeries& r, const Rat& cutoff,
                      const SolverOptions& opts) {
    const ModelPtr& model = mod->model;
    if (!model->simplex) throw UnsupportedSuperpotential();
    const int n = model->n;
    const int32_t denom = model->denom;
    const int64_t cutoff_num = cutoff_mod_f(cutoff, denom);

    TraceOptions topts;
    topts.workers = opts.workers;
    topts.parity_prune = opts.parity_prune;

    SolveResult res;
    res.c = NovikovSeries::zero(denom, cutoff_num);
    res.b = EndMorphism::zero(mod);
    if (cutoff <= 0 || r.is_zero()) {
        // Nothing to solve: all obstructions vanish for the zero seed.
        res.mc_check = true;
        res.trace_check = true;
        return res;
    }
    if (r.degree(n) != std::optional<long>(1 - n))
        throw std::invalid_argument("seed r must be homogeneous of degree 1-n");
    Rat nu_r = r.valuation().value();
    if (!(nu_r > 0)) throw std::invalid_argument("seed r must have positive valuation");

    EndMorphism h0 = h0_morphism(mod);
    NovikovSeries r_full = r.truncate(kNoCutoff);
    BoundingCochainState st;
    st.b = h0.scaled(r_full).truncate_norm(cutoff);
    st.c = NovikovSeries::zero(denom);
    st.r = r_full;

    const Rat step(1, denom);
    for (Rat lo = nu_r; lo < cutoff; lo += step) {
        Rat hi = lo + step;
        if (hi > cutoff) hi = cutoff;
        LevelLog log;
        log.level = hi;

        ObstructionSlice slice = obstruction_slice(st, lo, hi);
        SliceSolution sol = {NovikovSeries::zero(denom), EndMorphism::zero(mod)};
        if (!slice.o.is_zero()) sol = solve_delta(slice, mod);
        if (!sol.b_l.is_zero()) {
            auto nb = sol.b_l.end_norm();
            if (!(nb > ValOrInf::of(lo)))
                throw ClosednessFailure("correction below the current level");
        }
        st.b += sol.b_l;
        st.c += sol.c_l;
        log.c_l = sol.c_l;
        log.b_l_text = sol.b_l.is_zero() ? "0" : sol.b_l.str();

        // Trace correction theta_l at this weight, when a degree-(1-n)
        // scalar can exist here at all.
        NovikovSeries theta_corr = NovikovSeries::zero(denom);
        if (theta_weight_admissible(*model, hi)) {
            int64_t level_cut = cutoff_mod_f(hi, denom);
            Chain exp_b = exp_chain(st.b, hi);
            Chain y_b = st.c.is_zero() ? Chain{} : y_b_chain(st.b, st.c, hi);
            NovikovSeries te = theta_by_word(exp_b, level_cut, res.stats,
                                             res.residues_by_length, topts, denom);
            NovikovSeries ty = y_b.words.empty()
                                   ? NovikovSeries(denom, level_cut)
                                   : theta_by_word(y_b, level_cut, res.stats,
                                                   res.residues_by_length, topts, denom);
            NovikovSeries discrepancy = te - ty - st.r.truncate(level_cut);
            // earlier weights must already agree; what remains is the
            // (lo, hi] slice
            NovikovSeries below = discrepancy.truncate(cutoff_mod_f(lo, denom));
            if (!below.is_zero())
                throw ClosednessFailure("trace discrepancy below the current level: " +
                                        below.str());
            theta_corr = discrepancy;
            if (!theta_corr.is_zero()) {
                if (theta_corr.degree(n) != std::optional<long>(1 - n))
                    throw ClosednessFailure("trace correction has wrong degree");
                st.b -= h0.scaled(theta_corr.truncate(kNoCutoff));
            }
        }
        log.theta_l = theta_corr;
        res.levels.push_back(std::move(log));
        st.b = st.b.truncate_norm(cutoff);
        ++st.level;
    }

    res.b = st.b;
    res.c = st.c.truncate(cutoff_num);

    // Post-run verification.
    {
        EndMorphism resid = mc(st.b);
        resid -= EndMorphism::identity(mod).scaled(st.c.truncate(kNoCutoff));
        res.mc_check = resid.truncate_norm(cutoff).is_zero();
    }
    if (opts.final_check) {
        auto t0 = std::chrono::steady_clock::now();
        Chain exp_b = exp_chain(st.b, cutoff);
        Chain y_b = st.c.is_zero() ? Chain{} : y_b_chain(st.b, st.c, cutoff);
        NovikovSeries te = theta_by_word(exp_b, cutoff_num, res.stats, res.residues_by_length,
                                         topts, denom);
        NovikovSeries ty = y_b.words.empty() ? NovikovSeries(denom, cutoff_num)
                                             : theta_by_word(y_b, cutoff_num, res.stats,
                                                             res.residues_by_length, topts,
                                                             denom);
        res.trace_check = (te - ty) == st.r.truncate(cutoff_num);
        res.trace_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    res.invariants = extract_invariants(res.c, n);
    return res;
}

}  // namespace tmf
