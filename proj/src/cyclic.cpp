#include <tmf/cyclic.hpp>

#include <algorithm>

namespace tmf {

namespace {

// Degrees of the shifted factors |s a_j| indexed like the paper: j = 1 is the
// rightmost factor. Returns degrees[j-1] = |s a_j|.
std::vector<long> shifted_degrees(const TensorWord& w) {
    const int l = w.length();
    std::vector<long> s(l);
    for (int j = 1; j <= l; ++j) {
        auto d = w.factors[l - j].degree();
        if (!d) throw std::invalid_argument("non-homogeneous tensor factor");
        s[j - 1] = *d - 1;
    }
    return s;
}

long eps_from(const std::vector<long>& sdeg, int i) {
    long e = 0;
    for (size_t j = i - 1; j < sdeg.size(); ++j) e += sdeg[j];
    return e;
}

}  // namespace

std::optional<long> word_degree(const TensorWord& w) {
    if (w.factors.empty()) return std::nullopt;
    long deg = 0;
    for (int idx = 0; idx < w.length(); ++idx) {
        auto d = w.factors[idx].degree();
        if (!d) {
            if (w.factors[idx].is_zero()) continue;
            return std::nullopt;
        }
        deg += (idx == 0) ? *d : (*d - 1);
    }
    return deg;
}

ValOrInf word_valuation(const TensorWord& w) {
    ValOrInf v = ValOrInf::of(Rat(0));
    for (const auto& f : w.factors) v = val_add(v, f.end_norm());
    return val_add(v, w.scalar.valuation());
}

Chain d_cc(const TensorWord& w) {
    Chain out;
    const int l = w.length();
    if (l == 0) return out;
    auto sdeg = shifted_degrees(w);

    // b(mu_1): differential on each slot.
    for (int i = 1; i <= l; ++i) {
        TensorWord t = w;
        t.factors[l - i] = delta(w.factors[l - i]);
        if (t.factors[l - i].is_zero()) continue;
        if (i < l && (eps_from(sdeg, i + 1) & 1)) t.scalar = -t.scalar;
        out.words.push_back(std::move(t));
    }
    if (l == 1) return out;

    // b(mu_2): fold a_l a_{l-1}, the interior products, and the wrap-around.
    {
        TensorWord t;
        t.scalar = w.scalar;
        long deg_l = sdeg[l - 1] + 1;
        if (deg_l & 1) t.scalar = -t.scalar;
        t.factors.push_back(w.factors[0] * w.factors[1]);
        for (int idx = 2; idx < l; ++idx) t.factors.push_back(w.factors[idx]);
        if (!t.factors[0].is_zero()) out.words.push_back(std::move(t));
    }
    for (int i = 1; i <= l - 2; ++i) {
        TensorWord t;
        t.scalar = -w.scalar;
        if (eps_from(sdeg, i + 1) & 1) t.scalar = -t.scalar;
        // merge a_{i+1} a_i, positions l-i-1 and l-i in the array
        for (int idx = 0; idx < l - i - 1; ++idx) t.factors.push_back(w.factors[idx]);
        t.factors.push_back(w.factors[l - i - 1] * w.factors[l - i]);
        for (int idx = l - i + 1; idx < l; ++idx) t.factors.push_back(w.factors[idx]);
        if (!t.factors[l - i - 1].is_zero()) out.words.push_back(std::move(t));
    }
    {
        TensorWord t;
        t.scalar = -w.scalar;
        long e = sdeg[0] * (eps_from(sdeg, 2) + 1);
        if (e & 1) t.scalar = -t.scalar;
        t.factors.push_back(w.factors[l - 1] * w.factors[0]);
        for (int idx = 1; idx < l - 1; ++idx) t.factors.push_back(w.factors[idx]);
        if (!t.factors[0].is_zero()) out.words.push_back(std::move(t));
    }
    return out;
}

Chain d_cc(const Chain& c) {
    Chain out;
    for (const auto& w : c.words) {
        Chain dw = d_cc(w);
        for (auto& x : dw.words) out.words.push_back(std::move(x));
    }
    return out;
}

TensorWord cyclic_t(const TensorWord& w) {
    const int l = w.length();
    auto sdeg = shifted_degrees(w);
    TensorWord t;
    t.scalar = w.scalar;
    long e = sdeg[l - 1] * (eps_from(sdeg, 1) - sdeg[l - 1]);
    if (e & 1) t.scalar = -t.scalar;
    for (int idx = 1; idx < l; ++idx) t.factors.push_back(w.factors[idx]);
    t.factors.push_back(w.factors[0]);
    return t;
}

Chain exp_chain(const EndMorphism& b, const Rat& cutoff) {
    auto nu = b.end_norm();
    if (!(nu > ValOrInf::of(Rat(0)))) throw std::invalid_argument("exp needs nu(b) > 0");
    if (b.degree() != std::optional<long>(1))
        throw std::invalid_argument("exp needs a degree-1 cochain");
    const auto& model = b.module()->model;
    Chain out;
    TensorWord unit;
    unit.factors.push_back(EndMorphism::identity(b.module()));
    unit.scalar = NovikovSeries::constant(Rat(1), model->denom);
    out.words.push_back(std::move(unit));
    for (long l = 1;; ++l) {
        Rat lv = nu.value() * l;
        if (lv > cutoff) break;
        TensorWord w;
        w.scalar = NovikovSeries::constant(rat_frac(1, l), model->denom);
        for (long i = 0; i < l; ++i) w.factors.push_back(b);
        out.words.push_back(std::move(w));
    }
    return out;
}

CJKey cj_canonical(CJKey j) {
    CJKey best = j;
    for (size_t r = 1; r < j.size(); ++r) {
        std::rotate(j.begin(), j.begin() + 1, j.end());
        if (j < best) best = j;
    }
    return best;
}

CJTable cj_constants(int level_max) {
    if (level_max < 1) throw std::invalid_argument("level_max must be positive");
    CJTable table;
    table[{1}] = Rat(1);
    std::vector<CJKey> frontier = {{1}};
    for (int level = 1; level < level_max; ++level) {
        CJTable next;
        for (const auto& key : frontier) {
            const Rat& cj = table.at(key);
            const long m = static_cast<long>(key.size()) - 1;
            // raise one part
            for (size_t s = 0; s < key.size(); ++s) {
                CJKey k2 = key;
                k2[s] += 1;
                next[cj_canonical(std::move(k2))] += cj * rat_frac(2, m + 1);
            }
            // insert a fresh part equal to 1
            for (size_t s = 0; s < key.size(); ++s) {
                CJKey k2;
                k2.insert(k2.end(), key.begin(), key.begin() + s + 1);
                k2.push_back(1);
                k2.insert(k2.end(), key.begin() + s + 1, key.end());
                next[cj_canonical(std::move(k2))] += cj * rat_frac(1, m + 2);
            }
            // merge two cyclically adjacent parts into j + j' + 1
            if (m >= 1) {
                {
                    CJKey k2;
                    k2.push_back(key.front() + key.back() + 1);
                    k2.insert(k2.end(), key.begin() + 1, key.end() - 1);
                    next[cj_canonical(std::move(k2))] += cj * Rat(1, m);
                }
                for (long s = 0; s < m; ++s) {
                    CJKey k2;
                    k2.insert(k2.end(), key.begin(), key.begin() + s);
                    k2.push_back(key[s] + key[s + 1] + 1);
                    k2.insert(k2.end(), key.begin() + s + 2, key.end());
                    next[cj_canonical(std::move(k2))] += cj * Rat(1, m);
                }
            }
        }
        frontier.clear();
        for (auto& [k, v] : next) {
            table[k] = v;
            frontier.push_back(k);
        }
    }
    return table;
}

NovikovSeries pi_projection(const EndMorphism& phi) {
    const auto& model = phi.module()->model;
    const auto& entry = phi.at(0, 0);
    for (const auto& [z, c] : entry.terms())
        if (z.is_zero()) return c;
    return NovikovSeries::zero(model->denom);
}

Chain y_b_chain(const EndMorphism& b, const NovikovSeries& c, const Rat& cutoff) {
    const auto& mod = b.module();
    const auto& model = mod->model;
    auto nu_b = b.end_norm();
    auto nu_c = c.valuation();
    if (!(nu_b > ValOrInf::of(Rat(0)))) throw std::invalid_argument("y_b needs nu(b) > 0");
    Chain out;
    if (c.is_zero()) return out;
    if (!(nu_c > ValOrInf::of(Rat(0)))) throw std::invalid_argument("y_b needs nu(c) > 0");
    if (!pi_projection(b).is_zero()) throw std::invalid_argument("y_b needs pi(b) = 0");

    const Rat vb = nu_b.value(), vc = nu_c.value();
    int level_max = 0;
    while (vc * (level_max + 1) + vb <= cutoff) ++level_max;
    if (level_max == 0) return out;
    CJTable table = cj_constants(level_max);

    EndMorphism id = EndMorphism::identity(mod);
    EndMorphism cid = id.scaled(c.truncate(kNoCutoff));

    for (const auto& [key, cj] : table) {
        const long parts = static_cast<long>(key.size());
        long jsum = 0;
        for (long x : key) jsum += x;
        Rat base = vc * jsum;
        if (base + vb * parts > cutoff) continue;
        // enumerate I in Z_{>0}^{parts} with base + vb * |I| <= cutoff
        Rat cap = (cutoff - base) / vb;
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), cap.get_num().get_mpz_t(), cap.get_den().get_mpz_t());
        long max_isum = fl.get_si();
        std::vector<long> i_tuple(parts, 1);
        std::function<void(long, long)> rec = [&](long pos, long used) {
            if (pos == parts) {
                TensorWord w;
                w.scalar = NovikovSeries::constant(-cj, model->denom);
                for (long k = 0; k < parts; ++k) {
                    for (long t = 0; t < key[k]; ++t) {
                        w.factors.push_back(cid);
                        w.factors.push_back(id);
                    }
                    for (long t = 0; t < i_tuple[k]; ++t) w.factors.push_back(b);
                }
                out.words.push_back(std::move(w));
                return;
            }
            for (long v = 1; used + v + (parts - pos - 1) <= max_isum; ++v) {
                i_tuple[pos] = v;
                rec(pos + 1, used + v);
            }
        };
        if (max_isum >= parts) rec(0, 0);
    }
    return out;
}

}  // namespace tmf
