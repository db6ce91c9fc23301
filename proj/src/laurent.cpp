#include <tmf/laurent.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace tmf {

namespace {

PolytopeSpec standard_simplex_spec(int n) {
    PolytopeSpec spec;
    spec.n = n;
    for (int i = 0; i < n; ++i) {
        Facet f;
        f.normal.assign(n, 0);
        f.normal[i] = -1;
        f.offset = Rat(0);
        spec.facets.push_back(std::move(f));
    }
    Facet diag;
    diag.normal.assign(n, 1);
    diag.offset = Rat(1);
    spec.facets.push_back(std::move(diag));
    return spec;
}

void fill_vertex_table(Model& m, const ValidatedPolytope& vp) {
    m.vertices = vp.vertices;
    m.vertex_facet.clear();
    for (const auto& v : vp.vertices) {
        std::vector<Rat> row(m.d);
        for (int i = 0; i < m.d; ++i) {
            Rat dot(0);
            for (int c = 0; c < m.n; ++c) dot += Rat(vp.spec.facets[i].normal[c]) * v[c];
            row[i] = vp.spec.facets[i].offset - dot;
        }
        m.vertex_facet.push_back(std::move(row));
    }
}

void fill_eps_cl(Model& m) {
    m.eps_cl.assign(m.d, std::vector<int>(m.d, 1));
    for (int i = 0; i < m.d; ++i) {
        for (int j = 0; j < m.d; ++j) {
            if (i == j || m.spin.eps_q[i][j] != 0) continue;  // f_i + f_j not in J
            std::vector<long> u(m.d, 0);
            u[i] = 1;
            u[j] = 1;
            auto coords = in_kernel_coords(m.kl, u);
            if (!coords) continue;
            int sp = 0;
            for (int k = 0; k < m.kl.rank(); ++k)
                sp += m.spin.sigma_prime_basis[k] * static_cast<int>((((*coords)[k] % 2) + 2) % 2);
            m.eps_cl[i][j] = sp & 1;
        }
    }
}

// Expresses facet i through the dense coordinates: f_i + sum c_j f_dense_j in J.
Model::FacetMono eliminate_facet(const Model& m, int facet) {
    std::vector<std::vector<Rat>> b(m.n, std::vector<Rat>(m.n));
    std::vector<Rat> rhs(m.n);
    for (int r = 0; r < m.n; ++r) {
        for (int j = 0; j < m.n; ++j) b[r][j] = Rat(m.polytope.facets[m.dense[j]].normal[r]);
        rhs[r] = Rat(-m.polytope.facets[facet].normal[r]);
    }
    auto c = solve_square(b, rhs);
    if (!c) throw std::logic_error("dense facet basis is singular");
    std::vector<long> u(m.d, 0);
    u[facet] = 1;
    for (int j = 0; j < m.n; ++j) {
        if (!rat_is_int((*c)[j])) throw std::logic_error("non-integer elimination coefficient");
        u[m.dense[j]] += rat_long((*c)[j]);
    }
    auto coords = in_kernel_coords(m.kl, u);
    if (!coords) throw std::logic_error("eliminated facet is not in the kernel lattice");
    Rat h(0);
    int sg = 0;
    for (int k = 0; k < m.kl.rank(); ++k) {
        h += Rat((*coords)[k]) * m.kl.h_basis[k];
        sg += m.spin.sigma_basis[k] * static_cast<int>((((*coords)[k] % 2) + 2) % 2);
    }
    Model::FacetMono fm;
    fm.sign = (sg & 1) ? -1 : 1;
    Rat tn = h * m.denom;
    if (!rat_is_int(tn)) throw std::logic_error("facet T-power outside the value group");
    fm.t_num = rat_long(tn);
    for (int j = 0; j < m.n; ++j) fm.z[j] = static_cast<int16_t>(-rat_long((*c)[j]));
    return fm;
}

void fill_facet_monos(Model& m) {
    m.facet_mono.assign(m.d, {});
    std::vector<bool> is_dense(m.d, false);
    for (int j = 0; j < m.n; ++j) {
        is_dense[m.dense[j]] = true;
        Model::FacetMono fm;
        fm.z[j] = 1;
        m.facet_mono[m.dense[j]] = fm;
    }
    for (int i = 0; i < m.d; ++i)
        if (!is_dense[i]) m.facet_mono[i] = eliminate_facet(m, i);
}

}  // namespace

ModelPtr simplex_model(int n) {
    if (n < 1 || n > kMaxDense) throw std::invalid_argument("simplex dimension out of range");
    auto vp = validate_delzant(standard_simplex_spec(n));
    auto m = std::make_shared<Model>();
    m->n = n;
    m->d = n + 1;
    m->denom = n + 1;
    m->polytope = vp.spec;
    m->kl = kernel_lattice(vp);
    m->spin = spin_analysis(m->kl, n == 1);
    // Facets are relabeled to the paper's order: the eliminated coordinate is
    // facet 0 with normal -w_0, the diagonal facet is last.
    m->dense.resize(n);
    for (int j = 0; j < n; ++j) m->dense[j] = j + 1;
    fill_vertex_table(*m, vp);
    // Reorder vertices so that vertex a is the one with nu_a(z_i) = delta_ai:
    // vertex a is opposite facet a.
    {
        std::vector<std::vector<Rat>> ordered(m->num_vertices());
        std::vector<std::vector<Rat>> ordered_vx(m->num_vertices());
        for (int v = 0; v < m->num_vertices(); ++v) {
            int a = -1;
            for (int i = 0; i <= n; ++i)
                if (m->vertex_facet[v][i] != 0) {
                    a = i;
                    break;
                }
            ordered[a] = m->vertex_facet[v];
            ordered_vx[a] = m->vertices[v];
        }
        m->vertex_facet = std::move(ordered);
        m->vertices = std::move(ordered_vx);
    }
    m->tbar_sign = ((static_cast<long>(n) * (n + 1) / 2) % 2) ? -1 : 1;
    fill_eps_cl(*m);
    fill_facet_monos(*m);
    m->simplex = true;
    return m;
}

ModelPtr model_from_polytope(const ValidatedPolytope& vp) {
    const int n = vp.spec.n, d = vp.spec.d();
    if (n > kMaxDense) throw std::invalid_argument("dimension exceeds supported bound");
    auto m = std::make_shared<Model>();
    m->n = n;
    m->d = d;
    m->polytope = vp.spec;
    m->kl = kernel_lattice(vp);
    if (!m->kl.h_discrete)
        throw std::invalid_argument("offsets give a non-discrete value group");
    m->denom = static_cast<int32_t>(m->kl.value_denominator);
    // |T^(1/denom)| = g_G of the h-generator: with h = c * g on J tensor Q the
    // step 1/denom has g-value 1/(denom * c).
    {
        Rat c(0);
        for (size_t k = 0; k < m->kl.basis.size(); ++k)
            if (m->kl.g_basis[k] != 0) c = m->kl.h_basis[k] / m->kl.g_basis[k];
        if (c != 0) {
            Rat unit = rat_frac(1, m->denom) / c;
            if (!rat_is_int(unit))
                throw std::invalid_argument("grading does not refine the value group");
            m->t_unit_deg = rat_long(unit);
        }
    }
    m->spin = spin_analysis(m->kl, d == 2 && n == 1);

    // Simplex in the paper's presentation: relabel through simplex_model.
    if (d == n + 1 && m->kl.rank() == 1) {
        auto gamma = m->kl.basis[0];
        bool ones = true;
        for (long x : gamma) ones &= (x == gamma[0]) && (std::abs(gamma[0]) == 1);
        Rat h = m->kl.h_basis[0] * gamma[0];  // h on the all-ones generator
        if (ones && h == 1) return simplex_model(n);
    }

    // Dense coordinates: prefer the last n facets (the paper's simplex
    // convention), else the first unimodular subset.
    auto unimodular = [&](const std::vector<int>& sub) {
        std::vector<std::vector<Rat>> b(n, std::vector<Rat>(n));
        for (int r = 0; r < n; ++r)
            for (int j = 0; j < n; ++j) b[r][j] = Rat(vp.spec.facets[sub[j]].normal[r]);
        Rat det = det_rational(b);
        return det == 1 || det == -1;
    };
    std::vector<int> last(n);
    for (int j = 0; j < n; ++j) last[j] = d - n + j;
    if (unimodular(last)) {
        m->dense = last;
    } else {
        std::vector<int> found;
        std::vector<int> idx(n);
        std::function<bool(int, int)> rec = [&](int start, int k) {
            if (k == n) {
                if (unimodular(idx)) {
                    found = idx;
                    return true;
                }
                return false;
            }
            for (int i = start; i <= d - (n - k); ++i) {
                idx[k] = i;
                if (rec(i + 1, k + 1)) return true;
            }
            return false;
        };
        rec(0, 0);
        if (found.empty()) throw std::logic_error("no unimodular facet subset");
        m->dense = found;
    }

    fill_vertex_table(*m, vp);
    fill_eps_cl(*m);
    fill_facet_monos(*m);
    return m;
}

LaurentElement LaurentElement::scalar(ModelPtr m, NovikovSeries c) {
    LaurentElement r(std::move(m));
    r.add_term(ZExp{}, c);
    return r;
}

LaurentElement LaurentElement::monomial(ModelPtr m, const ZExp& z, NovikovSeries c) {
    LaurentElement r(std::move(m));
    r.add_term(z, c);
    return r;
}

LaurentElement LaurentElement::coordinate(ModelPtr m, int facet) {
    const auto& fm = m->facet_mono.at(facet);
    NovikovSeries c = NovikovSeries::monomial(Rat(fm.sign), 0, fm.t_num, m->denom);
    return monomial(std::move(m), fm.z, std::move(c));
}

void LaurentElement::add_term(const ZExp& z, const NovikovSeries& c) {
    if (c.is_zero()) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), z,
                               [](const auto& a, const ZExp& b) { return a.first < b; });
    if (it != terms_.end() && it->first == z) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    } else {
        terms_.insert(it, {z, c});
    }
}

LaurentElement& LaurentElement::operator+=(const LaurentElement& o) {
    if (!model_) model_ = o.model_;
    else if (o.model_ && o.model_ != model_) throw std::invalid_argument("model mismatch");
    for (const auto& [z, c] : o.terms_) add_term(z, c);
    return *this;
}

LaurentElement& LaurentElement::operator-=(const LaurentElement& o) {
    return *this += -o;
}

LaurentElement LaurentElement::operator-() const {
    LaurentElement r(*this);
    for (auto& [z, c] : r.terms_) c = -c;
    return r;
}

LaurentElement operator*(const LaurentElement& a, const LaurentElement& b) {
    if (a.model_ != b.model_ && a.model_ && b.model_)
        throw std::invalid_argument("model mismatch");
    LaurentElement r(a.model_ ? a.model_ : b.model_);
    std::map<ZExp, NovikovSeries> acc;
    for (const auto& [za, ca] : a.terms_)
        for (const auto& [zb, cb] : b.terms_) {
            NovikovSeries p = ca * cb;
            if (p.is_zero()) continue;
            auto [it, fresh] = acc.try_emplace(za + zb, p);
            if (!fresh) it->second += p;
        }
    for (auto& [z, c] : acc)
        if (!c.is_zero()) r.terms_.push_back({z, std::move(c)});
    return r;
}

LaurentElement LaurentElement::scaled(const Rat& q) const {
    if (q == 0) return LaurentElement(model_);
    LaurentElement r(*this);
    for (auto& [z, c] : r.terms_) c = c.scaled(q);
    return r;
}

LaurentElement LaurentElement::scaled(const NovikovSeries& c) const {
    LaurentElement r(model_);
    for (const auto& [z, x] : terms_) r.add_term(z, x * c);
    return r;
}

bool operator==(const LaurentElement& a, const LaurentElement& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (size_t i = 0; i < a.terms_.size(); ++i)
        if (!(a.terms_[i].first == b.terms_[i].first && a.terms_[i].second == b.terms_[i].second))
            return false;
    return true;
}

LaurentElement LaurentElement::diff(int j) const {
    LaurentElement r(model_);
    for (const auto& [z, c] : terms_) {
        if (z[j] == 0) continue;
        ZExp zd = z;
        zd[j] = static_cast<int16_t>(zd[j] - 1);
        r.add_term(zd, c.scaled(Rat(z[j])));
    }
    return r;
}

ValOrInf LaurentElement::valuation_at(const std::vector<Rat>& zeta) const {
    const Model& m = *model_;
    std::vector<Rat> dense_val(m.n);
    if (m.simplex && static_cast<int>(zeta.size()) == m.n + 1) {
        Rat sum(0);
        for (const auto& x : zeta) {
            if (x <= 0) throw std::invalid_argument("point is not interior");
            sum += x;
        }
        if (sum != 1) throw std::invalid_argument("tilde coordinates must sum to 1");
        for (int j = 0; j < m.n; ++j) dense_val[j] = zeta[m.dense[j]];
    } else if (static_cast<int>(zeta.size()) == m.n) {
        for (int i = 0; i < m.d; ++i) {
            Rat dot(0);
            for (int c = 0; c < m.n; ++c) dot += Rat(m.polytope.facets[i].normal[c]) * zeta[c];
            Rat v = m.polytope.facets[i].offset - dot;
            if (v <= 0) throw std::invalid_argument("point is not interior");
        }
        for (int j = 0; j < m.n; ++j) {
            Rat dot(0);
            int fi = m.dense[j];
            for (int c = 0; c < m.n; ++c)
                dot += Rat(m.polytope.facets[fi].normal[c]) * zeta[c];
            dense_val[j] = m.polytope.facets[fi].offset - dot;
        }
    } else {
        throw std::invalid_argument("point has wrong dimension");
    }
    ValOrInf best = ValOrInf::infinity();
    for (const auto& [z, c] : terms_) {
        Rat mono(0);
        for (int j = 0; j < m.n; ++j)
            if (z[j]) mono += Rat(z[j]) * dense_val[j];
        for (const auto& [k, q] : c.terms()) {
            Rat w = rat_frac(c.weight_num(k), c.denom()) + mono;
            best = val_min(best, ValOrInf::of(w));
        }
    }
    return best;
}

ValOrInf LaurentElement::norm() const {
    const Model& m = *model_;
    ValOrInf best = ValOrInf::infinity();
    for (int v = 0; v < m.num_vertices(); ++v) {
        for (const auto& [z, c] : terms_) {
            Rat mono = m.vertex_val(v, z);
            for (const auto& [k, q] : c.terms())
                best = val_min(best, ValOrInf::of(rat_frac(c.weight_num(k), c.denom()) + mono));
        }
    }
    return best;
}

LaurentElement LaurentElement::truncate_norm(const Rat& bound,
                                             const std::vector<Rat>& vertex_shift) const {
    const Model& m = *model_;
    LaurentElement r(model_);
    for (const auto& [z, c] : terms_) {
        std::vector<Rat> mono(m.num_vertices());
        for (int v = 0; v < m.num_vertices(); ++v) mono[v] = m.vertex_val(v, z);
        NovikovSeries kept(c.denom(), c.cutoff_num());
        for (const auto& [k, q] : c.terms()) {
            Rat w = rat_frac(c.weight_num(k), c.denom());
            bool keep = false;
            for (int v = 0; v < m.num_vertices() && !keep; ++v)
                if (w + mono[v] + vertex_shift[v] <= bound) keep = true;
            if (keep) kept.add_term(k, q);
        }
        if (!kept.is_zero()) r.terms_.push_back({z, std::move(kept)});
    }
    return r;
}

const NovikovSeries* LaurentElement::scalar_part() const {
    for (const auto& [z, c] : terms_)
        if (z.is_zero()) return &c;
    return nullptr;
}

std::optional<long> LaurentElement::degree() const {
    if (terms_.empty()) return std::nullopt;
    const Model& m = *model_;
    std::optional<long> deg;
    for (const auto& [z, c] : terms_) {
        for (const auto& [k, q] : c.terms()) {
            long d = static_cast<long>(k.s_exp) * (1 - m.n) + k.t_num * m.t_unit_deg +
                     2 * z.total();
            if (deg && *deg != d) return std::nullopt;
            deg = d;
        }
    }
    return deg;
}

std::string LaurentElement::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [z, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        bool paren = c.terms().size() > 1;
        os << (paren ? "(" : "") << c.str() << (paren ? ")" : "");
        for (int j = 0; j < (model_ ? model_->n : kMaxDense); ++j) {
            if (!z[j]) continue;
            os << " * z" << (j + 1);
            if (z[j] != 1) os << "^" << z[j];
        }
    }
    return os.str();
}

size_t LaurentElement::hash() const {
    size_t h = 14695981039346656037ull;
    auto mix = [&h](uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    for (const auto& [z, c] : terms_) {
        for (int j = 0; j < kMaxDense; ++j) mix(static_cast<uint64_t>(static_cast<int64_t>(z[j])));
        mix(c.hash());
    }
    return h;
}

LaurentElement superpotential(const ModelPtr& m) {
    LaurentElement w(m);
    for (int i = 0; i < m->d; ++i) w += LaurentElement::coordinate(m, i);
    return w;
}

std::vector<LaurentElement> superpotential_partials(const ModelPtr& m) {
    LaurentElement w = superpotential(m);
    std::vector<LaurentElement> parts;
    for (int j = 0; j < m->n; ++j) parts.push_back(w.diff(j));
    return parts;
}

}  // namespace tmf
