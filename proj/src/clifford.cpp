#include <tmf/clifford.hpp>

#include <algorithm>
#include <sstream>

namespace tmf {

CliffordElement CliffordElement::word(ModelPtr m, uint32_t mask, LaurentElement coeff) {
    CliffordElement r(std::move(m));
    r.add_term(mask, coeff);
    return r;
}

CliffordElement CliffordElement::generator(ModelPtr m, int i) {
    auto one = LaurentElement::scalar(m, NovikovSeries::constant(Rat(1), m->denom));
    return word(std::move(m), 1u << i, std::move(one));
}

void CliffordElement::add_term(uint32_t mask, const LaurentElement& coeff) {
    if (coeff.is_zero()) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), mask,
                               [](const auto& a, uint32_t b) { return a.first < b; });
    if (it != terms_.end() && it->first == mask) {
        it->second += coeff;
        if (it->second.is_zero()) terms_.erase(it);
    } else {
        terms_.insert(it, {mask, coeff});
    }
}

CliffordElement& CliffordElement::operator+=(const CliffordElement& o) {
    if (!model_) model_ = o.model_;
    for (const auto& [mask, c] : o.terms_) add_term(mask, c);
    return *this;
}

CliffordElement CliffordElement::operator-() const {
    CliffordElement r(*this);
    for (auto& [mask, c] : r.terms_) c = -c;
    return r;
}

CliffordElement CliffordElement::scaled(const Rat& q) const {
    if (q == 0) return CliffordElement(model_);
    CliffordElement r(*this);
    for (auto& [mask, c] : r.terms_) c = c.scaled(q);
    return r;
}

std::string CliffordElement::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [mask, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")";
        for (int i = 0; i < 32; ++i)
            if (mask & (1u << i)) os << " e" << i;
    }
    return os.str();
}

namespace {

// e_i * e_M in normal order: sign from crossings, squares turn into z_i.
void insert_generator(const Model& model, int i, uint32_t& mask, int& sign,
                      LaurentElement& coeff) {
    int crossings = 0;
    for (int j = 0; j < i; ++j)
        if (mask & (1u << j)) crossings += model.eps_cl[i][j];
    if (crossings & 1) sign = -sign;
    if (mask & (1u << i)) {
        coeff = coeff * LaurentElement::coordinate(coeff.model(), i);
        mask &= ~(1u << i);
    } else {
        mask |= 1u << i;
    }
}

}  // namespace

CliffordElement cl_mul(const CliffordElement& a, const CliffordElement& b) {
    const ModelPtr& m = a.model() ? a.model() : b.model();
    CliffordElement r(m);
    for (const auto& [ma, ca] : a.terms()) {
        for (const auto& [mb, cb] : b.terms()) {
            uint32_t mask = mb;
            int sign = 1;
            LaurentElement coeff = ca * cb;
            // Feed the generators of a in from the rightmost (largest index).
            for (int i = 31; i >= 0; --i)
                if (ma & (1u << i)) insert_generator(*m, i, mask, sign, coeff);
            r.add_term(mask, sign < 0 ? -coeff : coeff);
        }
    }
    return r;
}

EndMorphism::EndMorphism(DiracPtr mod, int rank) : mod_(std::move(mod)), rank_(rank) {
    m_.assign(static_cast<size_t>(rank_) * rank_, LaurentElement(mod_->model));
}

EndMorphism EndMorphism::identity(const DiracPtr& mod) {
    EndMorphism r(mod, mod->rank());
    for (int i = 0; i < r.rank_; ++i)
        r.at(i, i) = LaurentElement::scalar(mod->model,
                                            NovikovSeries::constant(Rat(1), mod->model->denom));
    return r;
}

EndMorphism EndMorphism::zero(const DiracPtr& mod) { return EndMorphism(mod, mod->rank()); }

bool EndMorphism::is_zero() const {
    for (const auto& x : m_)
        if (!x.is_zero()) return false;
    return true;
}

EndMorphism& EndMorphism::operator+=(const EndMorphism& o) {
    for (size_t i = 0; i < m_.size(); ++i) m_[i] += o.m_[i];
    return *this;
}

EndMorphism& EndMorphism::operator-=(const EndMorphism& o) {
    for (size_t i = 0; i < m_.size(); ++i) m_[i] -= o.m_[i];
    return *this;
}

EndMorphism operator*(const EndMorphism& a, const EndMorphism& b) {
    EndMorphism r(a.mod_, a.rank_);
    for (int i = 0; i < a.rank_; ++i)
        for (int k = 0; k < a.rank_; ++k) {
            if (a.at(i, k).is_zero()) continue;
            for (int j = 0; j < a.rank_; ++j) {
                if (b.at(k, j).is_zero()) continue;
                r.at(i, j) += a.at(i, k) * b.at(k, j);
            }
        }
    return r;
}

EndMorphism EndMorphism::operator-() const {
    EndMorphism r(*this);
    for (auto& x : r.m_) x = -x;
    return r;
}

EndMorphism EndMorphism::scaled(const Rat& q) const {
    EndMorphism r(*this);
    for (auto& x : r.m_) x = x.scaled(q);
    return r;
}

EndMorphism EndMorphism::scaled(const NovikovSeries& c) const {
    EndMorphism r(*this);
    for (auto& x : r.m_) x = x.scaled(c);
    return r;
}

bool operator==(const EndMorphism& a, const EndMorphism& b) {
    if (a.rank_ != b.rank_) return false;
    for (size_t i = 0; i < a.m_.size(); ++i)
        if (!(a.m_[i] == b.m_[i])) return false;
    return true;
}

std::optional<long> EndMorphism::degree() const {
    std::optional<long> deg;
    for (int r = 0; r < rank_; ++r)
        for (int c = 0; c < rank_; ++c) {
            const auto& x = at(r, c);
            if (x.is_zero()) continue;
            auto xd = x.degree();
            if (!xd) return std::nullopt;
            long d = *xd + __builtin_popcount(mod_->basis[r]) - __builtin_popcount(mod_->basis[c]);
            if (deg && *deg != d) return std::nullopt;
            deg = d;
        }
    return deg;
}

bool EndMorphism::is_scalar() const {
    const LaurentElement* diag = nullptr;
    for (int r = 0; r < rank_; ++r)
        for (int c = 0; c < rank_; ++c) {
            const auto& x = at(r, c);
            if (r != c) {
                if (!x.is_zero()) return false;
                continue;
            }
            for (const auto& [z, s] : x.terms())
                if (!z.is_zero()) return false;
            if (!diag)
                diag = &x;
            else if (!(*diag == x))
                return false;
        }
    return true;
}

EndMorphism EndMorphism::diff(int j) const {
    EndMorphism r(mod_, rank_);
    for (size_t i = 0; i < m_.size(); ++i) r.m_[i] = m_[i].diff(j);
    return r;
}

LaurentElement EndMorphism::supertrace() const {
    LaurentElement tr(mod_->model);
    for (int i = 0; i < rank_; ++i) {
        if (mod_->parity(i))
            tr -= at(i, i);
        else
            tr += at(i, i);
    }
    return tr;
}

ValOrInf EndMorphism::end_norm() const {
    const Model& model = *mod_->model;
    ValOrInf best = ValOrInf::infinity();
    for (int r = 0; r < rank_; ++r)
        for (int c = 0; c < rank_; ++c) {
            const auto& x = at(r, c);
            if (x.is_zero()) continue;
            for (int v = 0; v < model.num_vertices(); ++v) {
                Rat shift = mod_->basis_vertex_val[r][v] - mod_->basis_vertex_val[c][v];
                for (const auto& [z, cc] : x.terms()) {
                    Rat mono = model.vertex_val(v, z) + shift;
                    for (const auto& [k, q] : cc.terms())
                        best = val_min(best,
                                       ValOrInf::of(rat_frac(cc.weight_num(k), cc.denom()) + mono));
                }
            }
        }
    return best;
}

EndMorphism EndMorphism::truncate_norm(const Rat& bound) const {
    const Model& model = *mod_->model;
    EndMorphism r(mod_, rank_);
    std::vector<Rat> shift(model.num_vertices());
    for (int row = 0; row < rank_; ++row)
        for (int col = 0; col < rank_; ++col) {
            const auto& x = at(row, col);
            if (x.is_zero()) continue;
            for (int v = 0; v < model.num_vertices(); ++v)
                shift[v] = mod_->basis_vertex_val[row][v] - mod_->basis_vertex_val[col][v];
            r.at(row, col) = x.truncate_norm(bound, shift);
        }
    return r;
}

EndMorphism EndMorphism::slice_norm(const Rat& lo, const Rat& hi) const {
    EndMorphism hi_part = truncate_norm(hi);
    EndMorphism lo_part = truncate_norm(lo);
    return hi_part - lo_part;
}

std::string EndMorphism::str() const {
    std::ostringstream os;
    for (int r = 0; r < rank_; ++r) {
        os << "[";
        for (int c = 0; c < rank_; ++c) {
            if (c) os << ", ";
            os << at(r, c).str();
        }
        os << "]\n";
    }
    return os.str();
}

size_t EndMorphism::hash() const {
    size_t h = 0x9e3779b97f4a7c15ull;
    for (const auto& x : m_) {
        h ^= x.hash() + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

namespace {

uint32_t reversed_key(uint32_t mask, int d) {
    uint32_t key = 0;
    for (int i = 0; i < d; ++i)
        if (mask & (1u << i)) key |= 1u << (d - 1 - i);
    return key;
}

// chi(beta) as a single Clifford word: (-1)^{s(beta)} T^{-beta/2} e^{i(beta)}
// with default frak-s = 0 on the kernel basis and products for the rest.
CliffordElement chi_word(const ModelPtr& m, const std::vector<long>& beta_coords) {
    std::vector<long> u(m->d, 0);
    Rat h(0);
    for (int k = 0; k < m->kl.rank(); ++k) {
        for (int i = 0; i < m->d; ++i) u[i] += beta_coords[k] * m->kl.basis[k][i];
        h += Rat(beta_coords[k]) * m->kl.h_basis[k];
    }
    Rat tn = -h / 2 * m->denom;
    if (!rat_is_int(tn)) throw std::logic_error("beta/2 outside the value group");
    auto coeff = LaurentElement::scalar(
        m, NovikovSeries::monomial(Rat(1), 0, rat_long(tn), m->denom));
    CliffordElement acc = CliffordElement::word(m, 0, coeff);
    // e^{i(beta)} = prod_i e_i^{u_i} in index order; e_i^{2k+r} = z_i^k e_i^r.
    for (int i = 0; i < m->d; ++i) {
        long q = u[i] >= 0 ? u[i] / 2 : -((-u[i] + 1) / 2);
        long r = u[i] - 2 * q;
        LaurentElement zp = LaurentElement::scalar(m, NovikovSeries::constant(Rat(1), m->denom));
        for (long t = 0; t < std::abs(q); ++t) {
            auto zi = LaurentElement::coordinate(m, i);
            if (q > 0) {
                zp = zp * zi;
            } else {
                // z_i^{-1}: invert the stored monomial
                const auto& fm = m->facet_mono[i];
                ZExp inv;
                for (int j = 0; j < m->n; ++j) inv[j] = static_cast<int16_t>(-fm.z[j]);
                zp = zp * LaurentElement::monomial(
                              m, inv, NovikovSeries::monomial(Rat(fm.sign), 0, -fm.t_num,
                                                              m->denom));
            }
        }
        CliffordElement factor = CliffordElement::word(m, r ? (1u << i) : 0u, zp);
        acc = cl_mul(acc, factor);
    }
    return acc;
}

}  // namespace

DiracPtr dirac_build(const ModelPtr& model) {
    if (!model->spin.spin) throw NotSpin();
    if (!model->spin.sigma_prime_free)
        throw std::invalid_argument("background class sigma' is not free");
    auto mod = std::make_shared<DiracModule>();
    mod->model = model;
    const int d = model->d;
    const int rank_j = model->kl.rank();

    // F_2 span of the kernel images and its coset transversal.
    std::vector<uint32_t> gen_mask(rank_j, 0);
    for (int k = 0; k < rank_j; ++k)
        for (int i = 0; i < d; ++i)
            if (((model->kl.basis[k][i] % 2) + 2) % 2) gen_mask[k] |= 1u << i;
    const uint32_t ncombo = 1u << rank_j;
    std::vector<uint32_t> vmask(ncombo, 0);
    for (uint32_t c = 1; c < ncombo; ++c) {
        uint32_t low = c & (c - 1);
        int bit = __builtin_ctz(c);
        vmask[c] = vmask[low] ^ gen_mask[bit];
    }

    const uint32_t nmask = 1u << d;
    mod->reduce.resize(nmask);
    std::vector<CliffordElement> chi(rank_j);
    for (int k = 0; k < rank_j; ++k) {
        std::vector<long> coords(rank_j, 0);
        coords[k] = 1;
        chi[k] = chi_word(model, coords);
        if (chi[k].terms().size() != 1) throw ConsistencyFailure("chi is not a single word");
    }

    for (uint32_t mask = 0; mask < nmask; ++mask) {
        uint32_t best_combo = 0;
        uint32_t best_key = reversed_key(mask, d);
        for (uint32_t c = 1; c < ncombo; ++c) {
            uint32_t key = reversed_key(mask ^ vmask[c], d);
            if (key < best_key) {
                best_key = key;
                best_combo = c;
            }
        }
        auto one = LaurentElement::scalar(model, NovikovSeries::constant(Rat(1), model->denom));
        CliffordElement elt = CliffordElement::word(model, mask, one);
        for (int k = 0; k < rank_j; ++k)
            if (best_combo & (1u << k)) elt = cl_mul(elt, chi[k]);
        if (elt.terms().size() != 1) throw ConsistencyFailure("reduction is not a single word");
        mod->reduce[mask].target = elt.terms()[0].first;
        mod->reduce[mask].factor = elt.terms()[0].second;
        if (mod->reduce[mask].target != (mask ^ vmask[best_combo]))
            throw ConsistencyFailure("reduction target mismatch");
    }

    for (uint32_t mask = 0; mask < nmask; ++mask)
        if (mod->reduce[mask].target == mask) mod->basis.push_back(mask);
    std::sort(mod->basis.begin(), mod->basis.end(), [](uint32_t a, uint32_t b) {
        int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        if (pa != pb) return pa < pb;
        return a < b;
    });
    for (size_t i = 0; i < mod->basis.size(); ++i)
        mod->index[mod->basis[i]] = static_cast<int>(i);

    mod->basis_vertex_val.resize(mod->basis.size());
    for (size_t bi = 0; bi < mod->basis.size(); ++bi) {
        mod->basis_vertex_val[bi].resize(model->num_vertices());
        for (int v = 0; v < model->num_vertices(); ++v) {
            Rat acc(0);
            for (int i = 0; i < d; ++i)
                if (mod->basis[bi] & (1u << i)) acc += model->vertex_facet[v][i] / 2;
            mod->basis_vertex_val[bi][v] = acc;
        }
    }

    // D = left multiplication by e_0 + ... + e_{d-1}.
    CliffordElement dsum(model);
    for (int i = 0; i < d; ++i) dsum += CliffordElement::generator(model, i);
    mod->d_op = left_mult(mod, dsum);

    // w over the beta in J of the form f_i + f_j with sigma(beta) = 0.
    mod->w = NovikovSeries::zero(model->denom);
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            std::vector<long> u(d, 0);
            u[i] = 1;
            u[j] = 1;
            auto coords = in_kernel_coords(model->kl, u);
            if (!coords) continue;
            if (sigma_of(model->spin, *coords) != 0) continue;
            Rat h(0);
            for (int k = 0; k < rank_j; ++k) h += Rat((*coords)[k]) * model->kl.h_basis[k];
            // sign (-1)^{s(beta)} from the product formula for chi.
            CliffordElement prod =
                CliffordElement::word(model, 0, LaurentElement::scalar(
                                                    model, NovikovSeries::constant(
                                                               Rat(1), model->denom)));
            for (int k = 0; k < rank_j; ++k) {
                long a = (*coords)[k];
                std::vector<long> unit(rank_j, 0);
                unit[k] = a >= 0 ? 1 : -1;
                auto cw = chi_word(model, unit);
                for (long t = 0; t < std::abs(a); ++t) prod = cl_mul(prod, cw);
            }
            auto canonical = chi_word(model, *coords);  // with s(beta) = 0
            if (prod.terms().size() != 1 || canonical.terms().size() != 1)
                throw ConsistencyFailure("chi product is not a single word");
            // prod = (-1)^{s(beta)} canonical
            const auto& pm = prod.terms()[0];
            const auto& cm = canonical.terms()[0];
            if (pm.first != cm.first) throw ConsistencyFailure("chi product mask mismatch");
            int s_beta;
            if (pm.second == cm.second)
                s_beta = 0;
            else if (pm.second == -cm.second)
                s_beta = 1;
            else
                throw ConsistencyFailure("chi product is not +-canonical");
            Rat tn = h / 2 * model->denom;
            mod->w.add_term({0, rat_long(tn)}, Rat(s_beta ? 2 : -2));
        }
    }

    // Exact consistency check: D^2 = (W - w) id.
    EndMorphism d2 = mod->d_op * mod->d_op;
    LaurentElement wminus = superpotential(model) - LaurentElement::scalar(model, mod->w);
    EndMorphism expect = EndMorphism::zero(mod);
    for (int r = 0; r < expect.rank(); ++r) expect.at(r, r) = wminus;
    if (!(d2 == expect)) throw ConsistencyFailure("D^2 != (W - w) id");
    return mod;
}

std::vector<std::pair<int, LaurentElement>> module_reduce(const DiracPtr& mod,
                                                          const CliffordElement& x) {
    std::vector<std::pair<int, LaurentElement>> out;
    for (const auto& [mask, coeff] : x.terms()) {
        const auto& red = mod->reduce[mask];
        int idx = mod->index.at(red.target);
        LaurentElement val = coeff * red.factor;
        bool found = false;
        for (auto& [i, acc] : out)
            if (i == idx) {
                acc += val;
                found = true;
                break;
            }
        if (!found) out.push_back({idx, std::move(val)});
    }
    return out;
}

EndMorphism left_mult(const DiracPtr& mod, const CliffordElement& x) {
    EndMorphism r(mod, mod->rank());
    const ModelPtr& model = mod->model;
    for (int col = 0; col < mod->rank(); ++col) {
        auto one = LaurentElement::scalar(model, NovikovSeries::constant(Rat(1), model->denom));
        CliffordElement basis_word = CliffordElement::word(model, mod->basis[col], one);
        CliffordElement prod = cl_mul(x, basis_word);
        for (auto& [row, val] : module_reduce(mod, prod)) r.at(row, col) += val;
    }
    return r;
}

EndMorphism delta(const EndMorphism& phi) {
    if (phi.is_zero()) return EndMorphism::zero(phi.module());
    auto deg = phi.degree();
    if (!deg) throw std::invalid_argument("delta of a non-homogeneous morphism");
    const EndMorphism& d = phi.module()->d_op;
    EndMorphism r = d * phi;
    if (*deg % 2 == 0)
        r -= phi * d;
    else
        r += phi * d;
    return r;
}

EndMorphism h0_morphism(const DiracPtr& mod) {
    const ModelPtr& m = mod->model;
    if (!m->simplex) throw std::invalid_argument("h0 is defined for the simplex model");
    ZExp z;
    for (int j = 0; j < m->n; ++j) z[j] = 1;
    auto coeff = LaurentElement::monomial(
        m, z, NovikovSeries::monomial(Rat(-1), 0, -(m->denom / 2), m->denom));
    return left_mult(mod, CliffordElement::word(m, 1u, std::move(coeff)));
}

}  // namespace tmf
