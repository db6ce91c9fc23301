#include <tmf/novikov.hpp>

#include <algorithm>
#include <sstream>

namespace tmf {

namespace {

bool key_less(const NovikovSeries& s, const NovTermKey& a, const NovTermKey& b) {
    int64_t wa = s.weight_num(a), wb = s.weight_num(b);
    if (wa != wb) return wa < wb;
    return a.s_exp < b.s_exp;
}

}  // namespace

NovikovSeries NovikovSeries::constant(Rat q, int32_t denom, int64_t cutoff_num) {
    return monomial(std::move(q), 0, 0, denom, cutoff_num);
}

NovikovSeries NovikovSeries::monomial(Rat q, int32_t s_exp, int64_t t_num, int32_t denom,
                                      int64_t cutoff_num) {
    if (s_exp < 0) throw std::invalid_argument("negative s exponent");
    NovikovSeries r(denom, cutoff_num);
    r.add_term({s_exp, t_num}, q);
    return r;
}

NovikovSeries NovikovSeries::exp_s(const Rat& coeff, int32_t denom, int64_t cutoff_num) {
    NovikovSeries r(denom, cutoff_num);
    Rat acc(1);
    for (int32_t k = 0;; ++k) {
        NovTermKey key{k, 0};
        if (!r.keeps(key)) break;
        r.add_term(key, acc);
        acc *= coeff;
        acc /= (k + 1);
    }
    return r;
}

void NovikovSeries::add_term(const NovTermKey& k, const Rat& q) {
    if (q == 0 || !keeps(k)) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                               [this](const auto& a, const NovTermKey& b) {
                                   return key_less(*this, a.first, b);
                               });
    if (it != terms_.end() && it->first == k) {
        it->second += q;
        if (it->second == 0) terms_.erase(it);
    } else {
        terms_.insert(it, {k, q});
    }
}

void NovikovSeries::check_compatible(const NovikovSeries& o) const {
    if (denom_ != o.denom_) throw std::invalid_argument("value-group denominator mismatch");
    if (cutoff_num_ != o.cutoff_num_) throw std::invalid_argument("cutoff mismatch");
}

ValOrInf NovikovSeries::valuation() const {
    if (terms_.empty()) return ValOrInf::infinity();
    return ValOrInf::of(rat_frac(weight_num(terms_.front().first), denom_));
}

Rat NovikovSeries::coeff(int32_t s_exp, const Rat& t_exp) const {
    Rat tn = t_exp * denom_;
    if (!rat_is_int(tn)) return Rat(0);
    NovTermKey k{s_exp, rat_long(tn)};
    for (const auto& [key, q] : terms_)
        if (key == k) return q;
    return Rat(0);
}

NovikovSeries& NovikovSeries::operator+=(const NovikovSeries& o) {
    check_compatible(o);
    std::vector<std::pair<NovTermKey, Rat>> merged;
    merged.reserve(terms_.size() + o.terms_.size());
    size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
        if (j == o.terms_.size() ||
            (i < terms_.size() && key_less(*this, terms_[i].first, o.terms_[j].first))) {
            merged.push_back(terms_[i++]);
        } else if (i == terms_.size() || key_less(*this, o.terms_[j].first, terms_[i].first)) {
            merged.push_back(o.terms_[j++]);
        } else {
            Rat q = terms_[i].second + o.terms_[j].second;
            if (q != 0) merged.push_back({terms_[i].first, std::move(q)});
            ++i, ++j;
        }
    }
    terms_ = std::move(merged);
    return *this;
}

NovikovSeries& NovikovSeries::operator-=(const NovikovSeries& o) { return *this += -o; }

NovikovSeries NovikovSeries::operator-() const {
    NovikovSeries r(*this);
    for (auto& [k, q] : r.terms_) q = -q;
    return r;
}

NovikovSeries NovikovSeries::scaled(const Rat& q) const {
    if (q == 0) return NovikovSeries(denom_, cutoff_num_);
    NovikovSeries r(*this);
    for (auto& [k, c] : r.terms_) c *= q;
    return r;
}

NovikovSeries operator*(const NovikovSeries& a, const NovikovSeries& b) {
    a.check_compatible(b);
    NovikovSeries r(a.denom_, a.cutoff_num_);
    std::map<std::pair<int64_t, int32_t>, Rat> acc;  // (weight, s) -> q
    for (const auto& [ka, qa] : a.terms_) {
        int64_t wa = a.weight_num(ka);
        for (const auto& [kb, qb] : b.terms_) {
            NovTermKey k{ka.s_exp + kb.s_exp, ka.t_num + kb.t_num};
            if (!r.keeps(k)) continue;
            acc[{wa + a.weight_num(kb), k.s_exp}] += qa * qb;
        }
    }
    for (const auto& [wk, q] : acc) {
        if (q == 0) continue;
        NovTermKey k{wk.second, wk.first - static_cast<int64_t>(wk.second) * a.denom_};
        r.terms_.push_back({k, q});
    }
    return r;
}

bool operator==(const NovikovSeries& a, const NovikovSeries& b) {
    if (a.denom_ != b.denom_) return false;
    if (a.terms_.size() != b.terms_.size()) return false;
    for (size_t i = 0; i < a.terms_.size(); ++i)
        if (!(a.terms_[i].first == b.terms_[i].first && a.terms_[i].second == b.terms_[i].second))
            return false;
    return true;
}

NovikovSeries NovikovSeries::truncate(int64_t cutoff_num) const {
    NovikovSeries r(denom_, cutoff_num);
    for (const auto& [k, q] : terms_)
        if (r.keeps(k)) r.terms_.push_back({k, q});
    return r;
}

NovikovSeries NovikovSeries::slice(int64_t lo_num, int64_t hi_num) const {
    NovikovSeries r(denom_, cutoff_num_);
    for (const auto& [k, q] : terms_) {
        int64_t w = weight_num(k);
        if (w > lo_num && w <= hi_num) r.terms_.push_back({k, q});
    }
    return r;
}

std::optional<long> NovikovSeries::degree(int n) const {
    if (terms_.empty()) return std::nullopt;
    if ((2 * (n + 1)) % denom_ != 0) throw std::logic_error("denominator incompatible with grading");
    long t_unit = 2 * (n + 1) / denom_;
    std::optional<long> deg;
    for (const auto& [k, q] : terms_) {
        long d = static_cast<long>(k.s_exp) * (1 - n) + k.t_num * t_unit;
        if (deg && *deg != d) return std::nullopt;
        deg = d;
    }
    return deg;
}

int64_t cutoff_mod_f(const Rat& e, int32_t denom) {
    Rat scaled = e * denom;
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), scaled.get_num().get_mpz_t(), scaled.get_den().get_mpz_t());
    if (!fl.fits_slong_p()) throw std::overflow_error("cutoff too large");
    return fl.get_si() + 1;
}

namespace {

std::string t_exp_str(int64_t t_num, int32_t denom) {
    Rat t(t_num, denom);
    t.canonicalize();
    if (rat_is_int(t)) return t.get_str();
    return "(" + t.get_str() + ")";
}

}  // namespace

std::string NovikovSeries::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, q] : terms_) {
        Rat aq = abs(q);
        if (first) {
            if (q < 0) os << "-";
            first = false;
        } else {
            os << (q < 0 ? " - " : " + ");
        }
        std::vector<std::string> factors;
        if (aq != 1 || (k.s_exp == 0 && k.t_num == 0)) factors.push_back(aq.get_str());
        if (k.s_exp == 1) factors.push_back("s");
        else if (k.s_exp > 1) factors.push_back("s^" + std::to_string(k.s_exp));
        if (k.t_num != 0) {
            Rat t(k.t_num, denom_);
            t.canonicalize();
            if (t == 1) factors.push_back("T");
            else factors.push_back("T^" + t_exp_str(k.t_num, denom_));
        }
        for (size_t i = 0; i < factors.size(); ++i) {
            if (i) os << " * ";
            os << factors[i];
        }
    }
    return os.str();
}

size_t NovikovSeries::hash() const {
    size_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(static_cast<uint64_t>(denom_));
    for (const auto& [k, q] : terms_) {
        mix(static_cast<uint64_t>(k.s_exp));
        mix(static_cast<uint64_t>(k.t_num));
        mix(std::hash<std::string>{}(q.get_str()));
    }
    return h;
}

NovikovSeries series_parse(const std::string& text, int32_t denom, int64_t cutoff_num) {
    NovikovSeries r(denom, cutoff_num);
    // Split into signed terms at top-level +/-.
    std::vector<std::pair<int, std::string>> parts;
    std::string cur;
    int sign = 1, depth = 0;
    auto flush = [&]() {
        std::string t;
        for (char c : cur)
            if (!isspace(static_cast<unsigned char>(c))) t += c;
        if (!t.empty()) parts.push_back({sign, t});
        cur.clear();
    };
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (depth == 0 && (c == '+' || c == '-')) {
            bool is_sign = cur.empty() ||
                           std::all_of(cur.begin(), cur.end(),
                                       [](char x) { return isspace(static_cast<unsigned char>(x)); });
            if (!is_sign) {
                flush();
                sign = (c == '-') ? -1 : 1;
                continue;
            }
            if (c == '-') sign = -sign;
            continue;
        }
        cur += c;
    }
    flush();
    for (auto& [sg, term] : parts) {
        if (term == "0") continue;
        Rat q(sg);
        int32_t s_exp = 0;
        Rat t_exp(0);
        size_t pos = 0;
        while (pos < term.size()) {
            size_t star = term.find('*', pos);
            std::string f = term.substr(pos, star == std::string::npos ? star : star - pos);
            pos = star == std::string::npos ? term.size() : star + 1;
            if (f.empty()) continue;
            if (f[0] == 's') {
                s_exp += (f.size() > 2 && f[1] == '^') ? std::stol(f.substr(2)) : 1;
            } else if (f[0] == 'T') {
                std::string e = "1";
                if (f.size() > 2 && f[1] == '^') {
                    e = f.substr(2);
                    if (!e.empty() && e.front() == '(' && e.back() == ')')
                        e = e.substr(1, e.size() - 2);
                }
                t_exp += rat_parse(e);
            } else {
                q *= rat_parse(f);
            }
        }
        Rat tn = t_exp * denom;
        if (!rat_is_int(tn))
            throw std::invalid_argument("T exponent outside the value group: " + term);
        r.add_term({s_exp, rat_long(tn)}, q);
    }
    return r;
}

std::vector<Invariant> extract_invariants(const NovikovSeries& c, int n) {
    if (!c.is_zero() && c.degree(n) != std::optional<long>(2))
        throw std::invalid_argument("potential is not homogeneous of degree 2");
    std::vector<Invariant> table;
    for (const auto& [k, q] : c.terms()) {
        Invariant inv;
        inv.d = rat_frac(k.t_num, c.denom());
        inv.k = k.s_exp + 1;
        inv.value = q * rat_factorial(k.s_exp);
        table.push_back(std::move(inv));
    }
    std::sort(table.begin(), table.end(), [](const Invariant& a, const Invariant& b) {
        if (a.d != b.d) return a.d < b.d;
        return a.k < b.k;
    });
    return table;
}

NovikovSeries invariants_to_series(const std::vector<Invariant>& table, int32_t denom,
                                   int64_t cutoff_num) {
    NovikovSeries c(denom, cutoff_num);
    for (const auto& inv : table) {
        Rat tn = inv.d * denom;
        if (!rat_is_int(tn)) throw std::invalid_argument("invariant degree outside value group");
        c.add_term({static_cast<int32_t>(inv.k - 1), rat_long(tn)},
                   inv.value / rat_factorial(inv.k - 1));
    }
    return c;
}

}  // namespace tmf
