#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace tmf {

using Rat = mpq_class;

inline Rat rat_of(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// mpq_class(a, b) does not canonicalize; every fraction built from variables
// must go through here before it is compared or mixed into arithmetic.
inline Rat rat_frac(long num, long den) { return rat_of(num, den); }

// Parses "p", "-p/q" etc. Throws on malformed input.
inline Rat rat_parse(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    Rat r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    r.canonicalize();
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline bool rat_is_int(const Rat& r) { return r.get_den() == 1; }

// Fits-in-long accessor for exponents and counters.
inline long rat_long(const Rat& r) {
    if (!rat_is_int(r) || !r.get_num().fits_slong_p())
        throw std::overflow_error("rational does not fit a machine integer: " + rat_str(r));
    return r.get_num().get_si();
}

inline Rat rat_factorial(long k) {
    mpz_class z;
    mpz_fac_ui(z.get_mpz_t(), static_cast<unsigned long>(k));
    return Rat(z);
}

// C(a, b) for integer a >= 0; zero outside the Pascal triangle.
inline Rat rat_binomial(long a, long b) {
    if (b < 0 || a < 0 || b > a) return Rat(0);
    mpz_class z;
    mpz_bin_uiui(z.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(b));
    return Rat(z);
}

// Extended rationals with +infinity, used for valuations.
struct ValOrInf {
    std::optional<Rat> v;  // nullopt = +infinity

    static ValOrInf infinity() { return ValOrInf{std::nullopt}; }
    static ValOrInf of(Rat r) { return ValOrInf{std::move(r)}; }
    bool is_inf() const { return !v.has_value(); }
    const Rat& value() const {
        if (!v) throw std::logic_error("valuation is infinite");
        return *v;
    }
    friend bool operator==(const ValOrInf& a, const ValOrInf& b) {
        if (a.is_inf() || b.is_inf()) return a.is_inf() && b.is_inf();
        return *a.v == *b.v;
    }
    friend bool operator<(const ValOrInf& a, const ValOrInf& b) {
        if (a.is_inf()) return false;
        if (b.is_inf()) return true;
        return *a.v < *b.v;
    }
    friend bool operator<=(const ValOrInf& a, const ValOrInf& b) { return a < b || a == b; }
    friend bool operator>=(const ValOrInf& a, const ValOrInf& b) { return b <= a; }
    friend bool operator>(const ValOrInf& a, const ValOrInf& b) { return b < a; }
    std::string str() const { return is_inf() ? "inf" : rat_str(*v); }
};

inline ValOrInf val_min(const ValOrInf& a, const ValOrInf& b) { return a < b ? a : b; }

inline ValOrInf val_add(const ValOrInf& a, const ValOrInf& b) {
    if (a.is_inf() || b.is_inf()) return ValOrInf::infinity();
    return ValOrInf::of(*a.v + *b.v);
}

}  // namespace tmf
