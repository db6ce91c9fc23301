#pragma once

#include <tmf/rational.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace tmf {

// One monomial q * s^a * T^(t_num/denom) of the truncated Novikov ring R^s.
// The T-exponent lives in the model's value group (1/denom)Z; the combined
// weight nu(s^a T^b) = a + b is tracked as the integer a*denom + t_num.
struct NovTermKey {
    int32_t s_exp = 0;
    int64_t t_num = 0;

    friend bool operator==(const NovTermKey&, const NovTermKey&) = default;
};

inline constexpr int64_t kNoCutoff = std::numeric_limits<int64_t>::max();

class NovikovSeries {
  public:
    NovikovSeries() = default;
    NovikovSeries(int32_t denom, int64_t cutoff_num) : denom_(denom), cutoff_num_(cutoff_num) {}

    static NovikovSeries zero(int32_t denom, int64_t cutoff_num = kNoCutoff) {
        return NovikovSeries(denom, cutoff_num);
    }
    static NovikovSeries constant(Rat q, int32_t denom, int64_t cutoff_num = kNoCutoff);
    // q * s^a * T^(t_num/denom)
    static NovikovSeries monomial(Rat q, int32_t s_exp, int64_t t_num, int32_t denom,
                                  int64_t cutoff_num = kNoCutoff);
    // Truncation of sum_k (coeff*s)^k / k!.
    static NovikovSeries exp_s(const Rat& coeff, int32_t denom, int64_t cutoff_num);

    int32_t denom() const { return denom_; }
    int64_t cutoff_num() const { return cutoff_num_; }
    bool truncated() const { return cutoff_num_ != kNoCutoff; }
    const std::vector<std::pair<NovTermKey, Rat>>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int64_t weight_num(const NovTermKey& k) const {
        return static_cast<int64_t>(k.s_exp) * denom_ + k.t_num;
    }

    // min over terms of s + t; infinity for 0.
    ValOrInf valuation() const;

    Rat coeff(int32_t s_exp, const Rat& t_exp) const;

    void add_term(const NovTermKey& k, const Rat& q);  // accumulates, keeps canonical form
    NovikovSeries& operator+=(const NovikovSeries& o);
    NovikovSeries& operator-=(const NovikovSeries& o);
    friend NovikovSeries operator+(NovikovSeries a, const NovikovSeries& b) { return a += b; }
    friend NovikovSeries operator-(NovikovSeries a, const NovikovSeries& b) { return a -= b; }
    friend NovikovSeries operator*(const NovikovSeries& a, const NovikovSeries& b);
    NovikovSeries operator-() const;
    NovikovSeries scaled(const Rat& q) const;
    friend bool operator==(const NovikovSeries& a, const NovikovSeries& b);

    // Re-truncates to a new exclusive weight bound.
    NovikovSeries truncate(int64_t cutoff_num) const;
    // Keeps only terms with weight in (lo, hi], numerators over denom.
    NovikovSeries slice(int64_t lo_num, int64_t hi_num) const;

    // a*(1-n) + 2*(n+1)*t; requires denom | 2(n+1).
    std::optional<long> degree(int n) const;  // nullopt if non-homogeneous or zero

    std::string str() const;
    size_t hash() const;

  private:
    void check_compatible(const NovikovSeries& o) const;
    bool keeps(const NovTermKey& k) const {
        return cutoff_num_ == kNoCutoff || weight_num(k) < cutoff_num_;
    }

    int32_t denom_ = 1;
    int64_t cutoff_num_ = kNoCutoff;
    // Sorted by (weight, s_exp); no zero coefficients, s_exp >= 0.
    std::vector<std::pair<NovTermKey, Rat>> terms_;
};

// Exclusive integer bound so that "mod F^E" keeps weights <= E.
int64_t cutoff_mod_f(const Rat& e, int32_t denom);

// Canonical text form "q * s^a * T^(p/q) + ...". Parses the same format.
NovikovSeries series_parse(const std::string& text, int32_t denom,
                           int64_t cutoff_num = kNoCutoff);

struct Invariant {
    Rat d;        // T-degree
    long k;       // the invariant N_{d,k}; second index (k-1 is the s-power)
    Rat value;
};

// Reads N_{d,k+1} = k! * [s^k T^d] c.  Requires c homogeneous of degree 2.
std::vector<Invariant> extract_invariants(const NovikovSeries& c, int n);

// Inverse of extract_invariants, for round-trip checks.
NovikovSeries invariants_to_series(const std::vector<Invariant>& table, int32_t denom,
                                   int64_t cutoff_num);

}  // namespace tmf
