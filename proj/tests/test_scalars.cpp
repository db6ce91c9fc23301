#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <tmf/novikov.hpp>

#include <random>

using namespace tmf;

namespace {

NovikovSeries random_series(std::mt19937_64& rng, int32_t denom, int64_t cutoff) {
    std::uniform_int_distribution<int> nterms(0, 5), sdist(0, 4), tdist(-4, 8),
        qdist(-9, 9);
    NovikovSeries r(denom, cutoff);
    for (int i = 0, n = nterms(rng); i < n; ++i) {
        int q = qdist(rng);
        if (q == 0) q = 1;
        r.add_term({sdist(rng), tdist(rng)}, rat_of(q, 1 + sdist(rng)));
    }
    return r;
}

}  // namespace

TEST_CASE("additive inverse and simple sums") {
    const int32_t den = 2;
    auto sT = NovikovSeries::monomial(Rat(1), 1, 1, den);  // s T^(1/2)
    CHECK((sT + (-sT)).is_zero());
    auto a = NovikovSeries::monomial(Rat(2), 0, 1, den);
    auto b = NovikovSeries::monomial(Rat(3), 0, 1, den);
    CHECK((a + b) == NovikovSeries::monomial(Rat(5), 0, 1, den));
}

TEST_CASE("exp series truncation: e^s + e^-s") {
    const int32_t den = 2;
    int64_t cutoff = cutoff_mod_f(Rat(4), den);
    auto sum = NovikovSeries::exp_s(Rat(1), den, cutoff) + NovikovSeries::exp_s(Rat(-1), den, cutoff);
    // oracle: sum_k (1 + (-1)^k) s^k / k! for k <= 4
    NovikovSeries expect(den, cutoff);
    expect.add_term({0, 0}, Rat(2));
    expect.add_term({2, 0}, Rat(1));
    expect.add_term({4, 0}, rat_of(2, 24));
    CHECK(sum == expect);
    CHECK(sum.str() == "2 + s^2 + 1/12 * s^4");
}

TEST_CASE("products") {
    const int32_t den = 2;
    auto t_half = NovikovSeries::monomial(Rat(1), 0, 1, den);
    CHECK((t_half * t_half) == NovikovSeries::monomial(Rat(1), 0, 2, den));
    auto s = NovikovSeries::monomial(Rat(1), 1, 0, den);
    CHECK((s * s) == NovikovSeries::monomial(Rat(1), 2, 0, den));

    int64_t cutoff = cutoff_mod_f(Rat(3), den);
    auto es = NovikovSeries::exp_s(Rat(1), den, cutoff);
    auto ems = NovikovSeries::exp_s(Rat(-1), den, cutoff);
    auto lhs = (es - ems) * t_half.truncate(cutoff);
    NovikovSeries expect(den, cutoff);
    expect.add_term({1, 1}, Rat(2));
    // s^3 T^(1/2) has weight 3.5 > 3: dropped by the cutoff
    CHECK(lhs == expect);

    int64_t cutoff2 = cutoff_mod_f(Rat(4), den);
    auto lhs2 = (NovikovSeries::exp_s(Rat(1), den, cutoff2) -
                 NovikovSeries::exp_s(Rat(-1), den, cutoff2)) *
                t_half.truncate(cutoff2);
    NovikovSeries expect2(den, cutoff2);
    expect2.add_term({1, 1}, Rat(2));
    expect2.add_term({3, 1}, Rat(1, 3));
    CHECK(lhs2 == expect2);
}

TEST_CASE("cutoff mismatch is an error") {
    const int32_t den = 2;
    auto a = NovikovSeries::constant(Rat(1), den, cutoff_mod_f(Rat(3), den));
    auto b = NovikovSeries::constant(Rat(1), den, cutoff_mod_f(Rat(4), den));
    CHECK_THROWS_AS(a + b, std::invalid_argument);
    CHECK_THROWS_AS(a * b, std::invalid_argument);
}

TEST_CASE("valuation") {
    const int32_t den = 2;
    auto sT = NovikovSeries::monomial(Rat(1), 1, 1, den);
    CHECK(sT.valuation() == ValOrInf::of(Rat(3, 2)));
    CHECK(NovikovSeries::zero(den).valuation().is_inf());
    // c_(7) of the 3-simplex run has valuation 3/2 (denominator 4 there)
    NovikovSeries c(4, kNoCutoff);
    c.add_term({1, 2}, Rat(-2));
    c.add_term({5, 6}, Rat(1, 60));
    CHECK(c.valuation() == ValOrInf::of(Rat(3, 2)));
}

TEST_CASE("valuation properties on random series") {
    std::mt19937_64 rng(20240811);
    const int32_t den = 4;
    const int64_t cutoff = kNoCutoff;
    for (int it = 0; it < 200; ++it) {
        auto a = random_series(rng, den, cutoff);
        auto b = random_series(rng, den, cutoff);
        auto va = a.valuation(), vb = b.valuation();
        CHECK((a + b).valuation() >= val_min(va, vb));
        CHECK((a * b).valuation() == val_add(va, vb));
    }
}

// Truncation is a ring congruence on the nonnegative part F^{>=0}; random
// triples are drawn there.
TEST_CASE("ring axioms modulo cutoff") {
    std::mt19937_64 rng(7);
    const int32_t den = 4;
    const int64_t cutoff = cutoff_mod_f(Rat(6), den);
    auto nonneg = [&](NovikovSeries s) {
        NovikovSeries r(den, cutoff);
        for (const auto& [k, q] : s.terms())
            if (s.weight_num(k) >= 0) r.add_term(k, q);
        return r;
    };
    for (int it = 0; it < 100; ++it) {
        auto a = nonneg(random_series(rng, den, cutoff));
        auto b = nonneg(random_series(rng, den, cutoff));
        auto c = nonneg(random_series(rng, den, cutoff));
        CHECK((a * b) == (b * a));
        CHECK(((a * b) * c) == (a * (b * c)));
        CHECK((a * (b + c)) == (a * b + a * c));
    }
}

TEST_CASE("invariant extraction") {
    // c = (e^s - e^-s) T^(1/2) restricted to even degree: N_{1/2,k} = 2 for even k
    const int n = 1;
    const int32_t den = 2;
    int64_t cutoff = cutoff_mod_f(Rat(7), den);
    auto c = (NovikovSeries::exp_s(Rat(1), den, cutoff) - NovikovSeries::exp_s(Rat(-1), den, cutoff)) *
             NovikovSeries::monomial(Rat(1), 0, 1, den).truncate(cutoff);
    auto table = extract_invariants(c, n);
    REQUIRE(table.size() == 3);
    for (const auto& inv : table) {
        CHECK(inv.d == Rat(1, 2));
        CHECK(inv.k % 2 == 0);
        CHECK(inv.value == Rat(2));
    }

    CHECK(extract_invariants(NovikovSeries::zero(den), n).empty());

    // c_(7) regression: N_{1/2,2} = -2, N_{3/2,6} = 2
    NovikovSeries c7(4, kNoCutoff);
    c7.add_term({1, 2}, Rat(-2));
    c7.add_term({5, 6}, Rat(1, 60));
    auto t7 = extract_invariants(c7, 3);
    REQUIRE(t7.size() == 2);
    CHECK(t7[0].d == Rat(1, 2));
    CHECK(t7[0].k == 2);
    CHECK(t7[0].value == Rat(-2));
    CHECK(t7[1].d == Rat(3, 2));
    CHECK(t7[1].k == 6);
    CHECK(t7[1].value == Rat(2));
}

TEST_CASE("extract then rebuild is the identity") {
    std::mt19937_64 rng(99);
    const int n = 3;
    const int32_t den = 4;
    for (int it = 0; it < 50; ++it) {
        // random degree-2 series: pick k, then T-power from the degree relation
        NovikovSeries c(den, kNoCutoff);
        std::uniform_int_distribution<int> kd(0, 6), qd(-5, 5);
        for (int i = 0; i < 4; ++i) {
            int k = kd(rng);
            long num = 2 - static_cast<long>(k) * (1 - n);
            if (num % 2 != 0) continue;
            int q = qd(rng);
            if (q == 0) continue;
            c.add_term({k, num / 2}, Rat(q));
        }
        auto rebuilt = invariants_to_series(extract_invariants(c, n), den, kNoCutoff);
        CHECK(rebuilt == c);
    }
}

TEST_CASE("series text round trip") {
    NovikovSeries c(4, kNoCutoff);
    c.add_term({1, 2}, Rat(-2));
    c.add_term({5, 6}, Rat(1, 60));
    CHECK(c.str() == "-2 * s * T^(1/2) + 1/60 * s^5 * T^(3/2)");
    CHECK(series_parse(c.str(), 4) == c);
    CHECK(series_parse("0", 4).is_zero());
    CHECK(series_parse("s", 4) == NovikovSeries::monomial(Rat(1), 1, 0, 4));
    CHECK(series_parse("3/2 * T^2", 4) == NovikovSeries::monomial(Rat(3, 2), 0, 8, 4));
}
