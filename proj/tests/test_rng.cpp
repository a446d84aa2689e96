#include <catch2/catch_amalgamated.hpp>

#include "vcmsim/rng.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

using namespace vcmsim;

TEST_CASE("streams are bit-identical for identical (seed, id)", "[rng]") {
    StreamRng a(42, 7);
    StreamRng b(42, 7);
    for (int i = 0; i < 1000; ++i)
        REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("counter checkpoint replays the same tail", "[rng]") {
    StreamRng a(123, 99);
    for (int i = 0; i < 57; ++i)
        a.next_u64();
    const std::uint64_t saved = a.counter();
    std::vector<std::uint64_t> tail;
    for (int i = 0; i < 64; ++i)
        tail.push_back(a.next_u64());

    StreamRng restored(123, 99, saved);
    for (int i = 0; i < 64; ++i)
        REQUIRE(restored.next_u64() == tail[static_cast<std::size_t>(i)]);
}

TEST_CASE("distinct stream ids and seeds decorrelate", "[rng]") {
    // Adjacent ids and adjacent seeds must produce unrelated sequences.
    StreamRng a(42, 7), b(42, 8), c(43, 7);
    int equal_ab = 0, equal_ac = 0;
    double corr_ab = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double ua = a.uniform01();
        const double ub = b.uniform01();
        const double uc = c.uniform01();
        if (ua == ub) ++equal_ab;
        if (ua == uc) ++equal_ac;
        corr_ab += (ua - 0.5) * (ub - 0.5);
    }
    REQUIRE(equal_ab == 0);
    REQUIRE(equal_ac == 0);
    // Pearson numerator scaled: sd of the mean product is 1/12/sqrt(n).
    REQUIRE(std::abs(corr_ab / n) < 5.0 / 12.0 / std::sqrt(double(n)));
}

TEST_CASE("uniform01 moments and range", "[rng][statistics]") {
    StreamRng g(2024, 0);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = g.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    // 5-sigma bands: sd(mean) = sqrt(1/12/n) ~ 9.1e-4.
    REQUIRE(std::abs(mean - 0.5) < 5e-3);
    REQUIRE(std::abs(var - 1.0 / 12.0) < 5e-3);
}

TEST_CASE("uniform_sym covers (-1, 1] symmetrically", "[rng][statistics]") {
    StreamRng g(5, 17);
    const int n = 100000;
    double sum = 0.0;
    int negative = 0;
    for (int i = 0; i < n; ++i) {
        const double u = g.uniform_sym();
        REQUIRE(u > -1.0);
        REQUIRE(u <= 1.0);
        sum += u;
        if (u < 0.0) ++negative;
    }
    REQUIRE(std::abs(sum / n) < 1e-2);
    REQUIRE(std::abs(negative - n / 2) < 1000);
}

TEST_CASE("normal consumes exactly two ticks and has unit moments",
          "[rng][statistics]") {
    StreamRng g(77, 3);
    const std::uint64_t c0 = g.counter();
    (void)g.normal();
    REQUIRE(g.counter() == c0 + 2);

    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = g.normal();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    REQUIRE(std::abs(mean) < 0.016);      // 5 sigma of the mean estimator
    REQUIRE(std::abs(sd - 1.0) < 0.03);
}

TEST_CASE("bernoulli frequency tracks p", "[rng][statistics]") {
    StreamRng g(11, 42);
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; ++i)
        if (g.bernoulli(0.3)) ++hits;
    // sd = sqrt(0.3*0.7/n) ~ 1.45e-3
    REQUIRE(std::abs(hits / double(n) - 0.3) < 8e-3);
}
