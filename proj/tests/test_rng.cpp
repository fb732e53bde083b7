#include <doctest.h>

#include <cmath>
#include <set>

#include "fedrmab/rng.hpp"

using namespace fedrmab;

TEST_SUITE("rng") {

TEST_CASE("same seed gives the same stream") {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        differs |= x != c.next();
    }
    CHECK(differs);
}

TEST_CASE("uniform stays in [0, 1) and has the right mean") {
    Rng r(7);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // sd of the mean is sqrt(1/12 / n) ~ 6.5e-4
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.003));
}

TEST_CASE("below is unbiased over a small range") {
    Rng r(9);
    int hist[5] = {};
    for (int i = 0; i < 50000; ++i) ++hist[r.below(5)];
    for (int h : hist) CHECK(std::abs(h - 10000) < 450);  // ~5 sd
}

TEST_CASE("normal moments") {
    Rng r(11);
    double s = 0, s2 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        s += x;
        s2 += x * x;
    }
    CHECK(std::abs(s / n) < 0.015);
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma and beta moments") {
    Rng r(13);
    for (double shape : {0.3, 1.0, 2.5, 40.0}) {
        CAPTURE(shape);
        double s = 0;
        const int n = 60000;
        for (int i = 0; i < n; ++i) s += r.gamma(shape);
        // sd of the mean = sqrt(shape / n)
        CHECK(std::abs(s / n - shape) < 5.0 * std::sqrt(shape / n));
    }
    for (auto [a, b] : {std::pair{1.0, 1.0}, {4.0, 2.0}, {0.5, 0.5}, {800.0, 200.0}}) {
        CAPTURE(a);
        CAPTURE(b);
        double s = 0, s2 = 0;
        const int n = 60000;
        for (int i = 0; i < n; ++i) {
            const double x = r.beta(a, b);
            REQUIRE(x >= 0.0);
            REQUIRE(x <= 1.0);
            s += x;
            s2 += x * x;
        }
        const double mean = a / (a + b);
        const double var = a * b / ((a + b) * (a + b) * (a + b + 1));
        CHECK(std::abs(s / n - mean) < 5.0 * std::sqrt(var / n));
        CHECK(s2 / n - (s / n) * (s / n) == doctest::Approx(var).epsilon(0.05));
    }
}

TEST_CASE("derived seeds are distinct and stable") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(1, i));
    CHECK(seen.size() == 1000);
    CHECK(derive_seed(5, "env") == derive_seed(5, "env"));
    CHECK(derive_seed(5, "env") != derive_seed(5, "policy"));
    CHECK(derive_seed(5, 0) != derive_seed(6, 0));
}

}
