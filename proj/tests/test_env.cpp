#include <doctest.h>

#include <cmath>

#include "fedrmab/env.hpp"
#include "fedrmab/error.hpp"
#include "support.hpp"

using namespace fedrmab;

TEST_SUITE("env") {

TEST_CASE("the four-arm instance builds") {
    Environment env(testing::builtin_arms(), 2, 1);
    CHECK(env.arm_count() == 4);
    CHECK(env.slot() == 0);
    for (int s : env.true_states()) CHECK((s == 0 || s == 1));
}

TEST_CASE("absorbing good arm stays good and pays its rate") {
    Environment env({{{0.0, 1.0}, 0.9}}, 1, 3, FixedStart{{1}});
    const std::size_t sel[] = {0};
    for (int t = 0; t < 50; ++t) {
        const auto obs = env.step(sel);
        REQUIRE(obs.size() == 1);
        CHECK(obs[0].state == 1);
        CHECK(obs[0].reward == 0.9);
    }
    CHECK(env.slot() == 50);
}

TEST_CASE("bad state pays nothing") {
    Environment env({{{0.0, 0.5}, 0.7}}, 1, 3, FixedStart{{0}});
    const std::size_t sel[] = {0};
    const auto obs = env.step(sel);
    CHECK(obs[0].state == 0);
    CHECK(obs[0].reward == 0.0);
}

TEST_CASE("deterministic cycles alternate whatever is selected") {
    Environment env({{{1.0, 0.0}, 1.0}, {{1.0, 0.0}, 1.0}}, 1, 5, FixedStart{{0, 1}});
    for (int t = 0; t < 10; ++t) {
        const std::size_t pick = static_cast<std::size_t>(t % 3 == 0);
        const std::size_t sel[] = {pick};
        const int expect0 = t % 2, expect1 = 1 - t % 2;
        CHECK(env.true_states()[0] == expect0);
        CHECK(env.true_states()[1] == expect1);
        const auto obs = env.step(sel);
        CHECK(obs[0].state == (pick == 0 ? expect0 : expect1));
    }
}

TEST_CASE("observations report the state before the transition") {
    Environment env({{{1.0, 0.0}, 0.5}}, 1, 5, FixedStart{{1}});
    const std::size_t sel[] = {0};
    CHECK(env.step(sel)[0].state == 1);
    CHECK(env.true_states()[0] == 0);
}

TEST_CASE("selection validation") {
    Environment env(testing::builtin_arms(), 2, 1);
    const std::size_t one[] = {0};
    const std::size_t dup[] = {1, 1};
    const std::size_t oob[] = {0, 4};
    CHECK_THROWS_AS(env.step(one), InvalidArgument);
    CHECK_THROWS_AS(env.step(dup), InvalidArgument);
    CHECK_THROWS_AS(env.step(oob), InvalidArgument);
    CHECK(env.slot() == 0);
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(Environment({}, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(Environment({{{0.2, 0.8}, 1.5}}, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(Environment({{{0.2, 0.8}, -0.1}}, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(Environment({{{1.2, 0.8}, 0.5}}, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(Environment({{{0.2, 0.8}, 0.5}}, 2, 1), InvalidArgument);
    CHECK_THROWS_AS(Environment({{{0.2, 0.8}, 0.5}}, 1, 1, FixedStart{{2}}), InvalidArgument);
}

TEST_CASE("same seed gives identical observation sequences") {
    Environment a(testing::builtin_arms(), 2, 99), b(testing::builtin_arms(), 2, 99);
    testing::Gen g(1);
    for (int t = 0; t < 500; ++t) {
        std::size_t first = g.integer(0, 3), second = (first + 1 + g.integer(0, 2)) % 4;
        const std::size_t sel[] = {first, second};
        CHECK(a.step(sel) == b.step(sel));
    }
}

TEST_CASE("adding an arm leaves existing trajectories alone") {
    auto arms = testing::builtin_arms();
    Environment small({arms[0], arms[1]}, 1, 17);
    Environment big({arms[0], arms[1], arms[2]}, 1, 17);
    const std::size_t sel[] = {0};
    for (int t = 0; t < 300; ++t) {
        CHECK(small.true_states()[0] == big.true_states()[0]);
        CHECK(small.true_states()[1] == big.true_states()[1]);
        small.step(sel);
        big.step(sel);
    }
}

TEST_CASE("rewards stay in [0, rate] and are nonzero exactly in the good state") {
    Environment env(testing::builtin_arms(), 2, 4);
    const auto& arms = env.arms();
    for (int t = 0; t < 2000; ++t) {
        const std::size_t sel[] = {static_cast<std::size_t>(t % 4), static_cast<std::size_t>((t + 2) % 4)};
        for (const auto& o : env.step(sel)) {
            CHECK(o.reward >= 0.0);
            CHECK(o.reward <= arms[o.arm].rate);
            CHECK((o.reward != 0.0) == (o.state == 1));
        }
    }
}

TEST_CASE("unselected arms mix to the stationary frequency") {
    // Successive states are correlated, so the binomial variance is scaled by
    // the chain's integrated autocorrelation (1 + d) / (1 - d), d = theta11 - theta01.
    const auto arms = testing::builtin_arms();
    Environment env(arms, 1, 2024);
    const int slots = 100000;
    std::vector<int> ones(arms.size(), 0);
    const std::size_t sel[] = {0};
    for (int t = 0; t < slots; ++t) {
        for (std::size_t n = 0; n < arms.size(); ++n) ones[n] += env.true_states()[n];
        env.step(sel);
    }
    for (std::size_t n = 0; n < arms.size(); ++n) {
        const auto& d = arms[n].dynamics;
        const double b0 = d.theta01 / (d.theta01 + 1.0 - d.theta11);
        const double corr = d.theta11 - d.theta01;
        const double sd = std::sqrt(b0 * (1 - b0) / slots * (1 + corr) / (1 - corr));
        CAPTURE(n);
        CHECK(std::abs(ones[n] / double(slots) - b0) < 3.0 * sd);
    }
}

}
