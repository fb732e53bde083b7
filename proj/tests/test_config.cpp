#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "fedrmab/config.hpp"
#include "fedrmab/error.hpp"

using namespace fedrmab;

TEST_SUITE("config") {

TEST_CASE("minimal document takes defaults") {
    const auto c = ExperimentConfig::from_json_text(R"({"arms": [{"theta01": 0.2, "theta11": 0.8}, {"theta01": 0.5, "theta11": 0.5, "rate": 0.3}]})");
    CHECK(c.arms.size() == 2);
    CHECK(c.arms[0].rate == 1.0);
    CHECK(c.arms[1].rate == 0.3);
    CHECK(c.agents == 1);
    CHECK(c.k == 1);
    CHECK(c.episodes == 50);
    CHECK(c.policy == PolicyKind::FedTSWI);
    CHECK(c.prior.alpha == 1.0);
    CHECK(c.ucb.log_base == LogBase::Two);
    CHECK(c.ucb.clamp);
    CHECK_FALSE(c.rho_ref.has_value());
}

TEST_CASE("every key parses") {
    const auto c = ExperimentConfig::from_json_text(R"({
        "arms": [{"theta01": 0.2, "theta11": 0.8, "rate": 0.4}, {"theta01": 0.9, "theta11": 0.16, "rate": 0.6}],
        "agents": 3, "k": 1, "episodes": 12, "horizon": 400, "policy": "feducb-myopic",
        "known_dynamics": true, "prior": {"alpha": 2, "beta": 3}, "weights": [1, 0.5, 2],
        "ucb": {"log": "ln", "clamp": false}, "seed": 99, "trials": 7, "threads": 2,
        "rho_ref": 0.75, "rho_ref_slots": 5000})");
    CHECK(c.agents == 3);
    CHECK(c.horizon == 400);
    CHECK(c.policy == PolicyKind::FedUcbMyopic);
    CHECK(c.known_dynamics);
    CHECK(c.prior.beta == 3.0);
    CHECK(c.weights == std::vector<double>{1, 0.5, 2});
    CHECK(c.ucb.log_base == LogBase::Natural);
    CHECK_FALSE(c.ucb.clamp);
    CHECK(c.seed == 99);
    CHECK(c.trials == 7);
    CHECK(c.rho_ref == 0.75);
    CHECK(c.rho_ref_slots == 5000);
}

TEST_CASE("round trip through text") {
    auto c = builtin_instance();
    c.weights = {1, 2, 3, 4};
    c.rho_ref = 0.5;
    c.seed = 1234;
    const auto back = ExperimentConfig::from_json_text(c.to_json_text());
    CHECK(back.hash() == c.hash());
    CHECK(back.seed == 1234);
    CHECK(back.rho_ref == 0.5);
    CHECK(back.weights == c.weights);
}

TEST_CASE("invalid documents are config errors") {
    const char* bad[] = {
        "not json",
        "[1, 2]",
        R"({})",
        R"({"arms": []})",
        R"({"arms": [{"theta01": 0.2}]})",
        R"({"arms": [{"theta01": 1.2, "theta11": 0.5}]})",
        R"({"arms": [{"theta01": 0.2, "theta11": 0.5, "rate": 2}]})",
        R"({"arms": [{"theta01": 0.0, "theta11": 1.0}]})",
        R"({"arms": [{"theta01": 0.2, "theta11": 0.5}], "k": 2})",
        R"({"arms": [{"theta01": 0.2, "theta11": 0.5}], "k": 0})",
        R"({"arms": [{"theta01": 0.2, "theta11": 0.5}], "agents": 0})",
        R"({"arms": [{"theta01": 0.2, "theta11": 0.5}], "episodes": 0})",
        R"({"arms": [{"theta01": 0.2, "theta11": 0.5}], "trials": 0})",
        R"({"arms": [{"theta01": 0.2, "theta11": 0.5}], "policy": "optimal"})",
        R"({"arms": [{"theta01": 0.2, "theta11": 0.5}], "prior": {"alpha": 0}})",
        R"({"arms": [{"theta01": 0.2, "theta11": 0.5}], "agents": 2, "weights": [1]})",
        R"({"arms": [{"theta01": 0.2, "theta11": 0.5}], "weights": [0]})",
        R"({"arms": [{"theta01": 0.2, "theta11": 0.5}], "ucb": {"log": "log10"}})",
        R"({"arms": [{"theta01": 0.2, "theta11": 0.5}], "rho_ref": -1})",
        R"({"arms": [{"theta01": 0.2, "theta11": 0.5}], "agents": -3})",
        R"({"arms": [{"theta01": "x", "theta11": 0.5}]})",
    };
    for (const std::string text : bad) {
        CAPTURE(text);
        CHECK_THROWS_AS(ExperimentConfig::from_json_text(text), ConfigError);
    }
    CHECK_THROWS_AS(ExperimentConfig::from_file("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("file loading") {
    const std::string path = "fedrmab_test_config.json";
    {
        std::ofstream out(path);
        out << builtin_instance().to_json_text();
    }
    CHECK(ExperimentConfig::from_file(path).hash() == builtin_instance().hash());
    std::remove(path.c_str());
}

TEST_CASE("hash covers the definition only") {
    const auto base = builtin_instance();
    auto c = base;
    c.seed = 77;
    c.trials = 1000;
    c.threads = 8;
    CHECK(c.hash() == base.hash());
    c = base;
    c.k = 1;
    CHECK(c.hash() != base.hash());
    c = base;
    c.arms[2].rate = 0.71;
    CHECK(c.hash() != base.hash());
    c = base;
    c.policy = PolicyKind::FedUcbWi;
    CHECK(c.hash() != base.hash());
}

TEST_CASE("the four-arm instance") {
    const auto c = builtin_instance();
    c.validate();
    CHECK(c.arms.size() == 4);
    CHECK(c.agents == 4);
    CHECK(c.k == 2);
    CHECK(c.arms[1].dynamics == GilbertElliotDynamics{0.89, 0.17});
    CHECK(c.rates() == std::vector<double>{0.4, 0.9, 0.7, 0.6});
}

}
