#include <doctest.h>

#include <string>

#include "uiwd/config.hpp"
#include "uiwd/errors.hpp"

using namespace uiwd;

namespace {

std::string config_error(std::string_view text) {
    try {
        parse_experiment(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("minimal config fills documented defaults") {
    const ExperimentConfig c = parse_experiment(R"({"agents": 1, "periods": 1})");
    const ScenarioConfig& s = c.scenario;
    CHECK(s.n_agents == 1);
    CHECK(s.n_periods == 1);
    CHECK(s.seed == 0);
    CHECK(s.threads == 1);
    CHECK(s.policy == AllocationPolicy{});
    CHECK(s.wealth == WealthSpec{});
    CHECK(s.shocks.empty());
    for (const auto& p : s.prices) CHECK(p == PricePath{});
    CHECK(c.eis.folds == 4);
    CHECK(c.probes.samples == 256);
    CHECK_FALSE(c.defaulted.empty());
    bool seed_listed = false;
    for (const auto& d : c.defaulted) seed_listed = seed_listed || d.starts_with("seed");
    CHECK(seed_listed);
    CHECK(validate_config(s).empty());
}

TEST_CASE("full config round-trips every section") {
    const ExperimentConfig c = parse_experiment(R"({
        "agents": 4, "periods": 12, "seed": 9, "threads": 2,
        "policy": {"base_weights": [0.3, 0.1, 0.25, 0.05, 0.1, 0.2], "curvature": 3,
                   "persistence": {"a": 0.1, "b": 0.2, "d": 0.3, "e": 0.4, "j": 0.5, "k": 0.6},
                   "regret_weight": 0.4, "signed_allocations": true},
        "prices": {"c": 2.0, "h": {"kind": "drift", "start": 3.0, "drift": 0.01},
                   "i": {"kind": "series", "values": [1,1,1,1,1,1,1,1,1,1,1,2]}},
        "wealth": {"distribution": "lognormal", "mu": 6.5, "sigma": 0.3, "investable_share": 0.7,
                   "period_share": 0.2, "growth": 0.01, "credit_investment": true,
                   "investment_return": [0.02]},
        "shocks": [{"kind": "price_jump", "target": "Housing", "magnitude": 0.5, "period": 4},
                   {"kind": "layoff", "target": "wealth", "magnitude": -0.3, "period": 6}],
        "rates": {"relative_step": 1e-5, "scheme": "forward"},
        "eis": {"folds": 3},
        "probes": {"samples": 32, "perturbation": 2, "sweep_low": 0.25, "sweep_high": 2, "sweep_steps": 9},
        "savings": {"horizon": 20, "intervals": 200, "start": {"pv_savings": 0.1}, "end": {"pv_savings": 0.0}}
    })");
    const ScenarioConfig& s = c.scenario;
    CHECK(s.threads == 2);
    CHECK(s.policy.curvature[3] == 3.0);
    CHECK(s.policy.persistence.of(FactorId::Housing) == 0.6);
    CHECK(s.policy.persistence.of(FactorId::Investment) == 0.1);
    CHECK(s.policy.persistence.of(FactorId::Consumption) == 0.2);
    CHECK(s.policy.signed_allocations);
    CHECK(s.prices[0].at(5) == 2.0);
    CHECK(s.prices[5].at(3) == doctest::Approx(3.0 * 1.01 * 1.01));
    CHECK(s.prices[2].at(12) == 2.0);
    CHECK(s.wealth.distribution == WealthSpec::Distribution::Lognormal);
    REQUIRE(s.shocks.size() == 2);
    CHECK(s.shocks[0].target == FactorId::Housing);
    CHECK_FALSE(s.shocks[1].target.has_value());
    CHECK(s.bump.scheme == BumpScheme::Forward);
    CHECK(c.eis.folds == 3);
    CHECK(c.probes.sweep_steps == 9);
    CHECK(c.savings.path().samples().size() == 201);
    bool prices_t_listed = false;
    for (const auto& d : c.defaulted) {
        CAPTURE(d);
        CHECK_FALSE(d.starts_with("policy."));
        CHECK_FALSE(d.starts_with("wealth."));
        CHECK_FALSE(d.starts_with("probes."));
        CHECK_FALSE(d.starts_with("savings.start.pv_savings"));
        prices_t_listed = prices_t_listed || d.starts_with("prices.t");
    }
    CHECK(prices_t_listed);
}

TEST_CASE("strict keys and validation messages") {
    const std::string unknown = config_error(R"({"agnts": 1})");
    CHECK(unknown.find("agnts") != std::string::npos);

    const std::string nested = config_error(R"({"policy": {"curvatur": 2}})");
    CHECK(nested.find("policy.curvatur") != std::string::npos);

    const std::string shock = config_error(
        R"({"agents": 1, "periods": 2, "shocks": [{"kind": "income_loss", "magnitude": -1.5, "period": 1}]})");
    CHECK(shock.find("magnitude > -1") != std::string::npos);
    CHECK(shock.find("shocks[0].magnitude") != std::string::npos);

    CHECK(config_error("{\n  \"agents\": 1,\n  \"periods\": \n}").find("line 4") != std::string::npos);
    CHECK(config_error(R"({"agents": "two"})").find("agents") != std::string::npos);
    CHECK(config_error(R"({"agents": 0})").find("agents") != std::string::npos);
    CHECK_FALSE(config_error(R"({"shocks": [{"kind": "meteor", "magnitude": 0.1, "period": 1}]})").empty());
    CHECK_FALSE(config_error(R"({"prices": {"c": [1, 2]}})").empty());
    CHECK_FALSE(config_error(R"({"eis": {"folds": 1}})").empty());
    CHECK_FALSE(config_error(R"({"policy": {"persistence": {"c": 0.1}}})").empty());
    CHECK_FALSE(config_error(R"({"periods": 3, "wealth": {"investment_return": [0.1, 0.2]}})").empty());
}

TEST_CASE("shipped fixtures parse") {
    for (const char* name : {"minimal.json", "shock_sweep.json", "eis_demo.json"}) {
        CAPTURE(name);
        CHECK_NOTHROW(load_experiment(std::string(UIWD_FIXTURES) + "/" + name));
    }
    CHECK_THROWS_AS(load_config(std::string(UIWD_FIXTURES) + "/missing.json"), ConfigError);
}
