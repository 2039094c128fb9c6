#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <vector>

#include "support.hpp"
#include "uiwd/diagnostics.hpp"
#include "uiwd/errors.hpp"

using namespace uiwd;

namespace {

std::vector<CurvePoint> curve_of(const std::vector<double>& consumption) {
    std::vector<CurvePoint> out;
    for (std::size_t k = 0; k < consumption.size(); ++k) {
        CurvePoint p;
        p.wealth = static_cast<double>(k);
        p.allocation = AllocationVector::uniform(static_cast<double>(k));
        p.allocation[FactorId::Consumption] = consumption[k];
        out.push_back(p);
    }
    return out;
}

AllocationPolicy curved_policy() {
    AllocationPolicy p;
    p.base_weights = {0.3, 0.1, 0.25, 0.05, 0.1, 0.2};
    return p;
}

struct Basis {
    AgentState state;
    PeriodContext ctx;
};

Basis basis() {
    const UnitPrices prices{{1.0, 1.5, 0.8, 1.2, 2.0, 3.0}};
    AgentState s = testing::closed_state(100.0, prices);
    s.prior_alloc = AllocationVector{{30, 5, 25, 4, 6, 7}};
    return {s, PeriodContext{prices, 100.0, {}}};
}

} // namespace

TEST_CASE("count_sign_changes") {
    CHECK(count_sign_changes(std::vector<double>{0, 1, 2, 3}) == 0);
    CHECK(count_sign_changes(std::vector<double>{0, 1, 0}) == 1);
    CHECK(count_sign_changes(std::vector<double>{0, 1, 1, 0, 1}) == 2);
    CHECK(count_sign_changes(std::vector<double>{5, 5, 5}) == 0);
}

TEST_CASE("probe_nonmonotonic") {
    const auto rising = probe_nonmonotonic(curve_of({1, 2, 3, 4}));
    CHECK_FALSE(rising.passed);
    CHECK(rising.evidence == 0.0);

    const auto peak = probe_nonmonotonic(curve_of({0, 1, 0}));
    CHECK(peak.passed);
    CHECK(peak.evidence == 1.0);
    REQUIRE(peak.witnesses.size() == 1);
    CHECK(peak.witnesses[0].inputs == std::vector<double>{0, 1, 0});
    CHECK(count_sign_changes(peak.witnesses[0].inputs) == peak.witnesses[0].value);

    std::vector<CurvePoint> flat(4);
    const auto constant = probe_nonmonotonic(flat);
    CHECK_FALSE(constant.passed);
    CHECK(constant.evidence == 0.0);

    CHECK_THROWS(probe_nonmonotonic(curve_of({1, 2})));
}

TEST_CASE("probe_nonmonotonic on a layoff inside the sweep") {
    const Basis b = basis();
    PeriodContext ctx = b.ctx;
    ctx.shocks.push_back({ShockKind::Layoff, std::nullopt, -0.4, 11});
    const auto curve = sweep_wealth(reference_rule(curved_policy()), b.state, ctx, 50.0, 150.0, 21);
    const auto report = probe_nonmonotonic(curve);
    CHECK(report.passed);
    CHECK(report.evidence >= 1.0);
    for (const auto& w : report.witnesses) {
        CHECK(static_cast<double>(count_sign_changes(w.inputs)) == w.value);
    }
}

TEST_CASE("probe_nonadditive") {
    const Basis b = basis();
    SUBCASE("linear rule is additive") {
        const auto r = probe_nonadditive(linear_rule(curved_policy().base_weights), b.state, b.ctx, 256, 1);
        CHECK_FALSE(r.passed);
        CHECK(r.evidence <= 1e-12);
    }
    SUBCASE("reference policy with curvature 2") {
        const auto rule = reference_rule(curved_policy());
        const auto r = probe_nonadditive(rule, b.state, b.ctx, 256, 1);
        CHECK(r.passed);
        CHECK(r.evidence > kNonAdditiveThreshold);
        REQUIRE(r.witnesses.size() == 1);
        const auto& w = r.witnesses[0];
        const double again = nonadditive_gap(rule, b.state, b.ctx, w.inputs[0], w.inputs[1]);
        CHECK(std::abs(again - r.evidence) <= 1e-12);
        CHECK(probe_nonadditive(rule, b.state, b.ctx, 256, 1) == r);
    }
    SUBCASE("curvature 1 collapses to linear shares") {
        AllocationPolicy p = curved_policy();
        p.curvature = {1, 1, 1, 1, 1, 1};
        const auto r = probe_nonadditive(reference_rule(p), b.state, b.ctx, 64, 3);
        CHECK(r.evidence <= 1e-12);
    }
    CHECK_THROWS_AS(probe_nonadditive(linear_rule(curved_policy().base_weights), b.state, b.ctx, 0, 1),
                    PreconditionError);
}

TEST_CASE("probe_recursive") {
    const Basis b = basis();
    AllocationPolicy p = curved_policy();

    const auto half = probe_recursive(p, b.state, b.ctx, 1.0);
    CHECK(half.passed);
    CHECK(half.evidence > 0.0);
    REQUIRE(half.witnesses.size() == kFactorCount);
    for (const auto& w : half.witnesses) {
        const auto f = static_cast<FactorId>(static_cast<int>(w.inputs[0]));
        CHECK(std::abs(recursive_response(reference_rule(p), b.state, b.ctx, f, w.inputs[1]) - w.value) <= 1e-12);
    }

    CHECK(probe_recursive(p, b.state, b.ctx, 0.0).evidence == 0.0);

    p.persistence = RecursionCoefficients::uniform(0.0);
    p.regret_weight = 0.7;
    const auto none = probe_recursive(p, b.state, b.ctx, 1.0);
    CHECK(none.evidence == 0.0);
    CHECK(none.passed);
}

TEST_CASE("probe export") {
    const std::vector<ProbeReport> reports{probe_nonmonotonic(curve_of({0, 1, 0}))};
    const auto j = nlohmann::json::parse(probes_to_json(reports));
    REQUIRE(j.is_array());
    CHECK(j[0]["name"] == "nonmonotonic");
    CHECK(j[0]["passed"] == true);
    CHECK(j[0]["evidence"] == 1.0);
    CHECK(j[0]["witnesses"][0]["inputs"].size() == 3);
    CHECK(j[0].contains("threshold"));
}
