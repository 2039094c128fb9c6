#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "uiwd/allocation.hpp"
#include "uiwd/errors.hpp"

using namespace uiwd;

namespace {

AllocationPolicy memoryless() {
    AllocationPolicy p;
    p.persistence = RecursionCoefficients::uniform(0.0);
    return p;
}

AgentState genesis(double period_wealth, double total) {
    AgentState s;
    s.wealth = {total, total, period_wealth};
    return s;
}

} // namespace

TEST_CASE("allocation_cost") {
    const UnitPrices ones;
    CHECK(allocation_cost(AllocationVector::uniform(10.0), ones) == 60.0);
    CHECK(allocation_cost(AllocationVector{}, UnitPrices{{3, 1, 4, 1, 5, 9}}) == 0.0);

    // Six terms by hand: 2*1 + (-1)*2 + 3*1 + 0*1 + 1*4 + 1*3.
    const AllocationVector q{{2, -1, 3, 0, 1, 1}};
    const UnitPrices p{{1, 2, 1, 1, 4, 3}};
    const double by_hand = 2.0 - 2.0 + 3.0 + 0.0 + 4.0 + 3.0;
    CHECK(allocation_cost(q, p) == by_hand);
    CHECK(by_hand == 10.0);
}

TEST_CASE("budget_residual") {
    AllocationVector others = AllocationVector::uniform(10.0);
    others[FactorId::Consumption] = 0.0;

    CHECK(budget_residual(FactorId::Consumption, 100.0, UnitPrices{}, others) == 50.0);

    UnitPrices p;
    p[FactorId::Consumption] = 2.0;
    const double v = budget_residual(FactorId::Consumption, 100.0, p, others);
    CHECK(v == 25.0);
    AllocationVector closed = others;
    closed[FactorId::Consumption] = v;
    CHECK(allocation_cost(closed, p) == 100.0);

    CHECK(budget_residual(FactorId::Housing, 0.0, UnitPrices{}, AllocationVector{}) == 0.0);

    p[FactorId::Housing] = 0.0;
    CHECK_THROWS_AS(budget_residual(FactorId::Housing, 10.0, p, others), DegenerateBudgetError);
}

TEST_CASE("apply_policy") {
    SUBCASE("uniform memoryless policy splits evenly") {
        const PeriodContext ctx{UnitPrices{}, 60.0, {}};
        const auto q = apply_policy(memoryless(), genesis(60.0, 600.0), ctx);
        for (double v : q.values) CHECK(v == doctest::Approx(10.0).epsilon(1e-14));
    }
    SUBCASE("deterministic") {
        std::mt19937_64 rng(5);
        const auto policy = testing::random_policy(rng);
        AgentState s = genesis(80.0, 900.0);
        s.prior_alloc = AllocationVector{{3, 9, 1, 4, 2, 6}};
        const PeriodContext ctx{testing::random_prices(rng), 80.0, {}};
        CHECK(apply_policy(policy, s, ctx) == apply_policy(policy, s, ctx));
    }
    SUBCASE("more prior consumption raises consumption under persistence") {
        AllocationPolicy policy;
        AgentState s = genesis(60.0, 600.0);
        s.prior_alloc = AllocationVector::uniform(10.0);
        const PeriodContext ctx{UnitPrices{}, 60.0, {}};
        const double before = apply_policy(policy, s, ctx)[FactorId::Consumption];
        s.prior_alloc[FactorId::Consumption] += 5.0;
        const double after = apply_policy(policy, s, ctx)[FactorId::Consumption];
        CHECK(after > before);
    }
    SUBCASE("an all-zero anchor falls back to base weights") {
        AllocationPolicy policy;
        policy.base_weights = {0.5, 0.5, 0, 0, 0, 0};
        policy.regret_weight = 1.0;
        AgentState s = genesis(60.0, 600.0);
        // Prior spent on factors with zero base weight; the anchor is all zero.
        s.prior_alloc = AllocationVector{{0, 0, 10, 10, 10, 10}};
        const PeriodContext ctx{UnitPrices{}, 60.0, {}};
        const auto q = apply_policy(policy, s, ctx);
        CHECK(q[FactorId::Consumption] == doctest::Approx(30.0));
        CHECK(q[FactorId::Taxes] == doctest::Approx(30.0));
        CHECK(allocation_cost(q, ctx.prices) == doctest::Approx(60.0));
    }
    SUBCASE("invalid policy is rejected") {
        AllocationPolicy policy;
        policy.base_weights[0] = 0.9;
        const PeriodContext ctx{UnitPrices{}, 60.0, {}};
        CHECK_THROWS_AS(apply_policy(policy, genesis(60.0, 600.0), ctx), PreconditionError);
    }
    SUBCASE("unsigned mode never allocates negative quantities") {
        AllocationPolicy policy;
        policy.regret_weight = 50.0;
        AgentState s = genesis(60.0, 600.0);
        s.prior_alloc = AllocationVector{{50, 1, 1, 1, 1, 6}};
        s.regret_memory = 3.0;
        const PeriodContext ctx{UnitPrices{}, 60.0, {}};
        const auto q = apply_policy(policy, s, ctx);
        for (double v : q.values) CHECK(v >= 0.0);
        policy.signed_allocations = true;
        const auto signed_q = apply_policy(policy, s, ctx);
        CHECK(allocation_cost(signed_q, ctx.prices) == doctest::Approx(60.0));
    }
}

TEST_CASE("regret_penalty") {
    const UnitPrices ones;
    const AllocationVector chosen = AllocationVector::uniform(10.0);
    CHECK(regret_penalty(chosen, chosen, ones) == 0.0);

    const AllocationVector best{{12, 10, 10, 10, 10, 8}};
    // (10-12)^2 + (10-8)^2 over the chosen cost of 60.
    CHECK(regret_penalty(chosen, best, ones) == doctest::Approx((4.0 + 4.0) / 60.0).epsilon(1e-15));

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(-5.0, 20.0);
    for (int n = 0; n < 200; ++n) {
        AllocationVector a, b;
        for (auto& v : a.values) v = d(rng);
        b = a;
        b.values[static_cast<std::size_t>(n % 6)] += 0.5;
        CHECK(regret_penalty(a, b, testing::random_prices(rng)) > 0.0);
    }
}

TEST_CASE("step_recursion") {
    const UnitPrices ones;
    const Wealth w{600.0, 600.0, 60.0};

    SUBCASE("memoryless fixed point") {
        const AllocationPolicy policy = memoryless();
        AgentState s = genesis(60.0, 600.0);
        const AgentState s1 = step_recursion(policy, s, w, ones);
        const AgentState s2 = step_recursion(policy, s1, w, ones);
        CHECK(s1.current_alloc == s2.current_alloc);
        CHECK(s1.period_index == 1);
        CHECK(s2.period_index == 2);
        CHECK(s2.prior_alloc == s1.current_alloc);
        CHECK(s2.budget_closed);
    }
    SUBCASE("prior allocation matters under persistence") {
        const AllocationPolicy policy;
        AgentState a = genesis(60.0, 600.0);
        a.current_alloc = AllocationVector::uniform(10.0);
        AgentState b = a;
        b.current_alloc = AllocationVector{{20, 8, 8, 8, 8, 8}};
        const auto qa = step_recursion(policy, a, w, ones).current_alloc;
        const auto qb = step_recursion(policy, b, w, ones).current_alloc;
        double gap = 0.0;
        for (std::size_t k = 0; k < kFactorCount; ++k) gap = std::max(gap, std::abs(qa.values[k] - qb.values[k]));
        CHECK(gap > 0.0);
    }
    SUBCASE("zero period wealth") {
        const AgentState s = step_recursion(AllocationPolicy{}, genesis(60.0, 600.0),
                                            Wealth{600.0, 600.0, 0.0}, ones);
        CHECK(s.current_alloc == AllocationVector{});
        CHECK(s.budget_closed);
        CHECK(is_budget_closed(s.current_alloc, s.prices, 0.0));
    }
    SUBCASE("regret accumulates against the base-weight target") {
        AllocationPolicy policy;
        AgentState s = genesis(60.0, 600.0);
        s.current_alloc = AllocationVector{{12, 10, 10, 10, 10, 8}};
        s.wealth.period = 60.0;
        s.regret_memory = 0.25;
        const AgentState next = step_recursion(policy, s, w, ones);
        CHECK(next.regret_memory == doctest::Approx(0.25 + 8.0 / 60.0));
    }
    SUBCASE("shocks for the successor period apply before allocating") {
        const AllocationPolicy policy = memoryless();
        const Shock loss{ShockKind::IncomeLoss, std::nullopt, -0.5, 1};
        const AgentState s = step_recursion(policy, genesis(60.0, 600.0), w, ones,
                                            std::span<const Shock>(&loss, 1));
        CHECK(s.wealth.period == 30.0);
        CHECK(allocation_cost(s.current_alloc, ones) == doctest::Approx(30.0));
        const Shock later{ShockKind::IncomeLoss, std::nullopt, -0.5, 2};
        const AgentState t = step_recursion(policy, genesis(60.0, 600.0), w, ones,
                                            std::span<const Shock>(&later, 1));
        CHECK(t.wealth.period == 60.0);
    }
}

TEST_CASE("apply_shock") {
    AgentState s;
    s.wealth = {1000.0, 500.0, 100.0};
    s.prices[FactorId::Housing] = 2.0;
    s.period_index = 3;

    CHECK(apply_shock(s, Shock{ShockKind::IncomeLoss, std::nullopt, 0.0, 3}) == s);
    CHECK(apply_shock(s, Shock{ShockKind::IncomeLoss, std::nullopt, -0.5, 3}).wealth.period == 50.0);
    CHECK(apply_shock(s, Shock{ShockKind::Layoff, std::nullopt, -1.0 + 1e-9, 3}).wealth.period >= 0.0);
    CHECK(apply_shock(s, Shock{ShockKind::PriceJump, FactorId::Housing, 1.0, 3}).prices.h() == 4.0);

    const AgentState h = apply_shock(s, Shock{ShockKind::HealthEvent, std::nullopt, -0.2, 3});
    CHECK(h.wealth.total == doctest::Approx(800.0));
    CHECK(h.wealth.period == doctest::Approx(80.0));
    CHECK(h.regret_memory == doctest::Approx(0.2));

    const AgentState up = apply_shock(s, Shock{ShockKind::IncomeLoss, std::nullopt, 9.0, 3});
    CHECK(up.wealth.period == 1000.0);
    CHECK(up.wealth.investable >= up.wealth.period);
    CHECK(up.wealth.total >= up.wealth.investable);

    CHECK(shock_violation(Shock{ShockKind::IncomeLoss, std::nullopt, -1.5, 1}) == "magnitude > -1");
    CHECK_FALSE(shock_violation(Shock{ShockKind::PriceJump, std::nullopt, 0.1, 1}).empty());
    CHECK(parse_shock_kind("health_event") == ShockKind::HealthEvent);
}
