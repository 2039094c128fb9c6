#include <doctest.h>

#include <cmath>
#include <limits>

#include "uiwd/core.hpp"
#include "uiwd/errors.hpp"

using namespace uiwd;

namespace {

bool has(const std::vector<Violation>& vs, std::string_view invariant) {
    for (const auto& v : vs) {
        if (v.invariant == invariant) return true;
    }
    return false;
}

AgentState sixty_state() {
    AgentState s;
    s.wealth = {100.0, 80.0, 60.0};
    s.current_alloc = AllocationVector::uniform(10.0);
    s.budget_closed = true;
    return s;
}

} // namespace

TEST_CASE("factor symbols round-trip") {
    for (FactorId f : kAllFactors) {
        CHECK(parse_factor(factor_name(f)) == f);
        CHECK(parse_factor(price_symbol(f)) == f);
    }
    CHECK(parse_factor("housing") == FactorId::Housing);
    CHECK(price_symbol(FactorId::Intangibles) == "b");
    CHECK(quantity_symbol(FactorId::Intangibles) == "s");
    CHECK_THROWS_AS(parse_factor("wealth"), PreconditionError);
}

TEST_CASE("persistence coefficients map to factors") {
    RecursionCoefficients r{1, 2, 3, 4, 5, 6};
    CHECK(r.of(FactorId::Investment) == 1);
    CHECK(r.of(FactorId::Consumption) == 2);
    CHECK(r.of(FactorId::Taxes) == 3);
    CHECK(r.of(FactorId::Leisure) == 4);
    CHECK(r.of(FactorId::Intangibles) == 5);
    CHECK(r.of(FactorId::Housing) == 6);
}

TEST_CASE("validate_state") {
    SUBCASE("closed state at unit prices is valid") {
        CHECK(validate_state(sixty_state()).empty());
    }
    SUBCASE("zero consumption price") {
        AgentState s = sixty_state();
        s.prices[FactorId::Consumption] = 0.0;
        CHECK(has(validate_state(s), "UnitPrices.c must be > 0"));
    }
    SUBCASE("investable above total") {
        AgentState s = sixty_state();
        s.wealth.investable = 150.0;
        CHECK(has(validate_state(s), "investable ≤ total"));
    }
    SUBCASE("period above investable") {
        AgentState s = sixty_state();
        s.wealth = {100.0, 50.0, 60.0};
        CHECK(has(validate_state(s), "period ≤ investable"));
    }
    SUBCASE("open budget flagged only when claimed closed") {
        AgentState s = sixty_state();
        s.current_alloc[FactorId::Housing] = 11.0;
        CHECK_FALSE(validate_state(s).empty());
        s.budget_closed = false;
        CHECK(validate_state(s).empty());
    }
    SUBCASE("non-finite quantity") {
        AgentState s = sixty_state();
        s.budget_closed = false;
        s.prior_alloc[FactorId::Taxes] = std::numeric_limits<double>::quiet_NaN();
        CHECK_FALSE(validate_state(s).empty());
    }
    SUBCASE("negative regret memory") {
        AgentState s = sixty_state();
        s.regret_memory = -1.0;
        CHECK(has(validate_state(s), "regret_memory ≥ 0"));
    }
}

TEST_CASE("mrijs closed-form cases") {
    CHECK(mrijs_from_sum(0.0) == 1.0);
    CHECK(mrijs_from_sum(std::log(2.0)) == 0.5);
    CHECK(mrijs_from_sum(-3.0) == 1.0);
    CHECK(mrijs_from_sum(1e6) > 0.0);
    CHECK(mrijs_from_sum(1e6) <= 1.0);
}

TEST_CASE("SubstitutionRates stores its index") {
    const SubstitutionRates r({0.5, 0.25, 0.0, -0.1, 0.2, 0.15});
    CHECK(r.rate_sum() == doctest::Approx(1.0));
    CHECK(r.mrijs() == mrijs_from_sum(r.rate_sum()));
    CHECK(r.c_star() == 0.5);
    CHECK(r.h_star() == 0.15);
    CHECK(SubstitutionRates{}.mrijs() == 1.0);
}

TEST_CASE("budget tolerance is relative above unit wealth") {
    CHECK(budget_tolerance(0.0) == kBudgetTolerance);
    CHECK(budget_tolerance(1e6) == doctest::Approx(1e-3));
}
