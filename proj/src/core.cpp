#include "uiwd/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "uiwd/allocation.hpp"
#include "uiwd/errors.hpp"

namespace uiwd {

namespace {

constexpr std::array<std::string_view, kFactorCount> kNames{
    "Consumption", "Taxes", "Investment", "Leisure", "Intangibles", "Housing"};
constexpr std::array<std::string_view, kFactorCount> kPriceSymbols{"c", "t", "i", "l", "b", "h"};
constexpr std::array<std::string_view, kFactorCount> kQuantitySymbols{"v", "y", "x", "z", "s", "r"};

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char l, char r) {
               return std::tolower(static_cast<unsigned char>(l)) ==
                      std::tolower(static_cast<unsigned char>(r));
           });
}

} // namespace

std::string_view factor_name(FactorId f) noexcept { return kNames[index_of(f)]; }
std::string_view price_symbol(FactorId f) noexcept { return kPriceSymbols[index_of(f)]; }
std::string_view quantity_symbol(FactorId f) noexcept { return kQuantitySymbols[index_of(f)]; }

FactorId parse_factor(std::string_view text) {
    for (FactorId f : kAllFactors) {
        if (iequals(text, factor_name(f)) || text == price_symbol(f)) {
            return f;
        }
    }
    throw PreconditionError("unknown factor '" + std::string(text) + "'");
}

double RecursionCoefficients::of(FactorId f) const noexcept {
    switch (f) {
    case FactorId::Consumption: return b;
    case FactorId::Taxes: return d;
    case FactorId::Investment: return a;
    case FactorId::Leisure: return e;
    case FactorId::Intangibles: return j;
    case FactorId::Housing: return k;
    }
    return 0.0;
}

double mrijs_from_sum(double rate_sum) noexcept {
    const double value = std::exp(std::min(0.0, -rate_sum));
    return std::max(value, std::numeric_limits<double>::denorm_min());
}

SubstitutionRates::SubstitutionRates(const FactorValues& rates)
    : rates_(rates), mrijs_(mrijs_from_sum(std::accumulate(rates.begin(), rates.end(), 0.0))) {}

double SubstitutionRates::rate_sum() const noexcept {
    return std::accumulate(rates_.begin(), rates_.end(), 0.0);
}

double budget_tolerance(double period_wealth) noexcept {
    return kBudgetTolerance * std::max(1.0, std::abs(period_wealth));
}

std::vector<Violation> validate_prices(const UnitPrices& prices) {
    std::vector<Violation> out;
    for (FactorId f : kAllFactors) {
        const double p = prices[f];
        if (!(p > 0.0) || !std::isfinite(p)) {
            const std::string field = "UnitPrices." + std::string(price_symbol(f));
            out.push_back({field, field + " must be > 0"});
        }
    }
    return out;
}

std::vector<Violation> validate_wealth(const Wealth& wealth) {
    std::vector<Violation> out;
    if (!std::isfinite(wealth.total) || !std::isfinite(wealth.investable) ||
        !std::isfinite(wealth.period)) {
        out.push_back({"Wealth", "wealth figures must be finite"});
        return out;
    }
    if (wealth.total < 0.0) {
        out.push_back({"Wealth.total", "total ≥ 0"});
    }
    if (wealth.investable < 0.0) {
        out.push_back({"Wealth.investable", "investable ≥ 0"});
    }
    if (wealth.investable > wealth.total) {
        out.push_back({"Wealth.investable", "investable ≤ total"});
    }
    if (wealth.period > wealth.investable) {
        out.push_back({"Wealth.period", "period ≤ investable"});
    }
    return out;
}

std::vector<Violation> validate_allocation(const AllocationVector& alloc, std::string_view name) {
    std::vector<Violation> out;
    for (FactorId f : kAllFactors) {
        if (!std::isfinite(alloc[f])) {
            const std::string field =
                std::string(name) + "." + std::string(quantity_symbol(f));
            out.push_back({field, field + " must be finite"});
        }
    }
    return out;
}

std::vector<Violation> validate_profile(const SavingsProfile& p) {
    std::vector<Violation> out;
    if (!(p.horizon_years > 0.0) || !std::isfinite(p.horizon_years)) {
        out.push_back({"SavingsProfile.horizon_years", "horizon_years > 0"});
    }
    const std::array<double, 9> fields{p.pv_savings,     p.pv_expected_uncovered, p.pv_unexpected,
                                       p.pv_inflation,   p.instability_regret,    p.pv_home_equity,
                                       p.pv_gov_support, p.pv_insurance,          p.discount_rate};
    if (!std::all_of(fields.begin(), fields.end(), [](double v) { return std::isfinite(v); })) {
        out.push_back({"SavingsProfile", "present-value fields must be finite"});
    }
    return out;
}

std::vector<Violation> validate_state(const AgentState& state) {
    std::vector<Violation> out = validate_prices(state.prices);
    auto append = [&out](std::vector<Violation> more) {
        out.insert(out.end(), std::make_move_iterator(more.begin()),
                   std::make_move_iterator(more.end()));
    };
    append(validate_wealth(state.wealth));
    append(validate_allocation(state.current_alloc, "current_alloc"));
    append(validate_allocation(state.prior_alloc, "prior_alloc"));
    if (!(state.regret_memory >= 0.0) || !std::isfinite(state.regret_memory)) {
        out.push_back({"AgentState.regret_memory", "regret_memory ≥ 0"});
    }
    if (state.period_index < 0) {
        out.push_back({"AgentState.period_index", "period_index ≥ 0"});
    }
    if (state.budget_closed && out.empty() &&
        !is_budget_closed(state.current_alloc, state.prices, state.wealth.period)) {
        out.push_back({"AgentState.current_alloc",
                       "allocation_cost(current_alloc, prices) = wealth.period"});
    }
    return out;
}

std::string to_string(const std::vector<Violation>& violations) {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) {
            out += "; ";
        }
        out += v.field + ": " + v.invariant;
    }
    return out;
}

} // namespace uiwd
