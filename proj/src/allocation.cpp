#include "uiwd/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uiwd/errors.hpp"

namespace uiwd {

namespace {

constexpr double kWeightSumTolerance = 1e-12;

double sum(const FactorValues& v) noexcept { return std::accumulate(v.begin(), v.end(), 0.0); }

void require_valid(const AllocationPolicy& policy, const PeriodContext& ctx) {
    if (auto bad = validate_policy(policy); !bad.empty()) {
        throw PreconditionError("invalid policy: " + to_string(bad));
    }
    if (auto bad = validate_prices(ctx.prices); !bad.empty()) {
        throw PreconditionError("invalid context prices: " + to_string(bad));
    }
    if (!std::isfinite(ctx.period_wealth)) {
        throw PreconditionError("period wealth must be finite");
    }
}

} // namespace

std::vector<Violation> validate_policy(const AllocationPolicy& policy) {
    std::vector<Violation> out;
    for (FactorId f : kAllFactors) {
        const auto i = index_of(f);
        const std::string sym(price_symbol(f));
        if (!(policy.base_weights[i] >= 0.0) || !std::isfinite(policy.base_weights[i])) {
            out.push_back({"policy.base_weights." + sym, "base weight ≥ 0"});
        }
        if (!(policy.curvature[i] > 0.0) || !std::isfinite(policy.curvature[i])) {
            out.push_back({"policy.curvature." + sym, "curvature > 0"});
        }
        if (!std::isfinite(policy.persistence.of(f))) {
            out.push_back({"policy.persistence." + sym, "persistence must be finite"});
        }
    }
    if (std::abs(sum(policy.base_weights) - 1.0) > kWeightSumTolerance) {
        out.push_back({"policy.base_weights", "base weights sum to 1"});
    }
    if (!(policy.regret_weight >= 0.0) || !std::isfinite(policy.regret_weight)) {
        out.push_back({"policy.regret_weight", "regret_weight ≥ 0"});
    }
    return out;
}

double allocation_cost(const AllocationVector& alloc, const UnitPrices& prices) noexcept {
    double cost = 0.0;
    for (std::size_t i = 0; i < kFactorCount; ++i) {
        cost += alloc.values[i] * prices.values[i];
    }
    return cost;
}

bool is_budget_closed(const AllocationVector& alloc, const UnitPrices& prices,
                      double period_wealth) noexcept {
    return std::abs(allocation_cost(alloc, prices) - period_wealth) <= budget_tolerance(period_wealth);
}

double budget_residual(FactorId target, double wealth_period, const UnitPrices& prices,
                       const AllocationVector& alloc) {
    const double own_price = prices[target];
    if (!(own_price > 0.0)) {
        throw DegenerateBudgetError("price of " + std::string(factor_name(target)) +
                                    " must be > 0 to solve for its quantity");
    }
    double others = 0.0;
    for (FactorId f : kAllFactors) {
        if (f != target) {
            others += alloc[f] * prices[f];
        }
    }
    return (wealth_period - others) / own_price;
}

FactorValues cost_shares(const AllocationVector& alloc, const UnitPrices& prices,
                         const FactorValues& fallback) noexcept {
    FactorValues shares{};
    double total = 0.0;
    for (std::size_t i = 0; i < kFactorCount; ++i) {
        shares[i] = std::max(0.0, alloc.values[i] * prices.values[i]);
        total += shares[i];
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        return fallback;
    }
    for (double& s : shares) {
        s /= total;
    }
    return shares;
}

AllocationVector allocation_from_shares(const FactorValues& shares, double period_wealth,
                                        const UnitPrices& prices) noexcept {
    AllocationVector out;
    for (std::size_t i = 0; i < kFactorCount; ++i) {
        out.values[i] = shares[i] * period_wealth / prices.values[i];
    }
    return out;
}

AllocationVector apply_policy(const AllocationPolicy& policy, const AgentState& state,
                              const PeriodContext& ctx) {
    require_valid(policy, ctx);
    const FactorValues& base = policy.base_weights;

    const FactorValues prior = cost_shares(state.prior_alloc, state.prices, base);
    FactorValues anchor{};
    for (FactorId f : kAllFactors) {
        const auto i = index_of(f);
        anchor[i] = base[i] * std::pow(prior[i], policy.persistence.of(f));
    }
    const double anchor_total = sum(anchor);
    if (anchor_total > 0.0 && std::isfinite(anchor_total)) {
        for (double& a : anchor) {
            a /= anchor_total;
        }
    } else {
        anchor = base;
    }

    const double mean_price = sum(ctx.prices.values) / static_cast<double>(kFactorCount);
    const double total_wealth = state.wealth.total;

    FactorValues score{};
    for (std::size_t i = 0; i < kFactorCount; ++i) {
        const double satiation =
            total_wealth > 0.0 ? static_cast<double>(kFactorCount) * anchor[i] *
                                     std::abs(ctx.period_wealth) * mean_price /
                                     (ctx.prices.values[i] * total_wealth)
                               : 0.0;
        score[i] = anchor[i] * std::pow(1.0 + satiation, 1.0 - policy.curvature[i]);
    }
    // Regret per unit of memory is attributed as (a_f - base_f) / (1 + R) and
    // scaled by the score total, so the pull on shares stays below regret_weight.
    const double level = sum(score);
    const double pull = policy.regret_weight * state.regret_memory / (1.0 + state.regret_memory);
    for (std::size_t i = 0; i < kFactorCount; ++i) {
        score[i] -= pull * level * (anchor[i] - base[i]);
        if (!policy.signed_allocations) {
            score[i] = std::max(0.0, score[i]);
        }
    }

    // All-zero (or non-positive) scores fall back to the base weights.
    FactorValues shares = base;
    const double score_total = sum(score);
    if (score_total > 0.0 && std::isfinite(score_total)) {
        for (std::size_t i = 0; i < kFactorCount; ++i) {
            shares[i] = score[i] / score_total;
        }
    }
    return allocation_from_shares(shares, ctx.period_wealth, ctx.prices);
}

AllocationRule reference_rule(AllocationPolicy policy) {
    return [policy = std::move(policy)](const AgentState& state, const PeriodContext& ctx) {
        return apply_policy(policy, state, ctx);
    };
}

AllocationRule linear_rule(FactorValues shares) {
    return [shares](const AgentState&, const PeriodContext& ctx) {
        return allocation_from_shares(shares, ctx.period_wealth, ctx.prices);
    };
}

AllocationRule constant_rule(AllocationVector alloc) {
    return [alloc](const AgentState&, const PeriodContext&) { return alloc; };
}

AllocationVector target_allocation(const AllocationPolicy& policy, double period_wealth,
                                   const UnitPrices& prices) noexcept {
    return allocation_from_shares(policy.base_weights, period_wealth, prices);
}

double regret_penalty(const AllocationVector& chosen, const AllocationVector& best_expost,
                      const UnitPrices& prices) noexcept {
    double gap = 0.0;
    for (std::size_t i = 0; i < kFactorCount; ++i) {
        const double d = chosen.values[i] - best_expost.values[i];
        gap += prices.values[i] * d * d;
    }
    const double wealth = std::abs(allocation_cost(chosen, prices));
    return wealth > 0.0 ? gap / wealth : gap;
}

AgentState step_recursion(const AllocationPolicy& policy, const AgentState& state,
                          const Wealth& next_wealth, const UnitPrices& next_prices,
                          std::span<const Shock> shocks) {
    const AllocationVector best =
        target_allocation(policy, state.wealth.period, state.prices);

    AgentState next;
    next.wealth = next_wealth;
    next.prices = next_prices;
    next.prior_alloc = state.current_alloc;
    next.regret_memory =
        state.regret_memory + regret_penalty(state.current_alloc, best, state.prices);
    next.period_index = state.period_index + 1;
    for (const Shock& shock : shocks) {
        if (shock.period == next.period_index) {
            next = apply_shock(next, shock);
        }
    }

    // The prior allocation is valued at the prices it was bought at.
    AgentState basis = next;
    basis.prices = state.prices;
    const PeriodContext ctx{next.prices, next.wealth.period, {}};
    next.current_alloc = apply_policy(policy, basis, ctx);
    next.budget_closed = true;
    return next;
}

} // namespace uiwd
