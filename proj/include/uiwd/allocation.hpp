#pragma once

#include <functional>
#include <span>
#include <vector>

#include "uiwd/core.hpp"
#include "uiwd/shock.hpp"

namespace uiwd {

/// Parameters of the reference regret-augmented allocation policy.
struct AllocationPolicy {
    /// Target budget shares; nonnegative, summing to 1.
    FactorValues base_weights{1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6};
    RecursionCoefficients persistence;
    double regret_weight = 0.0;
    /// Diminishing-returns exponent per factor; 1 makes the policy linear in period wealth.
    FactorValues curvature{2.0, 2.0, 2.0, 2.0, 2.0, 2.0};
    /// Allow negative shares (borrowing, tax deferral). Off: scores are floored at zero.
    bool signed_allocations = false;

    bool operator==(const AllocationPolicy&) const = default;
};

std::vector<Violation> validate_policy(const AllocationPolicy& policy);

struct PeriodContext {
    UnitPrices prices;
    double period_wealth = 0.0;
    /// Events for this period. apply_policy ignores them; step_recursion and
    /// sweep_wealth apply the ones whose period matches.
    std::vector<Shock> shocks;
};

/// Any map from (state, context) to an allocation. The reference policy is one
/// instance; tests and probes also use linear and constant rules.
using AllocationRule = std::function<AllocationVector(const AgentState&, const PeriodContext&)>;

/// v*c + y*t + x*i + z*l + s*b + r*h.
double allocation_cost(const AllocationVector& alloc, const UnitPrices& prices) noexcept;

bool is_budget_closed(const AllocationVector& alloc, const UnitPrices& prices, double period_wealth) noexcept;

/// Quantity of `target` that makes the allocation exhaust `wealth_period`,
/// holding the other five quantities fixed. Throws DegenerateBudgetError when
/// the target's price is not positive.
double budget_residual(FactorId target, double wealth_period, const UnitPrices& prices,
                       const AllocationVector& alloc);

/// Cost shares of `alloc` at `prices`, negatives floored at zero. Returns
/// `fallback` when nothing positive was allocated.
FactorValues cost_shares(const AllocationVector& alloc, const UnitPrices& prices,
                         const FactorValues& fallback) noexcept;

/// Splits `period_wealth` by `shares` and converts to quantities.
AllocationVector allocation_from_shares(const FactorValues& shares, double period_wealth,
                                        const UnitPrices& prices) noexcept;

/// Reference policy. Scoring, per factor f:
///
///   prior share   pi_f = cost share of state.prior_alloc at state.prices
///                        (base weight when the prior allocation is empty)
///   anchor        a_f  = base_f * pi_f ^ persistence_f, normalised to sum 1
///   satiation     x_f  = 6 * a_f * |w| * mean(price) / (price_f * W_T)
///   utility       m_f  = a_f * (1 + x_f) ^ (1 - curvature_f),  M = sum_f m_f
///   score         s_f  = m_f - regret_weight * R * M * (a_f - base_f) / (1 + R)
///
/// with R = regret_memory. Unsigned mode floors scores at zero. Shares are
/// scores over their sum (base weights when the sum is not positive);
/// quantities are share * w / price_f. x_f is 0 when W_T <= 0. The regret term
/// sums to zero across factors and pulls anchored allocations back toward the
/// base weights; its effect on any share is bounded by regret_weight.
///
/// Throws PreconditionError on an invalid policy or invalid context prices.
AllocationVector apply_policy(const AllocationPolicy& policy, const AgentState& state,
                              const PeriodContext& ctx);

/// The reference policy as an AllocationRule.
AllocationRule reference_rule(AllocationPolicy policy);
/// q_f = share_f * w / price_f, independent of state.
AllocationRule linear_rule(FactorValues shares);
/// Always returns `alloc`.
AllocationRule constant_rule(AllocationVector alloc);

/// Allocation an agent with no memory and no regret would choose: base weights
/// of `period_wealth`. Used as the ex-post benchmark for regret.
AllocationVector target_allocation(const AllocationPolicy& policy, double period_wealth,
                                   const UnitPrices& prices) noexcept;

/// sum_f price_f * (chosen_f - best_f)^2 / |w|, w = cost of `chosen`.
/// When w is zero the sum is returned unnormalised.
double regret_penalty(const AllocationVector& chosen, const AllocationVector& best_expost,
                      const UnitPrices& prices) noexcept;

/// Advances one period.
///
/// The successor has period_index + 1, the next wealth and prices, the old
/// current allocation as its prior, and regret memory increased by the regret
/// of the old allocation against target_allocation. Shocks whose period equals
/// the successor's index are applied before the policy runs.
AgentState step_recursion(const AllocationPolicy& policy, const AgentState& state,
                          const Wealth& next_wealth, const UnitPrices& next_prices,
                          std::span<const Shock> shocks = {});

} // namespace uiwd
