#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uiwd/allocation.hpp"
#include "uiwd/core.hpp"

namespace uiwd {

enum class BumpScheme : std::uint8_t { Central, Forward };

struct BumpSpec {
    double relative_step = 1e-4;
    BumpScheme scheme = BumpScheme::Central;
};

/// Throws PreconditionError unless relative_step is in (0, 0.1).
void validate_bump(const BumpSpec& bump);

/// Finite-difference marginal rate of substitution of `factor`.
///
/// rate = dq/dW - sum over the other five factors j of dq/dq_j, where q is the
/// factor's own quantity under `rule`. The wealth derivative bumps
/// ctx.period_wealth by h = step * max(1, |w|). A cross derivative commits
/// delta = step * max(1, |q_j|) extra units to factor j; the budget is closed
/// through j's price, so the rule is re-run on period wealth w - price_j * delta
/// and the change in q is divided by delta.
///
/// Throws PreconditionError when the state is not budget-closed.
double marginal_rate(FactorId factor, const AllocationRule& rule, const AgentState& state,
                     const PeriodContext& ctx, const BumpSpec& bump = {});
double marginal_rate(FactorId factor, const AllocationPolicy& policy, const AgentState& state,
                     const PeriodContext& ctx, const BumpSpec& bump = {});

SubstitutionRates all_rates(const AllocationRule& rule, const AgentState& state,
                            const PeriodContext& ctx, const BumpSpec& bump = {});
SubstitutionRates all_rates(const AllocationPolicy& policy, const AgentState& state,
                            const PeriodContext& ctx, const BumpSpec& bump = {});

/// Multi-period rates: the arithmetic mean of each per-period rate. MRIJS is
/// recomputed from the averaged rates. Throws on an empty window.
SubstitutionRates average_rates(std::span<const SubstitutionRates> window);

struct EisEstimate {
    double point = 0.0;
    double standard_error = 0.0;
    /// Max minus min of the slope over contiguous folds.
    double subsample_dispersion = 0.0;
    std::int64_t n_obs = 0;
    std::vector<double> fold_points;
};

/// Log consumption growth from a log-linearised CRRA Euler equation:
/// g_t = (log beta + log R_t) / gamma + eps_t, eps ~ N(0, noise_sd).
/// `gross_rates` holds R_t. The true EIS is 1 / gamma.
std::vector<double> crra_euler_oracle(double gamma, double beta, std::span<const double> gross_rates,
                                      double noise_sd, std::uint64_t seed);

struct OlsFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_stderr = 0.0;
};

/// y = intercept + slope * x. Throws EstimationError when x has no variance.
OlsFit ols_fit(std::span<const double> x, std::span<const double> y);

/// OLS of growth on log gross rate with an intercept; the slope is the EIS.
///
/// Requires equal lengths, folds >= 2 and at least 8 * folds observations.
/// Throws EstimationError when the rate path (or any fold of it) is constant.
EisEstimate estimate_eis(std::span<const double> growth, std::span<const double> gross_rates,
                         int folds);

} // namespace uiwd
