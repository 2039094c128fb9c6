#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uiwd/allocation.hpp"
#include "uiwd/core.hpp"
#include "uiwd/shock.hpp"
#include "uiwd/substitution.hpp"

namespace uiwd {

/// Exogenous path of one factor's unit price over periods 1..n.
struct PricePath {
    enum class Kind : std::uint8_t { Constant, Drift, Series };

    Kind kind = Kind::Constant;
    double start = 1.0;
    double drift = 0.0;          ///< per-period growth rate for Kind::Drift
    std::vector<double> series;  ///< one price per period for Kind::Series

    /// Price in period t (1-based). Drift: start * (1 + drift)^(t - 1).
    double at(std::int64_t period) const;

    bool operator==(const PricePath&) const = default;
};

struct WealthSpec {
    enum class Distribution : std::uint8_t { Uniform, Lognormal };

    Distribution distribution = Distribution::Uniform;
    double low = 1000.0;   ///< uniform lower bound of initial W_T
    double high = 1000.0;  ///< uniform upper bound of initial W_T
    double mu = 7.0;       ///< lognormal log-mean
    double sigma = 0.5;    ///< lognormal log-sd
    double investable_share = 1.0;
    double period_share = 0.1;
    double growth = 0.0;   ///< exogenous per-period growth of W_T
    /// Extension: add investment_return * (x * i) to W_T after each period.
    bool credit_investment = false;
    /// Net return per period; a single entry applies to every period.
    std::vector<double> investment_return{0.0};

    double return_at(std::int64_t period) const;

    bool operator==(const WealthSpec&) const = default;
};

struct ScenarioConfig {
    std::int64_t n_agents = 1;
    std::int64_t n_periods = 1;
    AllocationPolicy policy;
    WealthSpec wealth;
    std::array<PricePath, kFactorCount> prices{};
    std::vector<Shock> shocks;
    std::uint64_t seed = 0;
    /// Worker threads for agent simulation. Output does not depend on it.
    unsigned threads = 1;
    bool record_rates = false;
    BumpSpec bump;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Field-level problems; empty means the config can be simulated.
std::vector<Violation> validate_config(const ScenarioConfig& config);

struct TrajectoryRecord {
    std::int64_t agent_id = 0;
    std::int64_t period = 0;
    Wealth wealth;
    UnitPrices prices;
    AllocationVector allocation;
    double regret_memory = 0.0;
    std::optional<SubstitutionRates> rates;

    bool operator==(const TrajectoryRecord&) const = default;
};

/// Records ordered by (agent_id, period); periods run 1..n_periods.
struct Trajectory {
    std::int64_t n_agents = 0;
    std::int64_t n_periods = 0;
    std::vector<TrajectoryRecord> records;

    const TrajectoryRecord& at(std::int64_t agent, std::int64_t period) const;
    bool operator==(const Trajectory&) const = default;
};

/// Seed of agent k's random stream: splitmix64(root + (k + 1) * 0x9E3779B97F4A7C15).
std::uint64_t agent_seed(std::uint64_t root_seed, std::int64_t agent_id) noexcept;

/// Draws the agent's initial total wealth from its own stream.
double initial_total_wealth(const ScenarioConfig& config, std::int64_t agent_id);

/// Genesis state (period 0): initial wealth, period-1 prices, nothing allocated yet.
AgentState initial_state(const ScenarioConfig& config, std::int64_t agent_id);

/// One agent's records, periods 1..n_periods.
///
/// Each period's wealth and prices come from the configured paths; shocks for
/// the period are applied before the allocation step (step_recursion).
std::vector<TrajectoryRecord> simulate_agent(const ScenarioConfig& config, std::int64_t agent_id);

/// Simulates every agent (concurrently when config.threads > 1) and merges the
/// records in (agent, period) order. Throws PreconditionError on invalid config.
Trajectory run_scenario(const ScenarioConfig& config);

/// Column order of the trajectory export.
std::vector<std::string> trajectory_columns(bool with_mrijs);

/// Comma-separated export, one row per (agent, period), header first. Numbers
/// use the shortest round-trip representation.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

struct CurvePoint {
    double wealth = 0.0;
    AllocationVector allocation;
};

/// Evaluates `rule` at `steps` evenly spaced period wealths in [w_min, w_max].
///
/// Point k (1-based) is treated as period k: shocks in ctx.shocks whose period
/// equals k are applied to that point only. The curve records the nominal
/// sweep wealth alongside the resulting allocation.
std::vector<CurvePoint> sweep_wealth(const AllocationRule& rule, const AgentState& state,
                                     const PeriodContext& ctx, double w_min, double w_max, int steps);

/// Aggregate consumption growth and gross real rates from a trajectory.
///
/// growth_t = log(V_{t+1} / V_t) with V the consumption quantity summed over
/// agents; R_t = (1 + investment return_t) * c_t / c_{t+1}, both for
/// t = 1..n-1. Throws PreconditionError when aggregate consumption is not positive.
struct EisSeries {
    std::vector<double> growth;
    std::vector<double> gross_rates;
};
EisSeries eis_series(const Trajectory& trajectory, const ScenarioConfig& config);

} // namespace uiwd
