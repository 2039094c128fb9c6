#include "uiwd/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "uiwd/errors.hpp"

namespace uiwd {

double PricePath::at(std::int64_t period) const {
    switch (kind) {
    case Kind::Constant:
        return start;
    case Kind::Drift:
        return start * std::pow(1.0 + drift, static_cast<double>(period - 1));
    case Kind::Series:
        if (period < 1 || static_cast<std::size_t>(period) > series.size()) {
            throw PreconditionError("price series has no entry for period " +
                                    std::to_string(period));
        }
        return series[static_cast<std::size_t>(period - 1)];
    }
    return start;
}

double WealthSpec::return_at(std::int64_t period) const {
    if (investment_return.size() == 1) {
        return investment_return.front();
    }
    if (period < 1 || static_cast<std::size_t>(period) > investment_return.size()) {
        throw PreconditionError("investment return series has no entry for period " +
                                std::to_string(period));
    }
    return investment_return[static_cast<std::size_t>(period - 1)];
}

std::vector<Violation> validate_config(const ScenarioConfig& c) {
    std::vector<Violation> out;
    auto fail = [&out](std::string field, std::string invariant) {
        out.push_back({std::move(field), std::move(invariant)});
    };
    if (c.n_agents < 1) fail("agents", "agents ≥ 1");
    if (c.n_periods < 1) fail("periods", "periods ≥ 1");
    if (c.threads < 1) fail("threads", "threads ≥ 1");
    if (!(c.bump.relative_step > 0.0 && c.bump.relative_step < 0.1)) {
        fail("rates.relative_step", "relative_step in (0, 0.1)");
    }
    for (const auto& v : validate_policy(c.policy)) {
        out.push_back(v);
    }

    const WealthSpec& w = c.wealth;
    if (w.distribution == WealthSpec::Distribution::Uniform) {
        if (!(w.low >= 0.0)) fail("wealth.low", "low ≥ 0");
        if (!(w.high >= w.low) || !std::isfinite(w.high)) fail("wealth.high", "high ≥ low");
    } else {
        if (!std::isfinite(w.mu)) fail("wealth.mu", "mu must be finite");
        if (!(w.sigma > 0.0) || !std::isfinite(w.sigma)) fail("wealth.sigma", "sigma > 0");
    }
    if (!(w.investable_share >= 0.0 && w.investable_share <= 1.0)) {
        fail("wealth.investable_share", "investable_share in [0, 1]");
    }
    if (!(w.period_share >= 0.0 && w.period_share <= w.investable_share)) {
        fail("wealth.period_share", "period_share in [0, investable_share]");
    }
    if (!(w.growth > -1.0) || !std::isfinite(w.growth)) fail("wealth.growth", "growth > -1");
    if (w.investment_return.empty() ||
        (w.investment_return.size() > 1 &&
         w.investment_return.size() < static_cast<std::size_t>(std::max<std::int64_t>(c.n_periods, 0)))) {
        fail("wealth.investment_return", "one value or one per period");
    }
    for (double r : w.investment_return) {
        if (!(r > -1.0) || !std::isfinite(r)) {
            fail("wealth.investment_return", "returns > -1");
            break;
        }
    }

    for (FactorId f : kAllFactors) {
        const PricePath& p = c.prices[index_of(f)];
        const std::string base = "prices." + std::string(price_symbol(f));
        switch (p.kind) {
        case PricePath::Kind::Constant:
        case PricePath::Kind::Drift:
            if (!(p.start > 0.0) || !std::isfinite(p.start)) fail(base + ".start", "price > 0");
            if (!(p.drift > -1.0) || !std::isfinite(p.drift)) fail(base + ".drift", "drift > -1");
            break;
        case PricePath::Kind::Series:
            if (p.series.size() < static_cast<std::size_t>(std::max<std::int64_t>(c.n_periods, 0))) {
                fail(base + ".series", "one price per period");
            }
            if (!std::all_of(p.series.begin(), p.series.end(),
                             [](double v) { return v > 0.0 && std::isfinite(v); })) {
                fail(base + ".series", "price > 0");
            }
            break;
        }
    }

    for (std::size_t k = 0; k < c.shocks.size(); ++k) {
        const Shock& s = c.shocks[k];
        const std::string base = "shocks[" + std::to_string(k) + "]";
        if (!(s.magnitude > -1.0) || !std::isfinite(s.magnitude)) {
            fail(base + ".magnitude", "magnitude > -1");
        }
        if (s.period < 1) fail(base + ".period", "period ≥ 1");
        if (s.kind == ShockKind::PriceJump && !s.target) {
            fail(base + ".target", "price_jump needs a factor target");
        }
    }
    return out;
}

const TrajectoryRecord& Trajectory::at(std::int64_t agent, std::int64_t period) const {
    if (agent < 0 || agent >= n_agents || period < 1 || period > n_periods) {
        throw PreconditionError("no record for agent " + std::to_string(agent) + ", period " +
                                std::to_string(period));
    }
    return records[static_cast<std::size_t>(agent * n_periods + period - 1)];
}

std::uint64_t agent_seed(std::uint64_t root_seed, std::int64_t agent_id) noexcept {
    std::uint64_t z = root_seed + (static_cast<std::uint64_t>(agent_id) + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double initial_total_wealth(const ScenarioConfig& config, std::int64_t agent_id) {
    const WealthSpec& w = config.wealth;
    std::mt19937_64 engine(agent_seed(config.seed, agent_id));
    if (w.distribution == WealthSpec::Distribution::Lognormal) {
        return std::lognormal_distribution<double>(w.mu, w.sigma)(engine);
    }
    if (w.high == w.low) {
        return w.low;
    }
    return std::uniform_real_distribution<double>(w.low, w.high)(engine);
}

namespace {

UnitPrices prices_at(const ScenarioConfig& config, std::int64_t period) {
    UnitPrices p;
    for (std::size_t i = 0; i < kFactorCount; ++i) {
        p.values[i] = config.prices[i].at(period);
    }
    return p;
}

Wealth wealth_for(const WealthSpec& spec, double total) {
    return {total, spec.investable_share * total, spec.period_share * total};
}

void require_valid(const ScenarioConfig& config) {
    if (auto bad = validate_config(config); !bad.empty()) {
        throw PreconditionError("invalid scenario: " + to_string(bad));
    }
}

} // namespace

AgentState initial_state(const ScenarioConfig& config, std::int64_t agent_id) {
    AgentState state;
    state.wealth = wealth_for(config.wealth, initial_total_wealth(config, agent_id));
    state.wealth.period = 0.0;
    state.prices = prices_at(config, 1);
    state.period_index = 0;
    state.budget_closed = true;
    return state;
}

std::vector<TrajectoryRecord> simulate_agent(const ScenarioConfig& config, std::int64_t agent_id) {
    std::vector<TrajectoryRecord> records;
    records.reserve(static_cast<std::size_t>(config.n_periods));

    AgentState state = initial_state(config, agent_id);
    double total = state.wealth.total;
    for (std::int64_t t = 1; t <= config.n_periods; ++t) {
        state = step_recursion(config.policy, state, wealth_for(config.wealth, total),
                               prices_at(config, t), config.shocks);

        TrajectoryRecord rec;
        rec.agent_id = agent_id;
        rec.period = t;
        rec.wealth = state.wealth;
        rec.prices = state.prices;
        rec.allocation = state.current_alloc;
        rec.regret_memory = state.regret_memory;
        if (config.record_rates) {
            const PeriodContext ctx{state.prices, state.wealth.period, {}};
            rec.rates = all_rates(config.policy, state, ctx, config.bump);
        }
        records.push_back(std::move(rec));

        total *= 1.0 + config.wealth.growth;
        if (config.wealth.credit_investment) {
            total += config.wealth.return_at(t) * state.current_alloc[FactorId::Investment] *
                     state.prices[FactorId::Investment];
        }
        total = std::max(0.0, total);
    }
    return records;
}

Trajectory run_scenario(const ScenarioConfig& config) {
    require_valid(config);
    const auto n_agents = static_cast<std::size_t>(config.n_agents);
    std::vector<std::vector<TrajectoryRecord>> per_agent(n_agents);

    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(config.threads, n_agents));
    if (workers <= 1) {
        for (std::size_t a = 0; a < n_agents; ++a) {
            per_agent[a] = simulate_agent(config, static_cast<std::int64_t>(a));
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t a = next++; a < n_agents; a = next++) {
                    try {
                        per_agent[a] = simulate_agent(config, static_cast<std::int64_t>(a));
                    } catch (...) {
                        const std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
        pool.clear();
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    Trajectory out;
    out.n_agents = config.n_agents;
    out.n_periods = config.n_periods;
    out.records.reserve(n_agents * static_cast<std::size_t>(config.n_periods));
    for (auto& recs : per_agent) {
        out.records.insert(out.records.end(), std::make_move_iterator(recs.begin()),
                           std::make_move_iterator(recs.end()));
    }
    return out;
}

std::vector<std::string> trajectory_columns(bool with_mrijs) {
    std::vector<std::string> cols{"agent_id", "period", "wealth_total", "wealth_period"};
    for (FactorId f : kAllFactors) {
        cols.push_back("price_" + std::string(price_symbol(f)));
    }
    for (FactorId f : kAllFactors) {
        cols.push_back("q_" + std::string(quantity_symbol(f)));
    }
    cols.emplace_back("regret");
    if (with_mrijs) {
        cols.emplace_back("mrijs");
    }
    return cols;
}

namespace {

void put_number(std::ostream& out, double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    out.write(buf, res.ptr - buf);
}

} // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    const bool with_mrijs =
        !trajectory.records.empty() && trajectory.records.front().rates.has_value();
    const auto cols = trajectory_columns(with_mrijs);
    for (std::size_t k = 0; k < cols.size(); ++k) {
        out << (k ? "," : "") << cols[k];
    }
    out << '\n';
    for (const auto& rec : trajectory.records) {
        out << rec.agent_id << ',' << rec.period;
        for (double v : {rec.wealth.total, rec.wealth.period}) {
            out << ',';
            put_number(out, v);
        }
        for (double v : rec.prices.values) {
            out << ',';
            put_number(out, v);
        }
        for (double v : rec.allocation.values) {
            out << ',';
            put_number(out, v);
        }
        out << ',';
        put_number(out, rec.regret_memory);
        if (with_mrijs) {
            out << ',';
            put_number(out, rec.rates ? rec.rates->mrijs() : std::nan(""));
        }
        out << '\n';
    }
}

std::vector<CurvePoint> sweep_wealth(const AllocationRule& rule, const AgentState& state,
                                     const PeriodContext& ctx, double w_min, double w_max, int steps) {
    if (!(w_min < w_max)) {
        throw PreconditionError("sweep needs w_min < w_max");
    }
    if (steps < 3) {
        throw PreconditionError("sweep needs at least 3 steps");
    }
    std::vector<CurvePoint> curve;
    curve.reserve(static_cast<std::size_t>(steps));
    for (int k = 1; k <= steps; ++k) {
        const double w = k == steps ? w_max
                                    : w_min + (w_max - w_min) * static_cast<double>(k - 1) /
                                                  static_cast<double>(steps - 1);
        AgentState point = state;
        point.period_index = k;
        point.prices = ctx.prices;
        point.wealth.period = w;
        point.wealth.investable = std::max(point.wealth.investable, w);
        // W_T stays fixed along the sweep; only a health event rescales it.
        double total = state.wealth.total;
        for (const Shock& shock : ctx.shocks) {
            if (shock.period == k) {
                point = apply_shock(point, shock);
                if (shock.kind == ShockKind::HealthEvent) {
                    total *= 1.0 + shock.magnitude;
                }
            }
        }
        const PeriodContext local{point.prices, point.wealth.period, {}};
        AgentState basis = point;
        basis.prices = state.prices;
        basis.wealth.total = total;
        curve.push_back({w, rule(basis, local)});
    }
    return curve;
}

EisSeries eis_series(const Trajectory& trajectory, const ScenarioConfig& config) {
    const std::int64_t n = trajectory.n_periods;
    std::vector<double> consumption(static_cast<std::size_t>(n), 0.0);
    for (const auto& rec : trajectory.records) {
        consumption[static_cast<std::size_t>(rec.period - 1)] += rec.allocation[FactorId::Consumption];
    }
    EisSeries out;
    for (std::int64_t t = 1; t < n; ++t) {
        const double now = consumption[static_cast<std::size_t>(t - 1)];
        const double next = consumption[static_cast<std::size_t>(t)];
        if (!(now > 0.0) || !(next > 0.0)) {
            throw PreconditionError("aggregate consumption must stay positive for EIS estimation");
        }
        const double price_now = trajectory.at(0, t).prices[FactorId::Consumption];
        const double price_next = trajectory.at(0, t + 1).prices[FactorId::Consumption];
        out.growth.push_back(std::log(next / now));
        out.gross_rates.push_back((1.0 + config.wealth.return_at(t)) * price_now / price_next);
    }
    return out;
}

} // namespace uiwd
