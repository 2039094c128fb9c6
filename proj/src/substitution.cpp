#include "uiwd/substitution.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "uiwd/errors.hpp"

namespace uiwd {

void validate_bump(const BumpSpec& bump) {
    if (!(bump.relative_step > 0.0 && bump.relative_step < 0.1)) {
        throw PreconditionError("relative_step must be in (0, 0.1)");
    }
}

namespace {

double quantity_at(const AllocationRule& rule, FactorId factor, const AgentState& state,
                   const PeriodContext& ctx, double wealth) {
    PeriodContext bumped = ctx;
    bumped.period_wealth = wealth;
    return rule(state, bumped)[factor];
}

// d q / d(shift) where the rule sees period wealth w + direction * shift.
double derivative(const AllocationRule& rule, FactorId factor, const AgentState& state,
                  const PeriodContext& ctx, double shift, double direction, BumpScheme scheme,
                  double base_value) {
    const double w = ctx.period_wealth;
    const double up = quantity_at(rule, factor, state, ctx, w + direction * shift);
    if (scheme == BumpScheme::Forward) {
        return (up - base_value) / shift;
    }
    const double down = quantity_at(rule, factor, state, ctx, w - direction * shift);
    return (up - down) / (2.0 * shift);
}

} // namespace

double marginal_rate(FactorId factor, const AllocationRule& rule, const AgentState& state,
                     const PeriodContext& ctx, const BumpSpec& bump) {
    validate_bump(bump);
    if (auto bad = validate_state(state); !bad.empty()) {
        throw PreconditionError("invalid state: " + to_string(bad));
    }
    if (!state.budget_closed ||
        !is_budget_closed(state.current_alloc, state.prices, state.wealth.period)) {
        throw PreconditionError("marginal rates need a budget-closed state");
    }

    const AllocationVector base = rule(state, ctx);
    const double q = base[factor];
    const double step = bump.relative_step;

    const double wealth_shift = step * std::max(1.0, std::abs(ctx.period_wealth));
    double rate = derivative(rule, factor, state, ctx, wealth_shift, 1.0, bump.scheme, q);

    for (FactorId other : kAllFactors) {
        if (other == factor) {
            continue;
        }
        // Committing delta more units of `other` removes price * delta from the budget.
        const double delta = step * std::max(1.0, std::abs(base[other]));
        const double price = ctx.prices[other];
        const double cross =
            derivative(rule, factor, state, ctx, price * delta, -1.0, bump.scheme, q) * price;
        rate -= cross;
    }
    return rate;
}

double marginal_rate(FactorId factor, const AllocationPolicy& policy, const AgentState& state,
                     const PeriodContext& ctx, const BumpSpec& bump) {
    return marginal_rate(factor, reference_rule(policy), state, ctx, bump);
}

SubstitutionRates all_rates(const AllocationRule& rule, const AgentState& state,
                            const PeriodContext& ctx, const BumpSpec& bump) {
    FactorValues rates{};
    for (FactorId f : kAllFactors) {
        rates[index_of(f)] = marginal_rate(f, rule, state, ctx, bump);
    }
    return SubstitutionRates(rates);
}

SubstitutionRates all_rates(const AllocationPolicy& policy, const AgentState& state,
                            const PeriodContext& ctx, const BumpSpec& bump) {
    return all_rates(reference_rule(policy), state, ctx, bump);
}

SubstitutionRates average_rates(std::span<const SubstitutionRates> window) {
    if (window.empty()) {
        throw PreconditionError("cannot average an empty window of rates");
    }
    FactorValues mean{};
    for (const auto& r : window) {
        for (std::size_t i = 0; i < kFactorCount; ++i) {
            mean[i] += r.rates()[i];
        }
    }
    for (double& m : mean) {
        m /= static_cast<double>(window.size());
    }
    return SubstitutionRates(mean);
}

std::vector<double> crra_euler_oracle(double gamma, double beta, std::span<const double> gross_rates,
                                      double noise_sd, std::uint64_t seed) {
    if (gross_rates.empty()) {
        throw PreconditionError("rate path is empty");
    }
    if (gross_rates.size() < 8) {
        throw PreconditionError("rate path needs at least 8 entries");
    }
    if (!(gamma > 0.0) || !(beta > 0.0 && beta < 1.0) || !(noise_sd >= 0.0)) {
        throw PreconditionError("need gamma > 0, beta in (0, 1) and noise_sd >= 0");
    }
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double log_beta = std::log(beta);
    std::vector<double> growth;
    growth.reserve(gross_rates.size());
    for (double rate : gross_rates) {
        if (!(rate > 0.0)) {
            throw PreconditionError("gross rates must be positive");
        }
        const double eps = noise_sd > 0.0 ? noise_sd * noise(engine) : 0.0;
        growth.push_back((log_beta + std::log(rate)) / gamma + eps);
    }
    return growth;
}

OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
    const auto n = x.size();
    if (n != y.size() || n < 3) {
        throw PreconditionError("regression needs equal-length series of at least 3 points");
    }
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mean_x += x[k];
        mean_y += y[k];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (x[k] - mean_x) * (x[k] - mean_x);
        sxy += (x[k] - mean_x) * (y[k] - mean_y);
    }
    // Relative test: a constant regressor leaves only rounding noise in sxx.
    const double scale = std::max(1.0, mean_x * mean_x) * static_cast<double>(n);
    if (!(sxx > 1e-24 * scale)) {
        throw EstimationError("regressor has no variance; EIS is not identified");
    }

    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    double ssr = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double e = y[k] - fit.intercept - fit.slope * x[k];
        ssr += e * e;
    }
    fit.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    return fit;
}

EisEstimate estimate_eis(std::span<const double> growth, std::span<const double> gross_rates,
                         int folds) {
    if (growth.size() != gross_rates.size()) {
        throw PreconditionError("growth and rate series differ in length");
    }
    if (folds < 2) {
        throw PreconditionError("need at least 2 folds");
    }
    const auto n = growth.size();
    const auto k = static_cast<std::size_t>(folds);
    if (n < 8 * k) {
        throw PreconditionError("need at least " + std::to_string(8 * k) +
                                " observations for " + std::to_string(folds) + " folds, got " +
                                std::to_string(n));
    }
    std::vector<double> log_rate(n);
    for (std::size_t t = 0; t < n; ++t) {
        if (!(gross_rates[t] > 0.0)) {
            throw PreconditionError("gross rates must be positive");
        }
        log_rate[t] = std::log(gross_rates[t]);
    }

    const OlsFit full = ols_fit(log_rate, growth);
    EisEstimate est;
    est.point = full.slope;
    est.standard_error = full.slope_stderr;
    est.n_obs = static_cast<std::int64_t>(n);

    // Contiguous folds; the last one absorbs the remainder.
    const std::size_t width = n / k;
    const std::span<const double> xs(log_rate);
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t begin = f * width;
        const std::size_t len = f + 1 == k ? n - begin : width;
        est.fold_points.push_back(
            ols_fit(xs.subspan(begin, len), growth.subspan(begin, len)).slope);
    }
    const auto [lo, hi] = std::minmax_element(est.fold_points.begin(), est.fold_points.end());
    est.subsample_dispersion = *hi - *lo;
    return est;
}

} // namespace uiwd
