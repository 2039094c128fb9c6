#pragma once

// Hand-rolled generators and fixtures shared by the unit tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "uiwd/allocation.hpp"
#include "uiwd/core.hpp"

namespace uiwd::testing {

inline UnitPrices random_prices(std::mt19937_64& rng, double lo = 0.1, double hi = 10.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    UnitPrices p;
    for (auto& v : p.values) v = d(rng);
    return p;
}

inline FactorValues random_weights(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(0.01, 1.0);
    FactorValues w{};
    double sum = 0.0;
    for (auto& v : w) sum += (v = d(rng));
    for (auto& v : w) v /= sum;
    // Renormalise through the last entry so the sum is 1 to rounding.
    double head = 0.0;
    for (std::size_t k = 0; k + 1 < w.size(); ++k) head += w[k];
    w.back() = 1.0 - head;
    return w;
}

inline AllocationPolicy random_policy(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    AllocationPolicy p;
    p.base_weights = random_weights(rng);
    p.persistence = {unit(rng), unit(rng), unit(rng), unit(rng), unit(rng), unit(rng)};
    p.regret_weight = unit(rng);
    for (auto& k : p.curvature) k = 0.5 + 3.0 * unit(rng);
    p.signed_allocations = unit(rng) < 0.3;
    return p;
}

/// A budget-closed state whose current allocation splits `period_wealth` evenly.
inline AgentState closed_state(double period_wealth, const UnitPrices& prices,
                               const AllocationVector& prior = {}) {
    AgentState s;
    s.wealth = {10.0 * period_wealth, 10.0 * period_wealth, period_wealth};
    s.prices = prices;
    s.prior_alloc = prior;
    s.current_alloc = allocation_from_shares(
        {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6}, period_wealth, prices);
    s.period_index = 1;
    s.budget_closed = true;
    return s;
}

inline double rel_gap(double a, double b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) / scale;
}

} // namespace uiwd::testing
