#include "uiwd/savings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "uiwd/errors.hpp"

namespace uiwd {

double integrand(const SavingsProfile& p) noexcept {
    return p.pv_savings - p.pv_expected_uncovered - p.pv_unexpected - p.pv_inflation -
           p.instability_regret + p.pv_home_equity - p.pv_gov_support - p.pv_insurance;
}

ProfilePath ProfilePath::sample(double horizon, std::size_t intervals,
                                const std::function<SavingsProfile(double)>& profile_at) {
    if (intervals < kMinIntervals) {
        throw PreconditionError("profile grid needs at least 4 intervals");
    }
    std::vector<SavingsProfile> samples;
    samples.reserve(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k) {
        // Last point lands on the horizon exactly.
        const double t = k == intervals
                             ? horizon
                             : horizon * static_cast<double>(k) / static_cast<double>(intervals);
        samples.push_back(profile_at(t));
    }
    return ProfilePath(horizon, std::move(samples));
}

ProfilePath::ProfilePath(double horizon, std::vector<SavingsProfile> samples)
    : horizon_(horizon), samples_(std::move(samples)) {
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
        throw PreconditionError("profile horizon must be > 0");
    }
    if (samples_.size() < kMinIntervals + 1) {
        throw PreconditionError("profile grid step must be <= horizon / 4");
    }
    for (std::size_t k = 0; k < samples_.size(); ++k) {
        if (auto bad = validate_profile(samples_[k]); !bad.empty()) {
            throw PreconditionError("profile sample " + std::to_string(k) + ": " + to_string(bad));
        }
    }
}

double ProfilePath::integrand_at(double t) const {
    if (!(t >= 0.0 && t <= horizon_)) {
        throw PreconditionError("time outside [0, horizon]");
    }
    const double pos = t / grid_step();
    const auto lo = std::min(static_cast<std::size_t>(pos), samples_.size() - 2);
    const double frac = pos - static_cast<double>(lo);
    return (1.0 - frac) * integrand(samples_[lo]) + frac * integrand(samples_[lo + 1]);
}

double integrate(const ProfilePath& path) noexcept {
    const auto samples = path.samples();
    double inner = 0.0;
    for (std::size_t k = 1; k + 1 < samples.size(); ++k) {
        inner += integrand(samples[k]);
    }
    const double ends = 0.5 * (integrand(samples.front()) + integrand(samples.back()));
    return path.grid_step() * (ends + inner);
}

double savings_utility(const ProfilePath& path) noexcept {
    // Held above zero when the integral is so negative that exp underflows.
    return std::max(std::exp(integrate(path)), std::numeric_limits<double>::denorm_min());
}

} // namespace uiwd
