#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "uiwd/core.hpp"

namespace uiwd {

/// I_s - X_e - X_u - X_i - L_r + V_h - I_g - I_i.
double integrand(const SavingsProfile& profile) noexcept;

/// A savings profile sampled on a uniform grid over [0, horizon], linear
/// between grid points.
class ProfilePath {
public:
    /// Default grid: horizon / 1000.
    static constexpr std::size_t kDefaultIntervals = 1000;
    /// Coarsest grid allowed: step <= horizon / 4.
    static constexpr std::size_t kMinIntervals = 4;

    /// Samples `profile_at(t)` at `intervals + 1` evenly spaced times.
    static ProfilePath sample(double horizon, std::size_t intervals,
                              const std::function<SavingsProfile(double)>& profile_at);

    /// Takes ownership of grid samples; samples[k] sits at t = k * horizon / (n - 1).
    ProfilePath(double horizon, std::vector<SavingsProfile> samples);

    double horizon() const noexcept { return horizon_; }
    double grid_step() const noexcept { return horizon_ / static_cast<double>(samples_.size() - 1); }
    std::span<const SavingsProfile> samples() const noexcept { return samples_; }

    /// Linear interpolation of the integrand at time t in [0, horizon].
    double integrand_at(double t) const;

private:
    double horizon_;
    std::vector<SavingsProfile> samples_;
};

/// Trapezoid rule for the integrand over the path's grid. Exact for a path
/// that is linear between grid points.
double integrate(const ProfilePath& path) noexcept;

/// exp of the integrated integrand; always > 0 for a finite path.
double savings_utility(const ProfilePath& path) noexcept;

} // namespace uiwd
