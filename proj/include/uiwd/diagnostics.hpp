#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uiwd/allocation.hpp"
#include "uiwd/scenario.hpp"

namespace uiwd {

/// An input that exhibits the probed property, with the evidence it produced.
struct Witness {
    std::string label;
    std::vector<double> inputs;
    double value = 0.0;

    bool operator==(const Witness&) const = default;
};

/// Outcome of a constructive probe. `passed` implies `evidence > threshold`,
/// except for probe_recursive on a memoryless policy, which passes on zero.
struct ProbeReport {
    std::string name;
    bool passed = false;
    double evidence = 0.0;
    double threshold = 0.0;
    std::vector<Witness> witnesses;

    bool operator==(const ProbeReport&) const = default;
};

/// Passing threshold of probe_nonadditive (max coordinate gap).
inline constexpr double kNonAdditiveThreshold = 1e-6;

/// Sign changes in the first differences of a series. Differences whose
/// magnitude is at most 1e-12 * max|series| count as flat and are skipped.
int count_sign_changes(std::span<const double> series);

/// Non-monotonicity along a wealth sweep.
///
/// evidence is the largest per-quantity sign-change count; passes with at
/// least one. One witness per quantity that changes direction: inputs are the
/// quantity's series along the curve, value is its sign-change count.
ProbeReport probe_nonmonotonic(std::span<const CurvePoint> curve);

/// max_f |q_f(w1) + q_f(w2) - q_f(w1 + w2)| with everything but period wealth fixed.
double nonadditive_gap(const AllocationRule& rule, const AgentState& state,
                       const PeriodContext& ctx, double w1, double w2);

/// Draws `samples` wealth pairs uniformly from [0.05 W, W], W = max(1, |w_t|),
/// with a generator seeded by `seed`. evidence is the largest gap; passes when
/// it exceeds kNonAdditiveThreshold. The witness holds the maximising pair.
/// Throws PreconditionError when samples < 1.
ProbeReport probe_nonadditive(const AllocationRule& rule, const AgentState& state,
                              const PeriodContext& ctx, int samples, std::uint64_t seed);

/// Largest change in the policy output when prior_alloc[factor] is raised by `perturbation`.
double recursive_response(const AllocationRule& rule, const AgentState& state,
                          const PeriodContext& ctx, FactorId factor, double perturbation);

/// Perturbs each factor of the prior allocation in turn. evidence is the largest
/// response. Passes when evidence > 0 if any persistence coefficient is
/// positive, and when evidence == 0 if all are zero. One witness per factor:
/// inputs {factor index, perturbation}.
ProbeReport probe_recursive(const AllocationPolicy& policy, const AgentState& state,
                            const PeriodContext& ctx, double perturbation);

/// JSON array of reports with fields name, passed, evidence, threshold,
/// witnesses[{label, inputs, value}].
std::string probes_to_json(std::span<const ProbeReport> reports);

} // namespace uiwd
