#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uiwd/savings.hpp"
#include "uiwd/scenario.hpp"

namespace uiwd {

struct EisSettings {
    int folds = 4;
};

struct ProbeSettings {
    int samples = 256;
    double perturbation = 1.0;
    /// Sweep bounds as multiples of the first record's period wealth.
    double sweep_low = 0.5;
    double sweep_high = 1.5;
    int sweep_steps = 21;
};

/// Linear ramp of the savings components between `start` and `end`.
struct SavingsSettings {
    double horizon = 30.0;
    std::size_t intervals = ProfilePath::kDefaultIntervals;
    SavingsProfile start;
    SavingsProfile end;

    ProfilePath path() const;
};

/// Everything a scenario file can hold.
struct ExperimentConfig {
    ScenarioConfig scenario;
    EisSettings eis;
    ProbeSettings probes;
    SavingsSettings savings;
    /// "key = value" for every field the file left at its default, in schema order.
    std::vector<std::string> defaulted;
};

/// Parses a scenario document (JSON).
///
/// Top-level keys: agents, periods, seed, threads, policy, prices, wealth,
/// shocks, rates, eis, probes, savings. Unknown keys are errors. Throws
/// ConfigError with "line N" for syntax errors and a dotted field path for
/// type or validation errors.
ExperimentConfig parse_experiment(std::string_view text);

/// Reads and parses a scenario file. Throws ConfigError if it cannot be read.
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// The scenario part of load_experiment.
ScenarioConfig load_config(const std::filesystem::path& path);

} // namespace uiwd
