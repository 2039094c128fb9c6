#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "uiwd/config.hpp"
#include "uiwd/diagnostics.hpp"
#include "uiwd/scenario.hpp"
#include "uiwd/substitution.hpp"

namespace uiwd {

enum class Metric : std::uint8_t { Rates, Mrijs, Eis, SavingsUtility, Probes };

std::string_view metric_name(Metric m) noexcept;
/// Comma-separated list, e.g. "rates,mrijs,probes". Throws ConfigError on unknown names.
std::set<Metric> parse_metrics(std::string_view list);

/// Exit categories of the command-line runner.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitNumeric = 3,
    kExitIo = 4,
};

struct RunManifest {
    std::filesystem::path config_path;
    std::filesystem::path output_dir;
    std::set<Metric> metrics{Metric::Rates, Metric::Mrijs, Metric::Probes};
    bool metrics_defaulted = true;
    std::optional<std::uint64_t> seed_override;
};

/// File names written into the output directory.
inline constexpr std::string_view kTrajectoryFile = "trajectory.csv";
inline constexpr std::string_view kSummaryFile = "summary.txt";
inline constexpr std::string_view kProbesFile = "probes.json";
inline constexpr std::string_view kEisDemoFile = "eis_demo.txt";

/// Subsample dispersion above this fraction of |point| marks an EIS estimate unstable.
inline constexpr double kEisInstabilityRatio = 0.5;

/// The state and context the probes run against: the last period of agent 0,
/// with its predecessor's allocation as the prior. Context shocks are the
/// scenario's shocks, which the sweep maps onto its points.
struct ProbeBasis {
    AgentState state;
    PeriodContext ctx;
};
ProbeBasis probe_basis(const ScenarioConfig& config, const Trajectory& trajectory);

/// Non-monotonic, non-additive and recursive probes, in that order.
std::vector<ProbeReport> run_probes(const ExperimentConfig& config, const Trajectory& trajectory);

struct OracleCheck {
    double gamma = 0.0;
    EisEstimate estimate;
    double relative_error = 0.0;
};

struct EisDemoResult {
    std::vector<OracleCheck> oracle;
    EisEstimate uiwd;
    double dispersion_ratio = 0.0;
    bool unstable = false;
};

/// Oracle periods, noise and gammas used by the EIS demonstration.
inline constexpr std::size_t kOraclePeriods = 10000;
inline constexpr double kOracleNoise = 0.005;
inline constexpr double kOracleBeta = 0.96;
inline constexpr std::array<double, 4> kOracleGammas{0.5, 1.0, 2.0, 5.0};

/// Gross rates for the oracle: log R_t uniform on [-0.05, 0.05] minus log beta.
std::vector<double> oracle_rate_path(std::size_t periods, std::uint64_t seed);

/// Recovers 1/gamma from CRRA oracle data, then estimates EIS on the
/// scenario's simulated consumption and compares subsample dispersion with
/// kEisInstabilityRatio * |point|.
EisDemoResult eis_demo(const ExperimentConfig& config);

/// Executes a manifest: scenario, requested metrics, and the trajectory,
/// summary and probe files. Never throws; returns an ExitCode and writes a
/// one-line reason to `err` on failure.
int run(const RunManifest& manifest, std::ostream& log, std::ostream& err);

/// Probes only; writes probes.json.
int probe(const RunManifest& manifest, std::ostream& log, std::ostream& err);

/// EIS oracle-vs-simulation comparison; writes eis_demo.txt.
int eis_demo(const RunManifest& manifest, std::ostream& log, std::ostream& err);

} // namespace uiwd
