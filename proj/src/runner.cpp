#include "uiwd/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "uiwd/errors.hpp"
#include "uiwd/savings.hpp"

namespace uiwd {

namespace {

std::string num(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

// Linear interpolation between order statistics.
double quantile(std::vector<double> sorted, double q) {
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

ExperimentConfig load_with_override(const RunManifest& manifest) {
    ExperimentConfig config = load_experiment(manifest.config_path);
    if (manifest.seed_override) {
        config.scenario.seed = *manifest.seed_override;
        std::erase_if(config.defaulted, [](const std::string& s) { return s.starts_with("seed ="); });
    }
    return config;
}

void prepare_output(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir.string());
    }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << content;
    out.flush();
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

void require_eis_length(const ExperimentConfig& config) {
    const auto needed = static_cast<std::int64_t>(8 * config.eis.folds);
    const std::int64_t available = config.scenario.n_periods - 1;
    if (available < needed) {
        throw ConfigError("eis", "series too short: " + std::to_string(available) +
                                     " growth observations, need " + std::to_string(needed) +
                                     " for " + std::to_string(config.eis.folds) + " folds");
    }
}

void append_probe_lines(std::ostringstream& out, const std::vector<ProbeReport>& reports) {
    for (const auto& r : reports) {
        out << "probes." << r.name << ".passed = " << (r.passed ? "true" : "false") << '\n';
        out << "probes." << r.name << ".evidence = " << num(r.evidence) << '\n';
    }
}

} // namespace

std::string_view metric_name(Metric m) noexcept {
    switch (m) {
    case Metric::Rates: return "rates";
    case Metric::Mrijs: return "mrijs";
    case Metric::Eis: return "eis";
    case Metric::SavingsUtility: return "savings-utility";
    case Metric::Probes: return "probes";
    }
    return "unknown";
}

std::set<Metric> parse_metrics(std::string_view list) {
    std::set<Metric> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const auto comma = std::min(list.find(',', pos), list.size());
        const auto item = list.substr(pos, comma - pos);
        bool known = false;
        for (Metric m : {Metric::Rates, Metric::Mrijs, Metric::Eis, Metric::SavingsUtility,
                         Metric::Probes}) {
            if (item == metric_name(m)) {
                out.insert(m);
                known = true;
            }
        }
        if (!known) {
            throw ConfigError("--metrics", "unknown metric '" + std::string(item) + "'");
        }
        pos = comma + 1;
    }
    if (out.empty()) {
        throw ConfigError("--metrics", "at least one metric is required");
    }
    return out;
}

ProbeBasis probe_basis(const ScenarioConfig& config, const Trajectory& trajectory) {
    const TrajectoryRecord& last = trajectory.at(0, trajectory.n_periods);
    ProbeBasis basis;
    basis.state.wealth = last.wealth;
    basis.state.prices = last.prices;
    basis.state.current_alloc = last.allocation;
    basis.state.regret_memory = last.regret_memory;
    basis.state.period_index = last.period;
    basis.state.budget_closed = true;
    if (trajectory.n_periods >= 2) {
        basis.state.prior_alloc = trajectory.at(0, trajectory.n_periods - 1).allocation;
    }
    basis.ctx = {last.prices, last.wealth.period, config.shocks};
    return basis;
}

std::vector<ProbeReport> run_probes(const ExperimentConfig& config, const Trajectory& trajectory) {
    const ScenarioConfig& sc = config.scenario;
    const ProbeSettings& ps = config.probes;
    const ProbeBasis basis = probe_basis(sc, trajectory);
    const AllocationRule rule = reference_rule(sc.policy);
    const double w = basis.ctx.period_wealth;

    std::vector<ProbeReport> reports;
    const auto curve = sweep_wealth(rule, basis.state, basis.ctx, ps.sweep_low * w,
                                    ps.sweep_high * w, ps.sweep_steps);
    reports.push_back(probe_nonmonotonic(curve));
    PeriodContext plain = basis.ctx;
    plain.shocks.clear();
    reports.push_back(probe_nonadditive(rule, basis.state, plain, ps.samples, sc.seed));
    reports.push_back(probe_recursive(sc.policy, basis.state, plain, ps.perturbation));
    return reports;
}

std::vector<double> oracle_rate_path(std::size_t periods, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> draw(-0.05, 0.05);
    std::vector<double> rates(periods);
    for (double& r : rates) {
        r = std::exp(draw(engine) - std::log(kOracleBeta));
    }
    return rates;
}

EisDemoResult eis_demo(const ExperimentConfig& config) {
    require_eis_length(config);
    EisDemoResult result;
    const auto rates = oracle_rate_path(kOraclePeriods, config.scenario.seed);
    std::uint64_t stream = 1;
    for (double gamma : kOracleGammas) {
        const auto growth =
            crra_euler_oracle(gamma, kOracleBeta, rates, kOracleNoise, config.scenario.seed + stream++);
        OracleCheck check;
        check.gamma = gamma;
        check.estimate = estimate_eis(growth, rates, config.eis.folds);
        check.relative_error = std::abs(check.estimate.point * gamma - 1.0);
        result.oracle.push_back(std::move(check));
    }

    const Trajectory trajectory = run_scenario(config.scenario);
    const EisSeries series = eis_series(trajectory, config.scenario);
    result.uiwd = estimate_eis(series.growth, series.gross_rates, config.eis.folds);
    result.dispersion_ratio =
        result.uiwd.point != 0.0 ? result.uiwd.subsample_dispersion / std::abs(result.uiwd.point)
                                 : std::numeric_limits<double>::infinity();
    result.unstable = result.uiwd.subsample_dispersion > kEisInstabilityRatio * std::abs(result.uiwd.point);
    return result;
}

int run(const RunManifest& manifest, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        ExperimentConfig config = load_with_override(manifest);
        const auto& metrics = manifest.metrics;
        if (metrics.empty()) {
            throw ConfigError("--metrics", "at least one metric is required");
        }
        if (metrics.count(Metric::Eis)) {
            require_eis_length(config);
        }
        prepare_output(manifest.output_dir);

        ScenarioConfig& sc = config.scenario;
        sc.record_rates = metrics.count(Metric::Rates) || metrics.count(Metric::Mrijs);
        const Trajectory trajectory = run_scenario(sc);

        std::ostringstream summary;
        summary << "# uiwd metrics summary\n";
        if (manifest.metrics_defaulted) {
            summary << "# defaulted: metrics = rates,mrijs,probes\n";
        }
        for (const auto& d : config.defaulted) {
            summary << "# defaulted: " << d << '\n';
        }
        summary << "agents = " << sc.n_agents << '\n';
        summary << "periods = " << sc.n_periods << '\n';
        summary << "seed = " << sc.seed << (manifest.seed_override ? " (override)" : "") << '\n';
        summary << "threads = " << sc.threads << '\n';
        summary << "metrics = ";
        bool first = true;
        for (Metric m : metrics) {
            summary << (first ? "" : ",") << metric_name(m);
            first = false;
        }
        summary << '\n';
        summary << "records = " << trajectory.records.size() << '\n';

        double worst_gap = 0.0;
        for (const auto& rec : trajectory.records) {
            const double gap = std::abs(allocation_cost(rec.allocation, rec.prices) - rec.wealth.period) /
                               std::max(1.0, std::abs(rec.wealth.period));
            if (!std::isfinite(gap)) {
                throw Error("non-finite allocation in agent " + std::to_string(rec.agent_id));
            }
            worst_gap = std::max(worst_gap, gap);
        }
        summary << "budget.max_relative_gap = " << num(worst_gap) << '\n';

        if (metrics.count(Metric::Rates)) {
            for (std::int64_t a = 0; a < trajectory.n_agents; ++a) {
                std::vector<SubstitutionRates> window;
                for (std::int64_t t = 1; t <= trajectory.n_periods; ++t) {
                    window.push_back(*trajectory.at(a, t).rates);
                }
                const SubstitutionRates mean = average_rates(window);
                const std::string key = "rates.agent_" + std::to_string(a) + ".";
                for (FactorId f : kAllFactors) {
                    summary << key << price_symbol(f) << "_star = " << num(mean[f]) << '\n';
                }
                summary << key << "mrijs = " << num(mean.mrijs()) << '\n';
            }
        }
        if (metrics.count(Metric::Mrijs)) {
            std::vector<double> values;
            for (const auto& rec : trajectory.records) {
                values.push_back(rec.rates->mrijs());
            }
            for (auto [label, q] : {std::pair{"min", 0.0}, {"q05", 0.05}, {"q25", 0.25},
                                    {"median", 0.5}, {"q75", 0.75}, {"q95", 0.95}, {"max", 1.0}}) {
                summary << "mrijs." << label << " = " << num(quantile(values, q)) << '\n';
            }
        }
        if (metrics.count(Metric::Eis)) {
            const EisSeries series = eis_series(trajectory, sc);
            const EisEstimate est = estimate_eis(series.growth, series.gross_rates, config.eis.folds);
            summary << "eis.point = " << num(est.point) << '\n';
            summary << "eis.stderr = " << num(est.standard_error) << '\n';
            summary << "eis.subsample_dispersion = " << num(est.subsample_dispersion) << '\n';
            summary << "eis.n_obs = " << est.n_obs << '\n';
            summary << "eis.folds = " << config.eis.folds << '\n';
        }
        if (metrics.count(Metric::SavingsUtility)) {
            const ProfilePath path = config.savings.path();
            summary << "savings.integral = " << num(integrate(path)) << '\n';
            summary << "savings.utility = " << num(savings_utility(path)) << '\n';
        }

        std::vector<ProbeReport> reports;
        if (metrics.count(Metric::Probes)) {
            reports = run_probes(config, trajectory);
            append_probe_lines(summary, reports);
        }

        std::ostringstream csv;
        write_trajectory_csv(csv, trajectory);
        write_file(manifest.output_dir / kTrajectoryFile, csv.str());
        write_file(manifest.output_dir / kSummaryFile, summary.str());
        if (metrics.count(Metric::Probes)) {
            write_file(manifest.output_dir / kProbesFile, probes_to_json(reports));
        }
        log << "wrote " << trajectory.records.size() << " records to "
            << (manifest.output_dir / kTrajectoryFile).string() << '\n';
        return static_cast<int>(kExitOk);
    });
}

int probe(const RunManifest& manifest, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        const ExperimentConfig config = load_with_override(manifest);
        prepare_output(manifest.output_dir);
        const Trajectory trajectory = run_scenario(config.scenario);
        const auto reports = run_probes(config, trajectory);
        write_file(manifest.output_dir / kProbesFile, probes_to_json(reports));
        for (const auto& r : reports) {
            log << r.name << ": " << (r.passed ? "PASS" : "FAIL") << " evidence=" << num(r.evidence)
                << '\n';
        }
        return static_cast<int>(kExitOk);
    });
}

int eis_demo(const RunManifest& manifest, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        const ExperimentConfig config = load_with_override(manifest);
        prepare_output(manifest.output_dir);
        const EisDemoResult result = eis_demo(config);

        std::ostringstream out;
        out << "# uiwd EIS demonstration\n";
        out << "oracle.periods = " << kOraclePeriods << '\n';
        out << "oracle.noise_sd = " << num(kOracleNoise) << '\n';
        for (const auto& c : result.oracle) {
            const std::string key = "oracle.gamma_" + num(c.gamma) + ".";
            out << key << "true_eis = " << num(1.0 / c.gamma) << '\n';
            out << key << "point = " << num(c.estimate.point) << '\n';
            out << key << "relative_error = " << num(c.relative_error) << '\n';
            out << key << "subsample_dispersion = " << num(c.estimate.subsample_dispersion) << '\n';
        }
        out << "uiwd.point = " << num(result.uiwd.point) << '\n';
        out << "uiwd.stderr = " << num(result.uiwd.standard_error) << '\n';
        out << "uiwd.n_obs = " << result.uiwd.n_obs << '\n';
        for (std::size_t k = 0; k < result.uiwd.fold_points.size(); ++k) {
            out << "uiwd.fold_" << k + 1 << " = " << num(result.uiwd.fold_points[k]) << '\n';
        }
        out << "uiwd.subsample_dispersion = " << num(result.uiwd.subsample_dispersion) << '\n';
        out << "uiwd.dispersion_ratio = " << num(result.dispersion_ratio) << '\n';
        out << "uiwd.instability_threshold = " << num(kEisInstabilityRatio) << '\n';
        out << "uiwd.unstable = " << (result.unstable ? "true" : "false") << '\n';
        write_file(manifest.output_dir / kEisDemoFile, out.str());
        log << out.str();
        return static_cast<int>(kExitOk);
    });
}

} // namespace uiwd
