#include "uiwd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "uiwd/errors.hpp"

namespace uiwd {

int count_sign_changes(std::span<const double> series) {
    double scale = 0.0;
    for (double v : series) {
        scale = std::max(scale, std::abs(v));
    }
    const double flat = 1e-12 * scale;
    int changes = 0;
    int last_sign = 0;
    for (std::size_t k = 1; k < series.size(); ++k) {
        const double d = series[k] - series[k - 1];
        if (std::abs(d) <= flat) {
            continue;
        }
        const int sign = d > 0.0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) {
            ++changes;
        }
        last_sign = sign;
    }
    return changes;
}

ProbeReport probe_nonmonotonic(std::span<const CurvePoint> curve) {
    if (curve.size() < 3) {
        throw PreconditionError("monotonicity probe needs at least 3 curve points");
    }
    ProbeReport report;
    report.name = "nonmonotonic";
    report.threshold = 0.0;
    for (FactorId f : kAllFactors) {
        std::vector<double> series;
        series.reserve(curve.size());
        for (const auto& p : curve) {
            series.push_back(p.allocation[f]);
        }
        const int changes = count_sign_changes(series);
        if (changes > 0) {
            report.witnesses.push_back(
                {"quantity " + std::string(quantity_symbol(f)), std::move(series),
                 static_cast<double>(changes)});
        }
        report.evidence = std::max(report.evidence, static_cast<double>(changes));
    }
    std::stable_sort(report.witnesses.begin(), report.witnesses.end(),
                     [](const Witness& a, const Witness& b) { return a.value > b.value; });
    report.passed = report.evidence >= 1.0;
    return report;
}

double nonadditive_gap(const AllocationRule& rule, const AgentState& state,
                       const PeriodContext& ctx, double w1, double w2) {
    auto at = [&](double w) {
        PeriodContext c = ctx;
        c.period_wealth = w;
        return rule(state, c);
    };
    const AllocationVector a = at(w1);
    const AllocationVector b = at(w2);
    const AllocationVector joint = at(w1 + w2);
    double gap = 0.0;
    for (std::size_t i = 0; i < kFactorCount; ++i) {
        gap = std::max(gap, std::abs(a.values[i] + b.values[i] - joint.values[i]));
    }
    return gap;
}

ProbeReport probe_nonadditive(const AllocationRule& rule, const AgentState& state,
                              const PeriodContext& ctx, int samples, std::uint64_t seed) {
    if (samples < 1) {
        throw PreconditionError("non-additivity probe needs samples >= 1");
    }
    const double scale = std::max(1.0, std::abs(ctx.period_wealth));
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> draw(0.05 * scale, scale);

    ProbeReport report;
    report.name = "nonadditive";
    report.threshold = kNonAdditiveThreshold;
    Witness best{"w1,w2", {}, -1.0};
    for (int k = 0; k < samples; ++k) {
        const double w1 = draw(engine);
        const double w2 = draw(engine);
        const double gap = nonadditive_gap(rule, state, ctx, w1, w2);
        if (gap > best.value) {
            best = {"w1,w2", {w1, w2}, gap};
        }
    }
    report.evidence = best.value;
    report.passed = report.evidence > report.threshold;
    report.witnesses.push_back(std::move(best));
    return report;
}

double recursive_response(const AllocationRule& rule, const AgentState& state,
                          const PeriodContext& ctx, FactorId factor, double perturbation) {
    const AllocationVector base = rule(state, ctx);
    AgentState bumped = state;
    bumped.prior_alloc[factor] += perturbation;
    const AllocationVector moved = rule(bumped, ctx);
    double change = 0.0;
    for (std::size_t i = 0; i < kFactorCount; ++i) {
        change = std::max(change, std::abs(moved.values[i] - base.values[i]));
    }
    return change;
}

ProbeReport probe_recursive(const AllocationPolicy& policy, const AgentState& state,
                            const PeriodContext& ctx, double perturbation) {
    if (!(perturbation >= 0.0) || !std::isfinite(perturbation)) {
        throw PreconditionError("perturbation must be finite and >= 0");
    }
    if (state.budget_closed &&
        !is_budget_closed(state.current_alloc, state.prices, state.wealth.period)) {
        throw PreconditionError("recursivity probe needs a budget-closed state");
    }
    const AllocationRule rule = reference_rule(policy);
    ProbeReport report;
    report.name = "recursive";
    report.threshold = 0.0;
    for (FactorId f : kAllFactors) {
        const double response = recursive_response(rule, state, ctx, f, perturbation);
        report.witnesses.push_back({"prior " + std::string(quantity_symbol(f)),
                                    {static_cast<double>(index_of(f)), perturbation},
                                    response});
        report.evidence = std::max(report.evidence, response);
    }
    const bool has_memory = std::any_of(kAllFactors.begin(), kAllFactors.end(), [&](FactorId f) {
        return policy.persistence.of(f) != 0.0;
    });
    report.passed = has_memory ? report.evidence > 0.0 : report.evidence == 0.0;
    return report;
}

std::string probes_to_json(std::span<const ProbeReport> reports) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json witnesses = nlohmann::ordered_json::array();
        for (const auto& w : r.witnesses) {
            witnesses.push_back({{"label", w.label}, {"inputs", w.inputs}, {"value", w.value}});
        }
        out.push_back({{"name", r.name},
                       {"passed", r.passed},
                       {"evidence", r.evidence},
                       {"threshold", r.threshold},
                       {"witnesses", std::move(witnesses)}});
    }
    return out.dump(2) + "\n";
}

} // namespace uiwd
