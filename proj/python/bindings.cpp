#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "uiwd/allocation.hpp"
#include "uiwd/config.hpp"
#include "uiwd/core.hpp"
#include "uiwd/diagnostics.hpp"
#include "uiwd/errors.hpp"
#include "uiwd/runner.hpp"
#include "uiwd/savings.hpp"
#include "uiwd/scenario.hpp"
#include "uiwd/substitution.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace uiwd;

namespace {

template <class T>
void bind_factor_values(py::module_& m, const char* name) {
    py::class_<T>(m, name)
        .def(py::init<>())
        .def(py::init([](const FactorValues& v) { return T{v}; }), py::arg("values"))
        .def_readwrite("values", &T::values)
        .def("__getitem__", [](const T& self, FactorId f) { return self[f]; })
        .def("__setitem__", [](T& self, FactorId f, double v) { self[f] = v; })
        .def("__len__", [](const T&) { return kFactorCount; })
        .def("__eq__", [](const T& a, const T& b) { return a == b; })
        .def("__repr__", [name](const T& self) {
            std::ostringstream out;
            out << name << "([";
            for (std::size_t i = 0; i < kFactorCount; ++i) {
                out << (i ? ", " : "") << self.values[i];
            }
            out << "])";
            return out.str();
        });
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Six-factor intertemporal wealth-allocation model: allocation engine, "
              "substitution rates, savings utility, scenarios and property probes.";

    py::register_exception<Error>(m, "Error");
    py::register_exception<DegenerateBudgetError>(m, "DegenerateBudgetError", m.attr("Error"));
    py::register_exception<PreconditionError>(m, "PreconditionError", m.attr("Error"));
    py::register_exception<EstimationError>(m, "EstimationError", m.attr("Error"));
    py::register_exception<ConfigError>(m, "ConfigError", m.attr("Error"));

    py::enum_<FactorId>(m, "FactorId")
        .value("Consumption", FactorId::Consumption)
        .value("Taxes", FactorId::Taxes)
        .value("Investment", FactorId::Investment)
        .value("Leisure", FactorId::Leisure)
        .value("Intangibles", FactorId::Intangibles)
        .value("Housing", FactorId::Housing);
    m.attr("ALL_FACTORS") = py::cast(std::vector<FactorId>(kAllFactors.begin(), kAllFactors.end()));

    bind_factor_values<UnitPrices>(m, "UnitPrices");
    bind_factor_values<AllocationVector>(m, "AllocationVector");

    py::class_<Wealth>(m, "Wealth")
        .def(py::init<>())
        .def(py::init([](double total, double investable, double period) {
                 return Wealth{total, investable, period};
             }),
             py::arg("total"), py::arg("investable"), py::arg("period"))
        .def_readwrite("total", &Wealth::total)
        .def_readwrite("investable", &Wealth::investable)
        .def_readwrite("period", &Wealth::period);

    py::class_<RecursionCoefficients>(m, "RecursionCoefficients")
        .def(py::init<>())
        .def_static("uniform", &RecursionCoefficients::uniform)
        .def_readwrite("a", &RecursionCoefficients::a)
        .def_readwrite("b", &RecursionCoefficients::b)
        .def_readwrite("d", &RecursionCoefficients::d)
        .def_readwrite("e", &RecursionCoefficients::e)
        .def_readwrite("j", &RecursionCoefficients::j)
        .def_readwrite("k", &RecursionCoefficients::k);

    py::class_<AgentState>(m, "AgentState")
        .def(py::init<>())
        .def_readwrite("wealth", &AgentState::wealth)
        .def_readwrite("prices", &AgentState::prices)
        .def_readwrite("current_alloc", &AgentState::current_alloc)
        .def_readwrite("prior_alloc", &AgentState::prior_alloc)
        .def_readwrite("regret_memory", &AgentState::regret_memory)
        .def_readwrite("period_index", &AgentState::period_index)
        .def_readwrite("budget_closed", &AgentState::budget_closed);

    py::class_<Violation>(m, "Violation")
        .def_readonly("field", &Violation::field)
        .def_readonly("invariant", &Violation::invariant)
        .def("__repr__", [](const Violation& v) { return v.field + ": " + v.invariant; });
    m.def("validate_state", &validate_state, py::arg("state"));

    py::class_<AllocationPolicy>(m, "AllocationPolicy")
        .def(py::init<>())
        .def_readwrite("base_weights", &AllocationPolicy::base_weights)
        .def_readwrite("persistence", &AllocationPolicy::persistence)
        .def_readwrite("regret_weight", &AllocationPolicy::regret_weight)
        .def_readwrite("curvature", &AllocationPolicy::curvature)
        .def_readwrite("signed_allocations", &AllocationPolicy::signed_allocations);

    py::enum_<ShockKind>(m, "ShockKind")
        .value("income_loss", ShockKind::IncomeLoss)
        .value("price_jump", ShockKind::PriceJump)
        .value("health_event", ShockKind::HealthEvent)
        .value("layoff", ShockKind::Layoff);

    py::class_<Shock>(m, "Shock")
        .def(py::init<>())
        .def(py::init([](ShockKind kind, std::optional<FactorId> target, double magnitude,
                         std::int64_t period) { return Shock{kind, target, magnitude, period}; }),
             py::arg("kind"), py::arg("target"), py::arg("magnitude"), py::arg("period"))
        .def_readwrite("kind", &Shock::kind)
        .def_readwrite("target", &Shock::target)
        .def_readwrite("magnitude", &Shock::magnitude)
        .def_readwrite("period", &Shock::period);
    m.def("apply_shock", &apply_shock, py::arg("state"), py::arg("shock"));

    py::class_<PeriodContext>(m, "PeriodContext")
        .def(py::init<>())
        .def(py::init([](UnitPrices prices, double period_wealth, std::vector<Shock> shocks) {
                 return PeriodContext{prices, period_wealth, std::move(shocks)};
             }),
             py::arg("prices"), py::arg("period_wealth"), py::arg("shocks") = std::vector<Shock>{})
        .def_readwrite("prices", &PeriodContext::prices)
        .def_readwrite("period_wealth", &PeriodContext::period_wealth)
        .def_readwrite("shocks", &PeriodContext::shocks);

    m.def("allocation_cost", &allocation_cost, py::arg("alloc"), py::arg("prices"));
    m.def("budget_residual", &budget_residual, py::arg("target"), py::arg("wealth_period"),
          py::arg("prices"), py::arg("alloc"));
    m.def("apply_policy", &apply_policy, py::arg("policy"), py::arg("state"), py::arg("ctx"));
    m.def("regret_penalty", &regret_penalty, py::arg("chosen"), py::arg("best_expost"),
          py::arg("prices"));
    m.def(
        "step_recursion",
        [](const AllocationPolicy& policy, const AgentState& state, const Wealth& next_wealth,
           const UnitPrices& next_prices, const std::vector<Shock>& shocks) {
            return step_recursion(policy, state, next_wealth, next_prices, shocks);
        },
        py::arg("policy"), py::arg("state"), py::arg("next_wealth"), py::arg("next_prices"),
        py::arg("shocks") = std::vector<Shock>{});
    m.def("reference_rule", &reference_rule, py::arg("policy"));
    m.def("linear_rule", &linear_rule, py::arg("shares"));

    py::enum_<BumpScheme>(m, "BumpScheme")
        .value("central", BumpScheme::Central)
        .value("forward", BumpScheme::Forward);
    py::class_<BumpSpec>(m, "BumpSpec")
        .def(py::init<>())
        .def(py::init([](double step, BumpScheme scheme) { return BumpSpec{step, scheme}; }),
             py::arg("relative_step") = 1e-4, py::arg("scheme") = BumpScheme::Central)
        .def_readwrite("relative_step", &BumpSpec::relative_step)
        .def_readwrite("scheme", &BumpSpec::scheme);

    py::class_<SubstitutionRates>(m, "SubstitutionRates")
        .def(py::init<const FactorValues&>(), py::arg("rates"))
        .def_property_readonly("rates", &SubstitutionRates::rates)
        .def_property_readonly("c_star", &SubstitutionRates::c_star)
        .def_property_readonly("t_star", &SubstitutionRates::t_star)
        .def_property_readonly("i_star", &SubstitutionRates::i_star)
        .def_property_readonly("l_star", &SubstitutionRates::l_star)
        .def_property_readonly("b_star", &SubstitutionRates::b_star)
        .def_property_readonly("h_star", &SubstitutionRates::h_star)
        .def_property_readonly("mrijs", &SubstitutionRates::mrijs);
    m.def("mrijs_from_sum", &mrijs_from_sum, py::arg("rate_sum"));

    // Accepts either an AllocationPolicy or any callable (state, ctx) -> AllocationVector.
    m.def("marginal_rate",
          py::overload_cast<FactorId, const AllocationPolicy&, const AgentState&,
                            const PeriodContext&, const BumpSpec&>(&marginal_rate),
          py::arg("factor"), py::arg("policy"), py::arg("state"), py::arg("ctx"),
          py::arg("bump") = BumpSpec{});
    m.def("marginal_rate",
          py::overload_cast<FactorId, const AllocationRule&, const AgentState&,
                            const PeriodContext&, const BumpSpec&>(&marginal_rate),
          py::arg("factor"), py::arg("rule"), py::arg("state"), py::arg("ctx"),
          py::arg("bump") = BumpSpec{});
    m.def("all_rates",
          py::overload_cast<const AllocationPolicy&, const AgentState&, const PeriodContext&,
                            const BumpSpec&>(&all_rates),
          py::arg("policy"), py::arg("state"), py::arg("ctx"), py::arg("bump") = BumpSpec{});
    m.def("all_rates",
          py::overload_cast<const AllocationRule&, const AgentState&, const PeriodContext&,
                            const BumpSpec&>(&all_rates),
          py::arg("rule"), py::arg("state"), py::arg("ctx"), py::arg("bump") = BumpSpec{});

    py::class_<EisEstimate>(m, "EisEstimate")
        .def_readonly("point", &EisEstimate::point)
        .def_readonly("stderr", &EisEstimate::standard_error)
        .def_readonly("subsample_dispersion", &EisEstimate::subsample_dispersion)
        .def_readonly("n_obs", &EisEstimate::n_obs)
        .def_readonly("fold_points", &EisEstimate::fold_points);
    m.def(
        "crra_euler_oracle",
        [](double gamma, double beta, const std::vector<double>& rates, double noise_sd,
           std::uint64_t seed) { return crra_euler_oracle(gamma, beta, rates, noise_sd, seed); },
        py::arg("gamma"), py::arg("beta"), py::arg("rate_path"), py::arg("noise_sd"),
        py::arg("seed"));
    m.def(
        "estimate_eis",
        [](const std::vector<double>& growth, const std::vector<double>& rates, int folds) {
            return estimate_eis(growth, rates, folds);
        },
        py::arg("growth"), py::arg("rate_path"), py::arg("folds"));

    py::class_<SavingsProfile>(m, "SavingsProfile")
        .def(py::init<>())
        .def_readwrite("pv_savings", &SavingsProfile::pv_savings)
        .def_readwrite("pv_expected_uncovered", &SavingsProfile::pv_expected_uncovered)
        .def_readwrite("pv_unexpected", &SavingsProfile::pv_unexpected)
        .def_readwrite("pv_inflation", &SavingsProfile::pv_inflation)
        .def_readwrite("instability_regret", &SavingsProfile::instability_regret)
        .def_readwrite("pv_home_equity", &SavingsProfile::pv_home_equity)
        .def_readwrite("pv_gov_support", &SavingsProfile::pv_gov_support)
        .def_readwrite("pv_insurance", &SavingsProfile::pv_insurance)
        .def_readwrite("horizon_years", &SavingsProfile::horizon_years)
        .def_readwrite("discount_rate", &SavingsProfile::discount_rate);
    py::class_<ProfilePath>(m, "ProfilePath")
        .def(py::init<double, std::vector<SavingsProfile>>(), py::arg("horizon"), py::arg("samples"))
        .def_static("sample", &ProfilePath::sample, py::arg("horizon"), py::arg("intervals"),
                    py::arg("profile_at"))
        .def_property_readonly("horizon", &ProfilePath::horizon)
        .def_property_readonly("grid_step", &ProfilePath::grid_step);
    m.def("integrand", &integrand, py::arg("profile"));
    m.def("savings_utility", &savings_utility, py::arg("path"));

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("n_agents", &ScenarioConfig::n_agents)
        .def_readwrite("n_periods", &ScenarioConfig::n_periods)
        .def_readwrite("policy", &ScenarioConfig::policy)
        .def_readwrite("shocks", &ScenarioConfig::shocks)
        .def_readwrite("seed", &ScenarioConfig::seed)
        .def_readwrite("threads", &ScenarioConfig::threads)
        .def_readwrite("record_rates", &ScenarioConfig::record_rates);
    py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
        .def_readonly("agent_id", &TrajectoryRecord::agent_id)
        .def_readonly("period", &TrajectoryRecord::period)
        .def_readonly("wealth", &TrajectoryRecord::wealth)
        .def_readonly("prices", &TrajectoryRecord::prices)
        .def_readonly("allocation", &TrajectoryRecord::allocation)
        .def_readonly("regret_memory", &TrajectoryRecord::regret_memory)
        .def_readonly("rates", &TrajectoryRecord::rates);
    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("n_agents", &Trajectory::n_agents)
        .def_readonly("n_periods", &Trajectory::n_periods)
        .def_readonly("records", &Trajectory::records)
        .def("to_csv", [](const Trajectory& t) {
            std::ostringstream out;
            write_trajectory_csv(out, t);
            return out.str();
        });
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def_readwrite("scenario", &ExperimentConfig::scenario)
        .def_readonly("defaulted", &ExperimentConfig::defaulted);
    m.def("parse_experiment", &parse_experiment, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));
    m.def("run_scenario", &run_scenario, py::arg("config"));

    py::class_<CurvePoint>(m, "CurvePoint")
        .def_readonly("wealth", &CurvePoint::wealth)
        .def_readonly("allocation", &CurvePoint::allocation);
    m.def("sweep_wealth", &sweep_wealth, py::arg("rule"), py::arg("state"), py::arg("ctx"),
          py::arg("w_min"), py::arg("w_max"), py::arg("steps"));

    py::class_<Witness>(m, "Witness")
        .def_readonly("label", &Witness::label)
        .def_readonly("inputs", &Witness::inputs)
        .def_readonly("value", &Witness::value);
    py::class_<ProbeReport>(m, "ProbeReport")
        .def_readonly("name", &ProbeReport::name)
        .def_readonly("passed", &ProbeReport::passed)
        .def_readonly("evidence", &ProbeReport::evidence)
        .def_readonly("threshold", &ProbeReport::threshold)
        .def_readonly("witnesses", &ProbeReport::witnesses);
    m.def(
        "probe_nonmonotonic",
        [](const std::vector<CurvePoint>& curve) { return probe_nonmonotonic(curve); },
        py::arg("curve"));
    m.def("probe_nonadditive", &probe_nonadditive, py::arg("rule"), py::arg("state"),
          py::arg("ctx"), py::arg("samples"), py::arg("seed"));
    m.def("probe_recursive", &probe_recursive, py::arg("policy"), py::arg("state"),
          py::arg("ctx"), py::arg("perturbation"));

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
