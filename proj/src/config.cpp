#include "uiwd/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "uiwd/errors.hpp"

namespace uiwd {

using nlohmann::json;

namespace {

std::string number_text(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string value_text(double v) { return number_text(v); }
std::string value_text(std::int64_t v) { return std::to_string(v); }
std::string value_text(std::uint64_t v) { return std::to_string(v); }
std::string value_text(int v) { return std::to_string(v); }
std::string value_text(unsigned v) { return std::to_string(v); }
std::string value_text(bool v) { return v ? "true" : "false"; }
std::string value_text(const std::string& v) { return v; }

std::string value_text(const FactorValues& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? "," : "") + number_text(v[i]);
    }
    return out + "]";
}

// One JSON object being read. Tracks which keys were consumed so leftovers can
// be reported, and records every default that was filled in.
class Section {
public:
    Section(const json& node, std::string path, std::vector<std::string>& defaulted)
        : node_(node), path_(std::move(path)), defaulted_(defaulted) {
        if (!node_.is_object()) {
            throw ConfigError(path_.empty() ? "document" : path_, "expected an object");
        }
    }

    std::string field(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    const json* find(std::string_view key) {
        seen_.insert(std::string(key));
        const auto it = node_.find(std::string(key));
        return it == node_.end() ? nullptr : &*it;
    }

    template <class T>
    T get(std::string_view key, T fallback) {
        const json* v = find(key);
        if (!v) {
            defaulted_.push_back(field(key) + " = " + value_text(fallback));
            return fallback;
        }
        return convert<T>(*v, field(key));
    }

    /// Marks a key as present-by-default without a value to echo.
    void note_default(std::string_view key, const std::string& text) {
        defaulted_.push_back(field(key) + " = " + text);
    }

    std::vector<std::string>& defaulted() { return defaulted_; }

    void finish() const {
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.count(key)) {
                throw ConfigError(field(key), "unknown key '" + key + "'");
            }
        }
    }

    template <class T>
    static T convert(const json& v, const std::string& where) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(where, "expected true or false");
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(where, "expected a string");
            return v.get<std::string>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(where, "expected a number");
            return v.get<T>();
        } else {
            if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_unsigned()) return v.get<T>();
                if (v.get<std::int64_t>() < 0) throw ConfigError(where, "expected a non-negative integer");
            }
            return v.get<T>();
        }
    }

private:
    const json& node_;
    std::string path_;
    std::vector<std::string>& defaulted_;
    std::set<std::string> seen_;
};

std::vector<double> number_list(const json& v, const std::string& where) {
    if (!v.is_array()) {
        throw ConfigError(where, "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        out.push_back(Section::convert<double>(v[k], where + "[" + std::to_string(k) + "]"));
    }
    return out;
}

// A per-factor value: a scalar (all six), an array of six in C,T,I,L,B,H
// order, or an object keyed by price symbol.
FactorValues factor_values(const json& v, const std::string& where, bool allow_scalar,
                           std::vector<std::string>& defaulted) {
    FactorValues out{};
    if (v.is_number() && allow_scalar) {
        out.fill(v.get<double>());
        return out;
    }
    if (v.is_array()) {
        const auto list = number_list(v, where);
        if (list.size() != kFactorCount) {
            throw ConfigError(where, "expected 6 values (c, t, i, l, b, h)");
        }
        std::copy(list.begin(), list.end(), out.begin());
        return out;
    }
    if (v.is_object()) {
        Section s(v, where, defaulted);
        for (FactorId f : kAllFactors) {
            const json* e = s.find(price_symbol(f));
            if (!e) {
                throw ConfigError(s.field(price_symbol(f)), "missing factor entry");
            }
            out[index_of(f)] = Section::convert<double>(*e, s.field(price_symbol(f)));
        }
        s.finish();
        return out;
    }
    throw ConfigError(where, allow_scalar ? "expected a number, 6 numbers or a factor object"
                                          : "expected 6 numbers or a factor object");
}

AllocationPolicy read_policy(Section& s) {
    AllocationPolicy p;
    auto& d = s.defaulted();
    if (const json* v = s.find("base_weights")) {
        p.base_weights = factor_values(*v, s.field("base_weights"), false, d);
    } else {
        s.note_default("base_weights", value_text(p.base_weights));
    }
    if (const json* v = s.find("curvature")) {
        p.curvature = factor_values(*v, s.field("curvature"), true, d);
    } else {
        s.note_default("curvature", value_text(p.curvature));
    }
    if (const json* v = s.find("persistence")) {
        const std::string where = s.field("persistence");
        if (v->is_number()) {
            p.persistence = RecursionCoefficients::uniform(v->get<double>());
        } else {
            Section c(*v, where, d);
            p.persistence.a = c.get("a", p.persistence.a);
            p.persistence.b = c.get("b", p.persistence.b);
            p.persistence.d = c.get("d", p.persistence.d);
            p.persistence.e = c.get("e", p.persistence.e);
            p.persistence.j = c.get("j", p.persistence.j);
            p.persistence.k = c.get("k", p.persistence.k);
            c.finish();
        }
    } else {
        s.note_default("persistence", "0.5 (a, b, d, e, j, k)");
    }
    p.regret_weight = s.get("regret_weight", p.regret_weight);
    p.signed_allocations = s.get("signed_allocations", p.signed_allocations);
    return p;
}

PricePath read_price(const json& v, const std::string& where, std::vector<std::string>& d) {
    PricePath p;
    if (v.is_number()) {
        p.start = v.get<double>();
        return p;
    }
    Section s(v, where, d);
    const auto kind = s.get<std::string>("kind", "constant");
    if (kind == "constant") {
        p.kind = PricePath::Kind::Constant;
        p.start = s.get("start", p.start);
    } else if (kind == "drift") {
        p.kind = PricePath::Kind::Drift;
        p.start = s.get("start", p.start);
        p.drift = s.get("drift", p.drift);
    } else if (kind == "series") {
        p.kind = PricePath::Kind::Series;
        const json* values = s.find("values");
        if (!values) {
            throw ConfigError(s.field("values"), "series prices need 'values'");
        }
        p.series = number_list(*values, s.field("values"));
    } else {
        throw ConfigError(s.field("kind"), "expected constant, drift or series");
    }
    s.finish();
    return p;
}

WealthSpec read_wealth(Section& s) {
    WealthSpec w;
    const auto dist = s.get<std::string>("distribution", "uniform");
    if (dist == "uniform") {
        w.distribution = WealthSpec::Distribution::Uniform;
        w.low = s.get("low", w.low);
        w.high = s.get("high", w.low);
    } else if (dist == "lognormal") {
        w.distribution = WealthSpec::Distribution::Lognormal;
        w.mu = s.get("mu", w.mu);
        w.sigma = s.get("sigma", w.sigma);
    } else {
        throw ConfigError(s.field("distribution"), "expected uniform or lognormal");
    }
    w.investable_share = s.get("investable_share", w.investable_share);
    w.period_share = s.get("period_share", w.period_share);
    w.growth = s.get("growth", w.growth);
    w.credit_investment = s.get("credit_investment", w.credit_investment);
    if (const json* r = s.find("investment_return")) {
        w.investment_return = r->is_number() ? std::vector<double>{r->get<double>()}
                                             : number_list(*r, s.field("investment_return"));
    } else {
        s.note_default("investment_return", "0");
    }
    return w;
}

Shock read_shock(const json& v, const std::string& where, std::vector<std::string>& d) {
    Section s(v, where, d);
    Shock shock;
    const json* kind = s.find("kind");
    if (!kind) {
        throw ConfigError(s.field("kind"), "shock needs a kind");
    }
    try {
        shock.kind = parse_shock_kind(Section::convert<std::string>(*kind, s.field("kind")));
    } catch (const PreconditionError& e) {
        throw ConfigError(s.field("kind"), e.what());
    }
    if (const json* t = s.find("target")) {
        const auto text = Section::convert<std::string>(*t, s.field("target"));
        if (text != "wealth") {
            try {
                shock.target = parse_factor(text);
            } catch (const PreconditionError& e) {
                throw ConfigError(s.field("target"), e.what());
            }
        }
    }
    const json* magnitude = s.find("magnitude");
    const json* period = s.find("period");
    if (!magnitude || !period) {
        throw ConfigError(where, "shock needs magnitude and period");
    }
    shock.magnitude = Section::convert<double>(*magnitude, s.field("magnitude"));
    shock.period = Section::convert<std::int64_t>(*period, s.field("period"));
    s.finish();
    return shock;
}

SavingsProfile read_profile(const json* v, const std::string& where, std::vector<std::string>& d,
                            double horizon) {
    SavingsProfile p;
    p.horizon_years = horizon;
    if (!v) {
        d.push_back(where + " = all components 0");
        return p;
    }
    Section s(*v, where, d);
    p.pv_savings = s.get("pv_savings", 0.0);
    p.pv_expected_uncovered = s.get("pv_expected_uncovered", 0.0);
    p.pv_unexpected = s.get("pv_unexpected", 0.0);
    p.pv_inflation = s.get("pv_inflation", 0.0);
    p.instability_regret = s.get("instability_regret", 0.0);
    p.pv_home_equity = s.get("pv_home_equity", 0.0);
    p.pv_gov_support = s.get("pv_gov_support", 0.0);
    p.pv_insurance = s.get("pv_insurance", 0.0);
    p.discount_rate = s.get("discount_rate", 0.0);
    s.finish();
    return p;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

} // namespace

ProfilePath SavingsSettings::path() const {
    return ProfilePath::sample(horizon, intervals, [this](double t) {
        const double u = t / horizon;
        auto mix = [u](double a, double b) { return a + (b - a) * u; };
        SavingsProfile p;
        p.pv_savings = mix(start.pv_savings, end.pv_savings);
        p.pv_expected_uncovered = mix(start.pv_expected_uncovered, end.pv_expected_uncovered);
        p.pv_unexpected = mix(start.pv_unexpected, end.pv_unexpected);
        p.pv_inflation = mix(start.pv_inflation, end.pv_inflation);
        p.instability_regret = mix(start.instability_regret, end.instability_regret);
        p.pv_home_equity = mix(start.pv_home_equity, end.pv_home_equity);
        p.pv_gov_support = mix(start.pv_gov_support, end.pv_gov_support);
        p.pv_insurance = mix(start.pv_insurance, end.pv_insurance);
        p.horizon_years = horizon;
        p.discount_rate = start.discount_rate;
        return p;
    });
}

ExperimentConfig parse_experiment(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)),
                          "parse error: " + std::string(e.what()));
    }

    ExperimentConfig out;
    auto& d = out.defaulted;
    ScenarioConfig& sc = out.scenario;
    Section top(doc, "", d);

    sc.n_agents = top.get<std::int64_t>("agents", sc.n_agents);
    sc.n_periods = top.get<std::int64_t>("periods", sc.n_periods);
    sc.seed = top.get<std::uint64_t>("seed", sc.seed);
    sc.threads = top.get<unsigned>("threads", sc.threads);

    if (const json* v = top.find("policy")) {
        Section s(*v, "policy", d);
        sc.policy = read_policy(s);
        s.finish();
    } else {
        const json empty = json::object();
        Section s(empty, "policy", d);
        sc.policy = read_policy(s);
    }

    if (const json* v = top.find("prices")) {
        Section s(*v, "prices", d);
        for (FactorId f : kAllFactors) {
            const auto sym = price_symbol(f);
            if (const json* p = s.find(sym)) {
                sc.prices[index_of(f)] = read_price(*p, s.field(sym), d);
            } else {
                s.note_default(sym, "1 (constant)");
            }
        }
        s.finish();
    } else {
        d.push_back("prices = 1 (constant, every factor)");
    }

    {
        const json empty = json::object();
        const json* v = top.find("wealth");
        Section s(v ? *v : empty, "wealth", d);
        sc.wealth = read_wealth(s);
        s.finish();
    }

    if (const json* v = top.find("shocks")) {
        if (!v->is_array()) {
            throw ConfigError("shocks", "expected an array");
        }
        for (std::size_t k = 0; k < v->size(); ++k) {
            sc.shocks.push_back(read_shock((*v)[k], "shocks[" + std::to_string(k) + "]", d));
        }
    } else {
        d.push_back("shocks = none");
    }

    {
        const json empty = json::object();
        const json* v = top.find("rates");
        Section s(v ? *v : empty, "rates", d);
        sc.bump.relative_step = s.get("relative_step", sc.bump.relative_step);
        const auto scheme = s.get<std::string>("scheme", "central");
        if (scheme == "central") {
            sc.bump.scheme = BumpScheme::Central;
        } else if (scheme == "forward") {
            sc.bump.scheme = BumpScheme::Forward;
        } else {
            throw ConfigError(s.field("scheme"), "expected central or forward");
        }
        s.finish();
    }
    {
        const json empty = json::object();
        const json* v = top.find("eis");
        Section s(v ? *v : empty, "eis", d);
        out.eis.folds = s.get("folds", out.eis.folds);
        s.finish();
        if (out.eis.folds < 2) {
            throw ConfigError("eis.folds", "folds ≥ 2");
        }
    }
    {
        const json empty = json::object();
        const json* v = top.find("probes");
        Section s(v ? *v : empty, "probes", d);
        ProbeSettings& p = out.probes;
        p.samples = s.get("samples", p.samples);
        p.perturbation = s.get("perturbation", p.perturbation);
        p.sweep_low = s.get("sweep_low", p.sweep_low);
        p.sweep_high = s.get("sweep_high", p.sweep_high);
        p.sweep_steps = s.get("sweep_steps", p.sweep_steps);
        s.finish();
        if (p.samples < 1) throw ConfigError("probes.samples", "samples ≥ 1");
        if (!(p.perturbation >= 0.0)) throw ConfigError("probes.perturbation", "perturbation ≥ 0");
        if (!(p.sweep_low < p.sweep_high)) throw ConfigError("probes.sweep_high", "sweep_low < sweep_high");
        if (p.sweep_steps < 3) throw ConfigError("probes.sweep_steps", "sweep_steps ≥ 3");
    }
    {
        const json empty = json::object();
        const json* v = top.find("savings");
        Section s(v ? *v : empty, "savings", d);
        SavingsSettings& sv = out.savings;
        sv.horizon = s.get("horizon", sv.horizon);
        sv.intervals = s.get<std::uint64_t>("intervals", sv.intervals);
        if (!(sv.horizon > 0.0)) throw ConfigError("savings.horizon", "horizon > 0");
        if (sv.intervals < ProfilePath::kMinIntervals) {
            throw ConfigError("savings.intervals", "intervals ≥ 4");
        }
        sv.start = read_profile(s.find("start"), "savings.start", d, sv.horizon);
        const json* end = s.find("end");
        sv.end = end ? read_profile(end, "savings.end", d, sv.horizon) : sv.start;
        if (!end) {
            d.push_back("savings.end = savings.start");
        }
        s.finish();
    }
    top.finish();

    if (auto bad = validate_config(sc); !bad.empty()) {
        throw ConfigError(bad.front().field, bad.front().invariant);
    }
    return out;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path.string(), "cannot open config file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment(buf.str());
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    return load_experiment(path).scenario;
}

} // namespace uiwd
