#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qvfe/cycle_dynamics.hpp"
#include "qvfe/errors.hpp"
#include "qvfe/open_chain.hpp"
#include "qvfe/oracles.hpp"
#include "qvfe/oscillator_network.hpp"
#include "qvfe/parallel.hpp"
#include "qvfe/qubit_chain_ff.hpp"
#include "qvfe/qubit_exact.hpp"
#include "qvfe/random.hpp"
#include "qvfe/table.hpp"
#include "qvfe/two_qubit.hpp"

namespace qvfe {

enum class Model { two_qubit, chain_ff, chain_exact, open_chain, two_osc, network, chain_osc, lattice, dynamics };

inline const std::vector<std::pair<Model, std::string>>& model_names() {
    static const std::vector<std::pair<Model, std::string>> names{
        {Model::two_qubit, "two_qubit"}, {Model::chain_ff, "chain_ff"},   {Model::chain_exact, "chain_exact"},
        {Model::open_chain, "open_chain"}, {Model::two_osc, "two_osc"},   {Model::network, "network"},
        {Model::chain_osc, "chain_osc"},   {Model::lattice, "lattice"},   {Model::dynamics, "dynamics"}};
    return names;
}

inline std::string model_name(Model m) {
    for (const auto& [model, name] : model_names()) {
        if (model == m) {
            return name;
        }
    }
    return "?";
}

inline Model parse_model(const std::string& s) {
    for (const auto& [model, name] : model_names()) {
        if (name == s) {
            return model;
        }
    }
    std::string known;
    for (const auto& [model, name] : model_names()) {
        known += (known.empty() ? "" : ", ") + name;
    }
    throw ConfigError("model: unknown model '" + s + "' (expected one of " + known + ")");
}

enum class Scale { linear, log };

/// A swept parameter: either start/stop/steps on a linear or log grid, or an explicit list.
struct Range {
    std::string name;
    double start = 0.0;
    double stop = 0.0;
    int steps = 1;
    Scale scale = Scale::linear;
    std::vector<double> explicit_values;

    static Range linear(std::string name, double start, double stop, int steps) {
        return Range{std::move(name), start, stop, steps, Scale::linear, {}};
    }
    static Range logspace(std::string name, double start, double stop, int steps) {
        return Range{std::move(name), start, stop, steps, Scale::log, {}};
    }
    static Range list(std::string name, std::vector<double> values) {
        Range r;
        r.name = std::move(name);
        r.explicit_values = std::move(values);
        r.steps = static_cast<int>(r.explicit_values.size());
        return r;
    }

    void validate() const {
        const std::string field = "parameters." + name;
        if (!explicit_values.empty()) {
            for (double v : explicit_values) {
                if (!std::isfinite(v)) {
                    throw ConfigError(field + ".values: entries must be finite numbers");
                }
            }
            return;
        }
        if (steps < 1) {
            throw ConfigError(field + ".steps: range is empty (steps must be >= 1)");
        }
        if (!std::isfinite(start) || !std::isfinite(stop)) {
            throw ConfigError(field + ": start and stop must be finite");
        }
        if (scale == Scale::log && (!(start > 0.0) || !(stop > 0.0))) {
            throw ConfigError(field + ": log scale needs start > 0 and stop > 0");
        }
    }

    /// Grid points; the endpoints are exact.
    std::vector<double> values() const {
        validate();
        if (!explicit_values.empty()) {
            return explicit_values;
        }
        std::vector<double> v(static_cast<std::size_t>(steps));
        if (steps == 1) {
            v[0] = start;
            return v;
        }
        const double last = steps - 1;
        for (int i = 0; i < steps; ++i) {
            if (scale == Scale::linear) {
                v[i] = start + (stop - start) * i / last;
            } else {
                v[i] = std::exp(std::log(start) + (std::log(stop) - std::log(start)) * i / last);
            }
        }
        v.front() = start;
        v.back() = stop;
        return v;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        if (!explicit_values.empty()) {
            j["values"] = explicit_values;
        } else {
            j["start"] = start;
            j["stop"] = stop;
            j["steps"] = steps;
            j["scale"] = scale == Scale::log ? "log" : "linear";
        }
        return j;
    }
};

enum class ParamKind { number, integer, text, matrix };

struct ParamInfo {
    std::string name;
    ParamKind kind = ParamKind::number;
};

struct SweepConfig {
    Model model = Model::two_qubit;
    std::vector<Range> parameters;                      // sorted by name
    nlohmann::json fixed = nlohmann::json::object();    // named scalars, strings, or a matrix for `k`
    std::string output_path;                            // empty: standard output
    OutputFormat format = OutputFormat::csv;
    std::uint64_t seed = 0;
    unsigned parallelism = 1;                           // 0: all hardware threads

    static SweepConfig from_json(const nlohmann::json& j);
    static SweepConfig from_file(const std::string& path);

    void validate() const;
    std::size_t point_count() const;
    nlohmann::ordered_json to_json() const;
};

namespace detail {

inline const std::vector<ParamInfo>& model_params(Model m) {
    using K = ParamKind;
    static const std::vector<ParamInfo> two_qubit{{"gamma", K::number},   {"delta", K::number},
                                                  {"sum", K::number},     {"omega_a", K::number},
                                                  {"omega_b", K::number}, {"g", K::number}};
    static const std::vector<ParamInfo> chain_ff{{"n", K::integer}, {"g", K::number}, {"omega", K::number}};
    static const std::vector<ParamInfo> chain_exact{{"n", K::integer},       {"g", K::number},
                                                    {"omega", K::number},    {"boundary", K::text},
                                                    {"samples", K::integer}, {"max_qubits", K::integer}};
    static const std::vector<ParamInfo> open_chain{
        {"n", K::integer}, {"g", K::number}, {"omega", K::number}, {"regime", K::text}};
    static const std::vector<ParamInfo> two_osc{{"k0", K::number}, {"g", K::number}};
    static const std::vector<ParamInfo> network{
        {"k", K::matrix}, {"random_n", K::integer}, {"coupling_scale", K::number}};
    static const std::vector<ParamInfo> chain_osc{{"n", K::integer}, {"k0", K::number}, {"route", K::text}};
    static const std::vector<ParamInfo> lattice{
        {"dim", K::integer}, {"m_side", K::integer}, {"k0", K::number}, {"route", K::text}};
    static const std::vector<ParamInfo> dynamics{
        {"gamma", K::number},   {"delta", K::number},       {"sum", K::number},
        {"omega_a", K::number}, {"omega_b", K::number},     {"g", K::number},
        {"gamma_m", K::number}, {"g_m", K::number},         {"spectral_density", K::number},
        {"temperature", K::number}};
    switch (m) {
    case Model::two_qubit: return two_qubit;
    case Model::chain_ff: return chain_ff;
    case Model::chain_exact: return chain_exact;
    case Model::open_chain: return open_chain;
    case Model::two_osc: return two_osc;
    case Model::network: return network;
    case Model::chain_osc: return chain_osc;
    case Model::lattice: return lattice;
    case Model::dynamics: return dynamics;
    }
    return two_qubit;
}

inline const ParamInfo* find_param(Model m, const std::string& name) {
    for (const auto& p : model_params(m)) {
        if (p.name == name) {
            return &p;
        }
    }
    return nullptr;
}

inline std::vector<std::string> diagnostic_columns(Model m) {
    switch (m) {
    case Model::two_qubit: return {"work_over_sum", "p00", "p11"};
    case Model::chain_ff: return {"work_per_site", "gap_per_site", "sigma_per_sqrt_site"};
    case Model::chain_exact: return {"work_per_site", "parity", "mean_work_mc", "std_work_mc", "se_mean_mc"};
    case Model::open_chain: return {"regime_warning", "warning"};
    case Model::two_osc: return {"omega", "omega_plus", "omega_minus"};
    case Model::network: return {"n", "min_mode_frequency", "max_mode_frequency"};
    case Model::chain_osc: return {"work_per_oscillator", "trace_k_inverse", "sum_frequencies"};
    case Model::lattice: return {"n", "work_per_oscillator"};
    case Model::dynamics:
        return {"t_m", "nu", "gamma_plus", "gamma_minus", "t_p", "t_c", "power", "low_temperature_warning"};
    }
    return {};
}

inline bool near_integer(double x) { return std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, std::abs(x)); }

inline Range parse_range(const std::string& name, const nlohmann::json& v) {
    const std::string field = "parameters." + name;
    auto number = [&](const nlohmann::json& x, const std::string& sub) {
        if (!x.is_number()) {
            throw ConfigError(field + sub + ": expected a number");
        }
        return x.get<double>();
    };
    if (v.is_number()) {
        return Range::list(name, {v.get<double>()});
    }
    if (v.is_array()) {
        if (v.empty()) {
            throw ConfigError(field + ": range is empty");
        }
        std::vector<double> vals;
        for (std::size_t i = 0; i < v.size(); ++i) {
            vals.push_back(number(v[i], "[" + std::to_string(i) + "]"));
        }
        return Range::list(name, std::move(vals));
    }
    if (!v.is_object()) {
        throw ConfigError(field + ": expected an object {start, stop, steps, scale}, a list, or a number");
    }
    for (const auto& [key, _] : v.items()) {
        static const std::set<std::string> allowed{"start", "stop", "steps", "step", "scale", "values"};
        if (!allowed.count(key)) {
            throw ConfigError(field + "." + key + ": unknown field");
        }
    }
    if (v.contains("values")) {
        if (v.size() != 1) {
            throw ConfigError(field + ": 'values' cannot be combined with start/stop/steps");
        }
        if (!v["values"].is_array()) {
            throw ConfigError(field + ".values: expected a list");
        }
        return parse_range(name, v["values"]);
    }
    for (const char* key : {"start", "stop"}) {
        if (!v.contains(key)) {
            throw ConfigError(field + "." + key + ": required");
        }
    }
    Range r;
    r.name = name;
    r.start = number(v["start"], ".start");
    r.stop = number(v["stop"], ".stop");
    if (v.contains("scale")) {
        if (!v["scale"].is_string()) {
            throw ConfigError(field + ".scale: expected \"linear\" or \"log\"");
        }
        const auto s = v["scale"].get<std::string>();
        if (s == "linear") {
            r.scale = Scale::linear;
        } else if (s == "log") {
            r.scale = Scale::log;
        } else {
            throw ConfigError(field + ".scale: expected \"linear\" or \"log\", got \"" + s + "\"");
        }
    }
    if (v.contains("steps") == v.contains("step")) {
        throw ConfigError(field + ": give exactly one of 'steps' or 'step'");
    }
    if (v.contains("steps")) {
        const double steps = number(v["steps"], ".steps");
        if (!near_integer(steps)) {
            throw ConfigError(field + ".steps: must be an integer");
        }
        if (steps < 1.0) {
            throw ConfigError(field + ".steps: range is empty (steps must be >= 1)");
        }
        if (steps > 1e8) {
            throw ConfigError(field + ".steps: too many points");
        }
        r.steps = static_cast<int>(std::lround(steps));
    } else {
        if (r.scale != Scale::linear) {
            throw ConfigError(field + ".step: only valid on a linear scale");
        }
        const double step = number(v["step"], ".step");
        const double span = r.stop - r.start;
        if (!(step > 0.0)) {
            throw ConfigError(field + ".step: must be positive");
        }
        const double count = std::abs(span) / step;
        if (!near_integer(count)) {
            throw ConfigError(field + ".step: (stop - start) is not a whole number of steps");
        }
        r.steps = static_cast<int>(std::lround(count)) + 1;
    }
    r.validate();
    return r;
}

/// Parameter lookup for one sweep point: swept values first, then `fixed`.
class Point {
public:
    Point(const std::map<std::string, double>& swept, const nlohmann::json& fixed) : swept_(swept), fixed_(fixed) {}

    bool has(const std::string& name) const { return swept_.count(name) || fixed_.contains(name); }

    double number(const std::string& name) const {
        if (auto it = swept_.find(name); it != swept_.end()) {
            return it->second;
        }
        if (fixed_.contains(name) && fixed_[name].is_number()) {
            return fixed_[name].get<double>();
        }
        throw ConfigError(name + ": required");
    }
    double number(const std::string& name, double fallback) const { return has(name) ? number(name) : fallback; }

    int integer(const std::string& name) const { return static_cast<int>(std::lround(number(name))); }
    int integer(const std::string& name, int fallback) const { return has(name) ? integer(name) : fallback; }

    std::string text(const std::string& name, const std::string& fallback) const {
        return fixed_.contains(name) ? fixed_[name].get<std::string>() : fallback;
    }

    const nlohmann::json& raw(const std::string& name) const { return fixed_[name]; }

private:
    const std::map<std::string, double>& swept_;
    const nlohmann::json& fixed_;
};

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError(field + ": expected a non-empty square list of rows");
    }
    const auto n = static_cast<Eigen::Index>(j.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
            throw ConfigError(field + "[" + std::to_string(r) + "]: expected " + std::to_string(n) + " numbers");
        }
        for (Eigen::Index c = 0; c < n; ++c) {
            if (!row[static_cast<std::size_t>(c)].is_number()) {
                throw ConfigError(field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]: expected a number");
            }
            k(r, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    }
    return k;
}

inline NetworkRoute parse_route(const std::string& s) {
    if (s == "auto") {
        return NetworkRoute::automatic;
    }
    if (s == "dense") {
        return NetworkRoute::dense;
    }
    if (s == "mode_sum") {
        return NetworkRoute::mode_sum;
    }
    throw ConfigError("route: expected auto, dense or mode_sum, got '" + s + "'");
}

inline bool uses_physical_qubits(const Point& p) { return p.has("omega_a") || p.has("omega_b") || p.has("g"); }

inline TwoQubitSpec two_qubit_spec(const Point& p) {
    if (uses_physical_qubits(p)) {
        TwoQubitSpec s{p.number("omega_a"), p.number("omega_b"), p.number("g")};
        s.validate();
        return s;
    }
    const double delta = p.number("delta", 0.0);
    if (!(delta >= 0.0) || !(delta < 1.0)) {
        throw InvalidSpec("delta must lie in [0, 1)");
    }
    const double sum = p.number("sum", 1.0);
    if (!(sum > 0.0)) {
        throw InvalidSpec("sum must be positive");
    }
    return TwoQubitSpec::from_dimensionless(sum, p.number("gamma"), delta);
}

inline MeterSpec meter_spec(const Point& p, const TwoQubitSpec& s) {
    MeterSpec m{p.has("g_m") ? p.number("g_m") : p.number("gamma_m", 50.0) * s.sum()};
    m.validate();
    return m;
}

struct PointResult {
    EngineMetrics metrics;
    std::vector<Cell> diagnostics;
};

inline PointResult evaluate_point(Model model, const Point& p, std::uint64_t row_seed) {
    PointResult r;
    switch (model) {
    case Model::two_qubit: {
        const auto s = two_qubit_spec(p);
        r.metrics = metrics(s);
        const auto prob = outcome_probabilities(s);
        r.diagnostics = {r.metrics.work() / s.sum(), prob.p00, prob.p11};
        break;
    }
    case Model::chain_ff: {
        const int n = p.integer("n");
        const double omega = p.number("omega", 1.0);
        r.metrics = metrics_closed_chain(n, omega, p.number("g"));
        r.diagnostics = {r.metrics.work() / n, r.metrics.gap() / n, r.metrics.std_dev() / std::sqrt(double(n))};
        break;
    }
    case Model::chain_exact: {
        const int n = p.integer("n");
        if (n < 2) {
            throw InvalidSpec("chain needs at least 2 sites");
        }
        const int max_qubits = p.integer("max_qubits", kDefaultMaxQubits);
        if (n > max_qubits) {
            throw SizeExceeded("exact diagonalization limited to " + std::to_string(max_qubits) + " qubits, got " +
                               std::to_string(n));
        }
        const auto boundary_name = p.text("boundary", "closed");
        if (boundary_name != "closed" && boundary_name != "open") {
            throw ConfigError("boundary: expected closed or open, got '" + boundary_name + "'");
        }
        const Boundary boundary = boundary_name == "open" ? Boundary::open : Boundary::closed;
        const double omega = p.number("omega", 1.0);
        const double g = p.number("g");
        QubitChainSpec spec{std::vector<double>(static_cast<std::size_t>(n), omega),
                            std::vector<double>(static_cast<std::size_t>(boundary == Boundary::open ? n - 1 : n), g),
                            boundary};
        const auto sol = solve_exact(spec, max_qubits);
        r.metrics = sol.metrics;
        r.diagnostics = {r.metrics.work() / n, static_cast<long long>(sol.ground.parity), Cell{}, Cell{}, Cell{}};
        const int samples = p.integer("samples", 0);
        if (samples > 0) {
            const auto mc = sample_cycles(outcome_distribution(spec, max_qubits), static_cast<std::size_t>(samples),
                                          KeyedRng(row_seed, 0)(), SamplingOptions{1, false});
            r.diagnostics[2] = mc.mean_work;
            r.diagnostics[3] = mc.std_work;
            r.diagnostics[4] = mc.std_error_mean;
        } else if (samples < 0) {
            throw InvalidSpec("samples must be non-negative");
        }
        break;
    }
    case Model::open_chain: {
        const auto spec = OpenChainSpec::uniform(p.integer("n"), p.number("omega", 1.0), p.number("g"));
        const auto regime = p.text("regime", "weak");
        if (regime == "weak") {
            const auto w = weak_coupling_metrics(spec);
            r.metrics = w.metrics;
            r.diagnostics = {static_cast<long long>(w.regime_warning), w.warning};
        } else if (regime == "strong") {
            const auto s = strong_coupling_metrics(spec);
            r.metrics = s.metrics;
            r.diagnostics = {static_cast<long long>(s.regime_warning), s.warning};
        } else if (regime == "exact") {
            r.metrics = engine_metrics_exact(spec.as_chain());
            r.diagnostics = {0LL, std::string{}};
        } else {
            throw ConfigError("regime: expected weak, strong or exact, got '" + regime + "'");
        }
        break;
    }
    case Model::two_osc: {
        const TwoOscSpec s{p.number("k0"), p.number("g")};
        r.metrics = metrics_two_oscillator(s);
        r.diagnostics = {s.omega(), s.omega_plus(), s.omega_minus()};
        break;
    }
    case Model::network: {
        Eigen::MatrixXd k;
        if (p.has("k")) {
            k = matrix_from_json(p.raw("k"), "fixed.k");
        } else {
            KeyedRng rng(row_seed, 1);
            k = oracle::random_spd(p.integer("random_n"), rng);
        }
        const double scale = p.number("coupling_scale", 1.0);
        if (scale != 1.0) {
            const Eigen::VectorXd d = k.diagonal();
            k *= scale;
            k.diagonal() = d;
        }
        const auto sol = solve_network(k);
        r.metrics = sol.metrics;
        r.diagnostics = {static_cast<long long>(k.rows()), sol.modes.frequencies.minCoeff(),
                         sol.modes.frequencies.maxCoeff()};
        break;
    }
    case Model::chain_osc: {
        const int n = p.integer("n");
        const auto sol = linear_chain_metrics(n, p.number("k0", 1.0), parse_route(p.text("route", "auto")));
        r.metrics = sol.metrics();
        r.diagnostics = {r.metrics.work() / n, sol.lattice.trace_k_inverse, sol.lattice.sum_frequencies};
        break;
    }
    case Model::lattice: {
        const auto sol = lattice_metrics(p.integer("m_side"), p.integer("dim"), p.number("k0", 1.0),
                                         parse_route(p.text("route", "auto")));
        r.metrics = sol.metrics;
        r.diagnostics = {static_cast<long long>(sol.n), r.metrics.work() / static_cast<double>(sol.n)};
        break;
    }
    case Model::dynamics: {
        const auto s = two_qubit_spec(p);
        const auto meter = meter_spec(p, s);
        const RelaxationSpec relax{p.number("spectral_density", 0.01), p.number("temperature", 0.0)};
        r.metrics = metrics(s);
        const auto tm = measurement_time(s, meter);
        r.diagnostics.assign(8, Cell{});
        r.diagnostics[0] = tm.t_m;
        r.diagnostics[1] = tm.nu;
        const auto rates = relaxation_rates(s, relax);
        r.diagnostics[2] = rates.gamma_plus;
        r.diagnostics[3] = rates.gamma_minus;
        r.diagnostics[4] = rates.t_p;
        r.diagnostics[5] = rates.t_c;
        r.diagnostics[6] = power_estimate(s, meter, relax).power;
        r.diagnostics[7] = static_cast<long long>(rates.low_temperature_warning);
        break;
    }
    }
    return r;
}

} // namespace detail

inline SweepConfig SweepConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("config: expected a JSON object");
    }
    static const std::set<std::string> top{"model", "parameters", "fixed", "output", "seed", "parallelism",
                                           "description"};
    for (const auto& [key, _] : j.items()) {
        if (!top.count(key)) {
            throw ConfigError(key + ": unknown field");
        }
    }
    SweepConfig c;
    if (!j.contains("model") || !j["model"].is_string()) {
        throw ConfigError("model: required (a string)");
    }
    c.model = parse_model(j["model"].get<std::string>());
    if (j.contains("parameters")) {
        if (!j["parameters"].is_object()) {
            throw ConfigError("parameters: expected an object of named ranges");
        }
        for (const auto& [name, value] : j["parameters"].items()) {
            c.parameters.push_back(detail::parse_range(name, value));
        }
    }
    if (j.contains("fixed")) {
        if (!j["fixed"].is_object()) {
            throw ConfigError("fixed: expected an object of named values");
        }
        c.fixed = j["fixed"];
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        if (!o.is_object()) {
            throw ConfigError("output: expected an object {path, format}");
        }
        for (const auto& [key, _] : o.items()) {
            if (key != "path" && key != "format") {
                throw ConfigError("output." + key + ": unknown field");
            }
        }
        if (o.contains("path")) {
            if (!o["path"].is_string()) {
                throw ConfigError("output.path: expected a string");
            }
            c.output_path = o["path"].get<std::string>();
        }
        if (o.contains("format")) {
            if (!o["format"].is_string()) {
                throw ConfigError("output.format: expected \"csv\" or \"json\"");
            }
            try {
                c.format = parse_format(o["format"].get<std::string>());
            } catch (const ConfigError& e) {
                throw ConfigError(std::string("output.") + e.what());
            }
        }
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) {
            throw ConfigError("seed: expected a non-negative integer");
        }
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("parallelism")) {
        if (!j["parallelism"].is_number_integer() || j["parallelism"].get<long long>() < 0) {
            throw ConfigError("parallelism: expected a non-negative integer");
        }
        c.parallelism = j["parallelism"].get<unsigned>();
    }
    c.validate();
    return c;
}

inline SweepConfig SweepConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open '" + path + "'");
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

inline void SweepConfig::validate() const {
    std::set<std::string> seen;
    for (const auto& r : parameters) {
        const auto* info = detail::find_param(model, r.name);
        if (!info) {
            throw ConfigError("parameters." + r.name + ": unknown parameter for model " + model_name(model));
        }
        if (info->kind == ParamKind::text || info->kind == ParamKind::matrix) {
            throw ConfigError("parameters." + r.name + ": cannot be swept; set it under 'fixed'");
        }
        if (!seen.insert(r.name).second) {
            throw ConfigError("parameters." + r.name + ": given twice");
        }
        const auto vals = r.values();
        if (info->kind == ParamKind::integer) {
            for (double v : vals) {
                if (!detail::near_integer(v)) {
                    throw ConfigError("parameters." + r.name + ": every grid point must be an integer");
                }
            }
        }
    }
    for (const auto& [name, value] : fixed.items()) {
        const auto* info = detail::find_param(model, name);
        if (!info) {
            throw ConfigError("fixed." + name + ": unknown parameter for model " + model_name(model));
        }
        if (seen.count(name)) {
            throw ConfigError("fixed." + name + ": also swept under 'parameters'");
        }
        switch (info->kind) {
        case ParamKind::number:
            if (!value.is_number()) {
                throw ConfigError("fixed." + name + ": expected a number");
            }
            break;
        case ParamKind::integer:
            if (!value.is_number() || !detail::near_integer(value.get<double>())) {
                throw ConfigError("fixed." + name + ": expected an integer");
            }
            break;
        case ParamKind::text:
            if (!value.is_string()) {
                throw ConfigError("fixed." + name + ": expected a string");
            }
            break;
        case ParamKind::matrix:
            detail::matrix_from_json(value, "fixed." + name);
            break;
        }
    }

    auto present = [&](const std::string& n) { return seen.count(n) || fixed.contains(n); };
    auto require = [&](std::initializer_list<const char*> names) {
        for (const char* n : names) {
            if (!present(n)) {
                throw ConfigError(std::string(n) + ": required by model " + model_name(model) +
                                  " (give it under 'parameters' or 'fixed')");
            }
        }
    };
    switch (model) {
    case Model::two_qubit:
    case Model::dynamics: {
        const bool physical = present("omega_a") || present("omega_b") || present("g");
        const bool scaled = present("gamma") || present("delta") || present("sum");
        if (physical && scaled) {
            throw ConfigError("gamma: give either (omega_a, omega_b, g) or (gamma, delta, sum), not both");
        }
        if (physical) {
            require({"omega_a", "omega_b", "g"});
        } else {
            require({"gamma"});
        }
        if (model == Model::dynamics && present("g_m") && present("gamma_m")) {
            throw ConfigError("g_m: give either g_m or gamma_m, not both");
        }
        break;
    }
    case Model::chain_ff:
    case Model::chain_exact:
    case Model::open_chain: require({"n", "g"}); break;
    case Model::two_osc: require({"k0", "g"}); break;
    case Model::network:
        if (present("k") == present("random_n")) {
            throw ConfigError("k: give exactly one of fixed.k (a matrix) or random_n");
        }
        break;
    case Model::chain_osc: require({"n"}); break;
    case Model::lattice: require({"dim", "m_side"}); break;
    }
}

inline std::size_t SweepConfig::point_count() const {
    std::size_t n = 1;
    for (const auto& r : parameters) {
        n *= r.values().size();
    }
    return n;
}

inline nlohmann::ordered_json SweepConfig::to_json() const {
    nlohmann::ordered_json j;
    j["model"] = model_name(model);
    j["parameters"] = nlohmann::ordered_json::object();
    for (const auto& r : parameters) {
        j["parameters"][r.name] = r.to_json();
    }
    j["fixed"] = nlohmann::ordered_json::parse(fixed.dump());
    j["output"] = {{"path", output_path}, {"format", format == OutputFormat::csv ? "csv" : "json"}};
    j["seed"] = seed;
    j["parallelism"] = parallelism;
    return j;
}

/// Column names: swept parameters, the five metrics, model diagnostics, error.
inline std::vector<std::string> sweep_columns(const SweepConfig& c) {
    std::vector<std::string> cols;
    for (const auto& r : c.parameters) {
        cols.push_back(r.name);
    }
    for (const char* m : {"work", "heat", "gap", "efficiency", "std_dev"}) {
        cols.emplace_back(m);
    }
    for (auto& d : detail::diagnostic_columns(c.model)) {
        cols.push_back(std::move(d));
    }
    cols.emplace_back("error");
    return cols;
}

inline unsigned resolve_jobs(unsigned jobs) {
    return jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
}

/// Evaluates the Cartesian product of the ranges. Parameters are ordered by
/// name and the first one varies slowest. A point that fails keeps its row,
/// with empty result cells and the message in `error`.
inline ResultTable run_sweep(SweepConfig config) {
    std::sort(config.parameters.begin(), config.parameters.end(),
              [](const Range& a, const Range& b) { return a.name < b.name; });
    config.validate();

    std::vector<std::vector<double>> grids;
    for (const auto& r : config.parameters) {
        grids.push_back(r.values());
    }
    const std::size_t count = config.point_count();
    const auto diag_count = detail::diagnostic_columns(config.model).size();

    ResultTable table;
    table.columns = sweep_columns(config);
    table.rows.resize(count);

    parallel_for(count, resolve_jobs(config.parallelism), [&](std::size_t row) {
        std::map<std::string, double> swept;
        std::vector<Cell> cells;
        std::size_t rest = row;
        std::vector<std::size_t> idx(grids.size());
        for (std::size_t d = grids.size(); d-- > 0;) {
            idx[d] = rest % grids[d].size();
            rest /= grids[d].size();
        }
        for (std::size_t d = 0; d < grids.size(); ++d) {
            const double v = grids[d][idx[d]];
            const auto* info = detail::find_param(config.model, config.parameters[d].name);
            if (info->kind == ParamKind::integer) {
                const double rounded = std::round(v);
                swept[config.parameters[d].name] = rounded;
                cells.emplace_back(static_cast<long long>(rounded));
            } else {
                swept[config.parameters[d].name] = v;
                cells.emplace_back(v);
            }
        }
        const detail::Point point(swept, config.fixed);
        try {
            const auto res = detail::evaluate_point(config.model, point, KeyedRng(config.seed, row)());
            cells.emplace_back(res.metrics.work());
            cells.emplace_back(res.metrics.heat());
            cells.emplace_back(res.metrics.gap());
            cells.push_back(optional_cell(res.metrics.efficiency()));
            cells.emplace_back(res.metrics.std_dev());
            cells.insert(cells.end(), res.diagnostics.begin(), res.diagnostics.end());
            cells.emplace_back(std::string{});
        } catch (const std::bad_alloc&) {
            throw;
        } catch (const std::exception& e) {
            cells.resize(grids.size() + 5 + diag_count, Cell{});
            cells.emplace_back(std::string(e.what()));
        }
        table.rows[row] = std::move(cells);
    });
    return table;
}

/// Single-point evaluation: every value comes from `fixed`. Unlike run_sweep,
/// errors propagate, and the table has no `error` column.
inline ResultTable evaluate_single(Model model, const nlohmann::json& fixed, std::uint64_t seed = 0) {
    SweepConfig c;
    c.model = model;
    c.fixed = fixed;
    c.seed = seed;
    c.validate();
    const std::map<std::string, double> none;
    const auto res = detail::evaluate_point(model, detail::Point(none, c.fixed), KeyedRng(seed, 0)());
    ResultTable t;
    t.columns = sweep_columns(c);
    t.columns.pop_back();
    std::vector<Cell> row{res.metrics.work(), res.metrics.heat(), res.metrics.gap(),
                          optional_cell(res.metrics.efficiency()), res.metrics.std_dev()};
    row.insert(row.end(), res.diagnostics.begin(), res.diagnostics.end());
    t.rows.push_back(std::move(row));
    return t;
}

} // namespace qvfe
