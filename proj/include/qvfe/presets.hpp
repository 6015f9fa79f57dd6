#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "qvfe/cycle_dynamics.hpp"
#include "qvfe/manifest.hpp"
#include "qvfe/sweep.hpp"

namespace qvfe {

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig3", "fig4", "fig5", "fig8", "figA6", "figA7"};
    return names;
}

struct PresetOptions {
    std::filesystem::path out_dir = ".";
    OutputFormat format = OutputFormat::csv;
    unsigned jobs = 1;
    // Largest lattice side per dimension for fig8.
    int m_cap_1d = 1000;
    int m_cap_2d = 60;
    int m_cap_3d = 20;
    // Trajectory length for figA6/figA7 in units of t_M, and samples per t_M.
    double t_end_over_t_m = 2.0;
    int samples_per_t_m = 1000;
};

/// Keeps the named columns of `t`, in the given order, renaming with `rename[i]` when non-empty.
inline ResultTable project(const ResultTable& t, const std::vector<std::string>& keep,
                           const std::vector<std::string>& rename = {}) {
    std::vector<std::size_t> idx;
    for (const auto& k : keep) {
        idx.push_back(t.column_index(k));
    }
    ResultTable out;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.columns.push_back(i < rename.size() && !rename[i].empty() ? rename[i] : keep[i]);
    }
    out.rows.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        std::vector<Cell> r;
        r.reserve(idx.size());
        for (auto i : idx) {
            r.push_back(row[i]);
        }
        out.rows.push_back(std::move(r));
    }
    return out;
}

/// Columns: t, p000, p001, p110, p111 (squared moduli of the amplitudes).
inline ResultTable trajectory_probability_table(const ThreeQubitTrajectory& traj) {
    ResultTable t;
    t.columns = {"t", "p000", "p001", "p110", "p111"};
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& a = traj.amplitudes[i];
        t.rows.push_back({traj.times[i], std::norm(a[amp::k000]), std::norm(a[amp::k001]), std::norm(a[amp::k110]),
                          std::norm(a[amp::k111])});
    }
    return t;
}

/// Columns: t, e_loc, e_int, e_meter, e_two_qubit_total.
inline ResultTable trajectory_energy_table(const ThreeQubitTrajectory& traj) {
    ResultTable t;
    t.columns = {"t", "e_loc", "e_int", "e_meter", "e_two_qubit_total"};
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& e = traj.energies[i];
        t.rows.push_back({traj.times[i], e.e_loc, e.e_int, e.e_meter, e.e_two_qubit_total()});
    }
    return t;
}

namespace detail {

// g = 10 (omega_A + omega_B), g_M = 50 (omega_A + omega_B) with omega_A + omega_B = 1.
inline TwoQubitSpec trajectory_figure_qubits() { return TwoQubitSpec{0.5, 0.5, 10.0}; }
inline MeterSpec trajectory_figure_meter() { return MeterSpec{50.0}; }

inline ThreeQubitTrajectory trajectory_figure(const PresetOptions& o) {
    if (!(o.t_end_over_t_m > 0.0) || o.samples_per_t_m < 1) {
        throw ConfigError("trajectory presets need t_end_over_t_m > 0 and samples_per_t_m >= 1");
    }
    const auto spec = trajectory_figure_qubits();
    const auto meter = trajectory_figure_meter();
    const double t_m = measurement_time(spec, meter).t_m;
    const auto n = static_cast<std::size_t>(std::ceil(o.t_end_over_t_m * o.samples_per_t_m));
    std::vector<double> times(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        times[i] = o.t_end_over_t_m * t_m * static_cast<double>(i) / static_cast<double>(n);
    }
    return integrate_measurement(spec, meter, std::move(times));
}

inline SweepConfig preset_sweep(const std::string& name, const PresetOptions& o) {
    SweepConfig c;
    c.parallelism = o.jobs;
    if (name == "fig3") {
        c.model = Model::two_qubit;
        c.parameters = {Range::logspace("gamma", 1e-3, 1e3, 601)};
        c.fixed = {{"sum", 1.0}, {"delta", 0.0}};
    } else if (name == "fig4") {
        c.model = Model::two_osc;
        c.parameters = {Range::linear("k0", 0.01, 1.0, 100), Range::linear("g", 0.0, 1.0, 101)};
    } else if (name == "fig5") {
        c.model = Model::chain_ff;
        c.parameters = {Range::linear("g", 0.0, 3.0, 301), Range::linear("n", 3.0, 100.0, 98)};
        c.fixed = {{"omega", 1.0}};
    } else {
        throw ConfigError("preset: no sweep for '" + name + "'");
    }
    return c;
}

inline ResultTable fig8_table(const PresetOptions& o) {
    const int caps[3] = {o.m_cap_1d, o.m_cap_2d, o.m_cap_3d};
    ResultTable all;
    for (int dim = 1; dim <= 3; ++dim) {
        if (caps[dim - 1] < 2) {
            throw ConfigError("fig8: the cap on M for D=" + std::to_string(dim) + " must be at least 2");
        }
        SweepConfig c;
        c.model = Model::lattice;
        c.parallelism = o.jobs;
        c.parameters = {Range::linear("m_side", 2.0, caps[dim - 1], caps[dim - 1] - 1)};
        c.fixed = {{"dim", dim}, {"k0", 1.0}, {"route", "mode_sum"}};
        auto t = project(run_sweep(c), {"m_side", "n", "work_per_oscillator", "efficiency"});
        all.columns = {"dim", "m_side", "n", "work_per_oscillator", "efficiency"};
        for (auto& row : t.rows) {
            row.insert(row.begin(), Cell{static_cast<long long>(dim)});
            all.rows.push_back(std::move(row));
        }
    }
    return all;
}

} // namespace detail

/// The dataset behind one figure, without touching the filesystem.
inline ResultTable preset_table(const std::string& name, const PresetOptions& o = {}) {
    if (name == "fig3") {
        return project(run_sweep(detail::preset_sweep(name, o)), {"gamma", "work_over_sum", "efficiency"});
    }
    if (name == "fig4") {
        return project(run_sweep(detail::preset_sweep(name, o)), {"k0", "g", "work", "efficiency"});
    }
    if (name == "fig5") {
        return project(run_sweep(detail::preset_sweep(name, o)), {"g", "n", "work_per_site", "efficiency"},
                       {"g_over_omega", "n", "work_per_qubit", "efficiency"});
    }
    if (name == "fig8") {
        return detail::fig8_table(o);
    }
    if (name == "figA6") {
        return trajectory_probability_table(detail::trajectory_figure(o));
    }
    if (name == "figA7") {
        return trajectory_energy_table(detail::trajectory_figure(o));
    }
    std::string known;
    for (const auto& n : preset_names()) {
        known += (known.empty() ? "" : ", ") + n;
    }
    throw ConfigError("preset: unknown name '" + name + "' (expected one of " + known + ")");
}

inline nlohmann::ordered_json preset_parameters(const std::string& name, const PresetOptions& o) {
    nlohmann::ordered_json p;
    p["preset"] = name;
    if (name == "fig3" || name == "fig4" || name == "fig5") {
        p["sweep"] = detail::preset_sweep(name, o).to_json();
        p["sweep"].erase("output");
    } else if (name == "fig8") {
        p["model"] = "lattice";
        p["k0"] = 1.0;
        p["m_side_start"] = 2;
        p["m_cap"] = {{"1", o.m_cap_1d}, {"2", o.m_cap_2d}, {"3", o.m_cap_3d}};
        p["route"] = "mode_sum";
    } else {
        const auto s = detail::trajectory_figure_qubits();
        p["omega_a"] = s.omega_a;
        p["omega_b"] = s.omega_b;
        p["g"] = s.g;
        p["g_m"] = detail::trajectory_figure_meter().g_m;
        p["t_m"] = measurement_time(s, detail::trajectory_figure_meter()).t_m;
        p["t_end_over_t_m"] = o.t_end_over_t_m;
        p["samples_per_t_m"] = o.samples_per_t_m;
    }
    return p;
}

/// Writes <out_dir>/<name>.csv (or .json) with its manifest and returns the data file path.
inline std::filesystem::path run_preset(const std::string& name, const PresetOptions& o = {}) {
    const auto start = std::chrono::steady_clock::now();
    const ResultTable t = preset_table(name, o);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Manifest m;
    m.kind = "preset:" + name;
    m.parameters = preset_parameters(name, o);
    m.runtime_seconds = seconds;
    const auto path = o.out_dir / (name + (o.format == OutputFormat::csv ? ".csv" : ".json"));
    write_table_file(path, t, o.format, m);
    return path;
}

} // namespace qvfe
