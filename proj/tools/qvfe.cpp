// qvfe: command-line front end for the engine models.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qvfe/qvfe.hpp"

namespace {

using nlohmann::json;
using namespace qvfe;

enum ExitCode { kOk = 0, kConfigError = 1, kValidationFailure = 2, kRuntimeError = 3 };

const auto kStart = std::chrono::steady_clock::now();

double elapsed() { return std::chrono::duration<double>(std::chrono::steady_clock::now() - kStart).count(); }

struct Globals {
    std::string output;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
};

/// Writes to --output (with manifest) or to stdout.
void emit(const Globals& g, const ResultTable& t, const std::string& kind, const json& params) {
    const OutputFormat f = parse_format(g.format);
    if (g.output.empty()) {
        write_table(std::cout, t, f);
        std::cout.flush();
        return;
    }
    Manifest m;
    m.kind = kind;
    m.parameters = nlohmann::ordered_json::parse(params.dump());
    m.runtime_seconds = elapsed();
    write_table_file(g.output, t, f, m);
}

ResultTable distribution_table(const OutcomeDistribution& d) {
    ResultTable t;
    t.columns = {"basis_index", "excitation_count", "probability", "work_value"};
    for (std::size_t l = 0; l < d.probabilities.size(); ++l) {
        t.rows.push_back({static_cast<long long>(l), static_cast<long long>(excitation_count(l)), d.probabilities[l],
                          d.work_values[l]});
    }
    return t;
}

ResultTable samples_table(const OutcomeDistribution& d, const CycleSampling& s) {
    ResultTable t;
    t.columns = {"basis_index", "excitation_count", "probability", "work_value"};
    for (const auto& r : s.records) {
        t.rows.push_back({static_cast<long long>(r.basis_index), static_cast<long long>(excitation_count(r.basis_index)),
                          d.probabilities[r.basis_index], r.work});
    }
    return t;
}

/// Qubit-pair options shared by two-qubit and dynamics.
struct QubitOptions {
    double omega_a = 0, omega_b = 0, g = 0, gamma = 0, delta = 0, sum = 1;
    CLI::Option *o_a = nullptr, *o_b = nullptr, *o_g = nullptr, *o_gamma = nullptr, *o_delta = nullptr,
                *o_sum = nullptr;

    void add(CLI::App* app) {
        o_a = app->add_option("--omega-a", omega_a, "Frequency of qubit A");
        o_b = app->add_option("--omega-b", omega_b, "Frequency of qubit B (<= omega_a)");
        o_g = app->add_option("--g", g, "Coupling strength");
        o_gamma = app->add_option("--gamma", gamma, "Dimensionless coupling g / (omega_a + omega_b)");
        o_delta = app->add_option("--delta", delta, "Dimensionless detuning, in [0, 1)");
        o_sum = app->add_option("--sum", sum, "omega_a + omega_b (with --gamma)");
    }

    json fixed() const {
        json j = json::object();
        if (o_a->count()) j["omega_a"] = omega_a;
        if (o_b->count()) j["omega_b"] = omega_b;
        if (o_g->count()) j["g"] = g;
        if (o_gamma->count()) j["gamma"] = gamma;
        if (o_delta->count()) j["delta"] = delta;
        if (o_sum->count()) j["sum"] = sum;
        return j;
    }
};

TwoQubitSpec qubit_spec(const json& fixed) {
    SweepConfig c;
    c.model = Model::two_qubit;
    for (const char* k : {"omega_a", "omega_b", "g", "gamma", "delta", "sum"}) {
        if (fixed.contains(k)) {
            c.fixed[k] = fixed[k];
        }
    }
    c.validate();
    const std::map<std::string, double> none;
    return detail::two_qubit_spec(detail::Point(none, c.fixed));
}

int run(int argc, char** argv) {
    CLI::App app{"Measurement-driven engines fuelled by ground-state entanglement: metrics, sweeps, datasets, validation."};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--output", g.output, "Output file (preset: directory); stdout when omitted");
    app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--jobs", g.jobs, "Worker threads (0: all cores)");

    // two-qubit
    auto* two = app.add_subcommand("two-qubit", "Two coupled qubits: closed-form metrics");
    QubitOptions two_q;
    two_q.add(two);
    bool two_outcomes = false;
    std::size_t two_samples = 0;
    two->add_flag("--outcomes", two_outcomes, "Emit the measurement outcome distribution instead");
    two->add_option("--samples", two_samples, "Emit this many sampled cycles instead");

    // chain
    auto* chain = app.add_subcommand("chain", "Transverse-field Ising chain");
    int chain_n = 0;
    double chain_g = 0.0, chain_omega = 1.0;
    std::string chain_method = "ff", chain_boundary = "closed";
    bool chain_outcomes = false;
    std::size_t chain_samples = 0;
    chain->add_option("--n", chain_n, "Number of qubits")->required();
    chain->add_option("--g", chain_g, "Coupling strength")->required();
    chain->add_option("--omega", chain_omega, "Qubit frequency");
    chain->add_option("--method", chain_method, "ff (free fermions) or exact")->check(CLI::IsMember({"ff", "exact"}));
    chain->add_option("--boundary", chain_boundary, "closed or open (exact only)")
        ->check(CLI::IsMember({"closed", "open"}));
    chain->add_flag("--outcomes", chain_outcomes, "Emit the outcome distribution (exact)");
    chain->add_option("--samples", chain_samples, "Emit this many sampled cycles (exact)");

    // open-chain
    auto* open = app.add_subcommand("open-chain", "Open chain in the weak or deep-strong coupling limit");
    int open_n = 0;
    double open_g = 0.0, open_omega = 1.0;
    std::vector<double> open_omegas, open_couplings;
    std::string open_regime = "weak";
    auto* o_open_n = open->add_option("--n", open_n, "Number of qubits (uniform chain)");
    open->add_option("--g", open_g, "Coupling (uniform chain)");
    open->add_option("--omega", open_omega, "Frequency (uniform chain)");
    auto* o_open_w = open->add_option("--omegas", open_omegas, "Site frequencies, comma separated")->delimiter(',');
    open->add_option("--couplings", open_couplings, "Bond couplings, comma separated")->delimiter(',');
    open->add_option("--regime", open_regime, "weak, strong or exact")
        ->check(CLI::IsMember({"weak", "strong", "exact"}));
    o_open_n->excludes(o_open_w);

    // oscillator
    auto* osc = app.add_subcommand("oscillator", "Two coupled oscillators or a general network");
    double osc_k0 = 1.0, osc_g = 0.0;
    std::string osc_matrix;
    int osc_random = 0, osc_nmax = -1;
    auto* o_osc_k0 = osc->add_option("--k0", osc_k0, "Local spring constant (two oscillators)");
    osc->add_option("--g", osc_g, "Coupling spring constant (two oscillators)");
    auto* o_osc_m = osc->add_option("--matrix", osc_matrix, "JSON file with the coupling matrix K");
    auto* o_osc_r = osc->add_option("--random", osc_random, "Random SPD network of this size (uses --seed)");
    osc->add_option("--probabilities", osc_nmax, "Emit outcome probabilities up to this occupation (two oscillators)");
    o_osc_m->excludes(o_osc_r);
    o_osc_m->excludes(o_osc_k0);
    o_osc_r->excludes(o_osc_k0);

    // lattice
    auto* lat = app.add_subcommand("lattice", "Cubic oscillator lattice with fixed ends");
    int lat_dim = 1, lat_m = 0;
    double lat_k0 = 1.0;
    std::string lat_route = "auto";
    lat->add_option("--dim", lat_dim, "Dimension (1 is the linear chain)");
    lat->add_option("--m-side", lat_m, "Oscillators per side")->required();
    lat->add_option("--k0", lat_k0, "Spring constant");
    lat->add_option("--route", lat_route, "auto, dense or mode_sum")->check(CLI::IsMember({"auto", "dense", "mode_sum"}));

    // dynamics
    auto* dyn = app.add_subcommand("dynamics", "Measurement and relaxation dynamics of the two-qubit cycle");
    QubitOptions dyn_q;
    dyn_q.add(dyn);
    double dyn_gm = 0.0, dyn_gamma_m = 50.0, dyn_k = 0.01, dyn_temp = 0.0, dyn_t_end = 2.0;
    int dyn_points = 500;
    bool dyn_traj = false, dyn_pop = false;
    auto* o_gm = dyn->add_option("--g-m", dyn_gm, "Meter coupling");
    auto* o_gamma_m = dyn->add_option("--gamma-m", dyn_gamma_m, "Meter coupling over (omega_a + omega_b), default 50");
    o_gm->excludes(o_gamma_m);
    dyn->add_option("--spectral-density", dyn_k, "Bath spectral density K");
    dyn->add_option("--temperature", dyn_temp, "Bath temperature (energy units)");
    dyn->add_flag("--trajectory", dyn_traj, "Emit the measurement trajectory");
    dyn->add_flag("--populations", dyn_pop, "Emit relaxation populations after a |00> outcome");
    dyn->add_option("--t-end", dyn_t_end, "Trajectory length in units of t_M (populations: of t_p)");
    dyn->add_option("--points-per-unit", dyn_points, "Samples per t_M (or per t_p)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Parameter sweep from a JSON config");
    std::string sweep_config;
    sweep->add_option("--config", sweep_config, "Sweep config file")->required();

    // preset
    auto* preset = app.add_subcommand("preset", "Write a figure dataset and its manifest");
    std::string preset_name;
    PresetOptions popts;
    preset->add_option("name", preset_name, "fig3, fig4, fig5, fig8, figA6 or figA7")->required();
    preset->add_option("--m-cap-1d", popts.m_cap_1d, "fig8: largest side for D=1");
    preset->add_option("--m-cap-2d", popts.m_cap_2d, "fig8: largest side for D=2");
    preset->add_option("--m-cap-3d", popts.m_cap_3d, "fig8: largest side for D=3");

    // validate
    auto* val = app.add_subcommand("validate", "Run the oracle cross-checks");
    bool val_full = false;
    val->add_flag("--full", val_full, "N up to 12 and 1e6 Monte Carlo samples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    const std::uint64_t seed = g.seed.value_or(0);
    const unsigned jobs = g.jobs.value_or(1);

    if (*two) {
        const json fixed = two_q.fixed();
        if (two_outcomes || two_samples > 0) {
            const auto spec = qubit_spec(fixed);
            const auto dist = outcome_distribution(spec.as_chain());
            if (two_samples > 0) {
                emit(g, samples_table(dist, sample_cycles(dist, two_samples, seed, {jobs, true})), "two-qubit:samples",
                     {{"qubits", fixed}, {"samples", two_samples}, {"seed", seed}});
            } else {
                emit(g, distribution_table(dist), "two-qubit:outcomes", fixed);
            }
            return kOk;
        }
        emit(g, evaluate_single(Model::two_qubit, fixed), "two-qubit", fixed);
        return kOk;
    }

    if (*chain) {
        json fixed{{"n", chain_n}, {"g", chain_g}, {"omega", chain_omega}};
        const bool exact = chain_method == "exact";
        if (!exact && (chain_boundary == "open" || chain_outcomes || chain_samples > 0)) {
            throw ConfigError("--boundary open, --outcomes and --samples need --method exact");
        }
        if (exact) {
            fixed["boundary"] = chain_boundary;
            if (chain_outcomes || chain_samples > 0) {
                const std::size_t bonds = chain_boundary == "open" ? chain_n - 1 : chain_n;
                if (chain_n < 2 || chain_n > kDefaultMaxQubits) {
                    throw SizeExceeded("exact chain needs 2 <= n <= " + std::to_string(kDefaultMaxQubits));
                }
                const QubitChainSpec spec{std::vector<double>(chain_n, chain_omega), std::vector<double>(bonds, chain_g),
                                          chain_boundary == "open" ? Boundary::open : Boundary::closed};
                const auto dist = outcome_distribution(spec);
                if (chain_samples > 0) {
                    fixed["samples"] = chain_samples;
                    fixed["seed"] = seed;
                    emit(g, samples_table(dist, sample_cycles(dist, chain_samples, seed, {jobs, true})),
                         "chain:samples", fixed);
                } else {
                    emit(g, distribution_table(dist), "chain:outcomes", fixed);
                }
                return kOk;
            }
        }
        emit(g, evaluate_single(exact ? Model::chain_exact : Model::chain_ff, fixed), "chain:" + chain_method, fixed);
        return kOk;
    }

    if (*open) {
        OpenChainSpec spec;
        if (!open_omegas.empty()) {
            spec = OpenChainSpec{open_omegas, open_couplings};
        } else {
            if (!o_open_n->count()) {
                throw ConfigError("open-chain: give --n (with --g, --omega) or --omegas and --couplings");
            }
            spec = OpenChainSpec::uniform(open_n, open_omega, open_g);
        }
        spec.validate();
        EngineMetrics m;
        std::string warning;
        if (open_regime == "weak") {
            const auto r = weak_coupling_metrics(spec);
            m = r.metrics;
            warning = r.warning;
        } else if (open_regime == "strong") {
            const auto r = strong_coupling_metrics(spec);
            m = r.metrics;
            warning = r.warning;
        } else {
            m = engine_metrics_exact(spec.as_chain());
        }
        if (!warning.empty()) {
            std::cerr << "warning: " << warning << '\n';
        }
        ResultTable t;
        t.columns = {"n", "work", "heat", "gap", "efficiency", "std_dev", "warning"};
        t.rows.push_back({static_cast<long long>(spec.size()), m.work(), m.heat(), m.gap(),
                          optional_cell(m.efficiency()), m.std_dev(), warning});
        emit(g, t, "open-chain:" + open_regime,
             {{"omegas", spec.omegas}, {"couplings", spec.couplings}, {"regime", open_regime}});
        return kOk;
    }

    if (*osc) {
        if (osc_nmax >= 0) {
            if (o_osc_m->count() || o_osc_r->count()) {
                throw ConfigError("--probabilities applies to the two-oscillator model only");
            }
            const TwoOscSpec spec{osc_k0, osc_g};
            const auto p = two_oscillator_probabilities(spec, osc_nmax);
            ResultTable t;
            t.columns = {"n1", "n2", "probability"};
            for (int a = 0; a <= osc_nmax; ++a) {
                for (int b = 0; b <= osc_nmax; ++b) {
                    t.rows.push_back({static_cast<long long>(a), static_cast<long long>(b), p.p(a, b)});
                }
            }
            emit(g, t, "oscillator:probabilities",
                 {{"k0", osc_k0}, {"g", osc_g}, {"n_max", osc_nmax}, {"total", p.total}, {"tail", p.tail}});
            return kOk;
        }
        if (o_osc_m->count()) {
            std::ifstream in(osc_matrix);
            if (!in) {
                throw ConfigError("--matrix: cannot open '" + osc_matrix + "'");
            }
            json doc;
            try {
                doc = json::parse(in);
            } catch (const json::parse_error& e) {
                throw ConfigError("--matrix: " + osc_matrix + " is not valid JSON: " + e.what());
            }
            const json k = doc.is_object() && doc.contains("k") ? doc["k"] : doc;
            const json fixed{{"k", k}};
            emit(g, evaluate_single(Model::network, fixed), "oscillator:network", fixed);
            return kOk;
        }
        if (o_osc_r->count()) {
            const json fixed{{"random_n", osc_random}};
            emit(g, evaluate_single(Model::network, fixed, seed), "oscillator:random-network",
                 {{"random_n", osc_random}, {"seed", seed}});
            return kOk;
        }
        const json fixed{{"k0", osc_k0}, {"g", osc_g}};
        emit(g, evaluate_single(Model::two_osc, fixed), "oscillator", fixed);
        return kOk;
    }

    if (*lat) {
        const json fixed{{"dim", lat_dim}, {"m_side", lat_m}, {"k0", lat_k0}, {"route", lat_route}};
        emit(g, evaluate_single(Model::lattice, fixed), "lattice", fixed);
        return kOk;
    }

    if (*dyn) {
        json fixed = dyn_q.fixed();
        if (o_gm->count()) {
            fixed["g_m"] = dyn_gm;
        } else {
            fixed["gamma_m"] = dyn_gamma_m;
        }
        fixed["spectral_density"] = dyn_k;
        fixed["temperature"] = dyn_temp;
        if (dyn_traj && dyn_pop) {
            throw ConfigError("give at most one of --trajectory and --populations");
        }
        if (!(dyn_t_end > 0.0) || dyn_points < 1) {
            throw ConfigError("--t-end must be positive and --points-per-unit at least 1");
        }
        const auto spec = qubit_spec(fixed);
        const MeterSpec meter{o_gm->count() ? dyn_gm : dyn_gamma_m * spec.sum()};
        if (dyn_traj) {
            meter.validate(true);
            const double t_m = measurement_time(spec, meter).t_m;
            const auto n = static_cast<std::size_t>(std::ceil(dyn_t_end * dyn_points));
            std::vector<double> times(n + 1);
            for (std::size_t i = 0; i <= n; ++i) {
                times[i] = dyn_t_end * t_m * static_cast<double>(i) / static_cast<double>(n);
            }
            const auto traj = integrate_measurement(spec, meter, times);
            auto t = trajectory_probability_table(traj);
            const auto e = trajectory_energy_table(traj);
            for (std::size_t c = 1; c < e.columns.size(); ++c) {
                t.columns.push_back(e.columns[c]);
                for (std::size_t r = 0; r < t.rows.size(); ++r) {
                    t.rows[r].push_back(e.rows[r][c]);
                }
            }
            fixed["t_m"] = t_m;
            emit(g, t, "dynamics:trajectory", fixed);
            return kOk;
        }
        if (dyn_pop) {
            const auto rates = relaxation_rates(spec, {dyn_k, dyn_temp});
            if (rates.low_temperature_warning) {
                std::cerr << "warning: " << rates.warning << '\n';
            }
            const auto n = static_cast<std::size_t>(std::ceil(dyn_t_end * dyn_points));
            ResultTable t;
            t.columns = {"t", "p_phi_plus", "p_psi_plus", "p_psi_minus", "p_phi_minus", "coherence"};
            const auto p0 = populations_after_reset(spec);
            for (std::size_t i = 0; i <= n; ++i) {
                const double time = dyn_t_end * rates.t_p * static_cast<double>(i) / static_cast<double>(n);
                const auto p = populations_at(p0, rates, time);
                t.rows.push_back({time, p[0], p[1], p[2], p[3], coherence_magnitude(spec, rates, time)});
            }
            fixed["t_p"] = rates.t_p;
            fixed["t_c"] = rates.t_c;
            emit(g, t, "dynamics:populations", fixed);
            return kOk;
        }
        emit(g, evaluate_single(Model::dynamics, fixed), "dynamics", fixed);
        return kOk;
    }

    if (*sweep) {
        auto cfg = SweepConfig::from_file(sweep_config);
        if (!g.output.empty()) cfg.output_path = g.output;
        if (app.get_option("--format")->count()) cfg.format = parse_format(g.format);
        if (g.seed) cfg.seed = *g.seed;
        if (g.jobs) cfg.parallelism = *g.jobs;
        const auto table = run_sweep(cfg);
        std::size_t failed = 0;
        const auto err_col = table.column_index("error");
        for (const auto& row : table.rows) {
            failed += !std::get<std::string>(row[err_col]).empty();
        }
        if (failed > 0) {
            std::cerr << "warning: " << failed << " of " << table.rows.size() << " points failed (see the error column)\n";
        }
        if (cfg.output_path.empty()) {
            write_table(std::cout, table, cfg.format);
        } else {
            Manifest m;
            m.kind = "sweep";
            m.parameters = cfg.to_json();
            m.runtime_seconds = elapsed();
            write_table_file(cfg.output_path, table, cfg.format, m);
        }
        return kOk;
    }

    if (*preset) {
        popts.out_dir = g.output.empty() ? "." : g.output;
        popts.format = parse_format(g.format);
        popts.jobs = jobs;
        const auto path = run_preset(preset_name, popts);
        std::cerr << "wrote " << path.string() << " and " << manifest_path(path).string() << '\n';
        return kOk;
    }

    if (*val) {
        const auto level = val_full ? ValidationLevel::full : ValidationLevel::quick;
        const auto report = run_validation(level, jobs);
        for (const auto& s : report.suites) {
            std::cerr << (s.passed() ? "PASS " : "FAIL ") << s.name << " (" << s.checks << " checks, " << s.seconds
                      << " s)" << (s.passed() ? "" : ": " + s.first_failure) << '\n';
        }
        const auto j = report.to_json();
        const std::string text = g.format == "csv" ? [&] {
            ResultTable t;
            t.columns = {"suite", "passed", "checks", "failures", "seconds", "first_failure"};
            for (const auto& s : report.suites) {
                t.rows.push_back({s.name, static_cast<long long>(s.passed()), static_cast<long long>(s.checks),
                                  static_cast<long long>(s.failures), s.seconds, s.first_failure});
            }
            return render_table(t, OutputFormat::csv);
        }() : j.dump(2) + "\n";
        if (g.output.empty()) {
            std::cout << text;
        } else {
            write_text_file(g.output, text);
            Manifest m;
            m.kind = "validate";
            m.parameters = {{"level", val_full ? "full" : "quick"}};
            m.files = {std::filesystem::path(g.output).filename().string()};
            m.rows = report.suites.size();
            m.runtime_seconds = elapsed();
            write_manifest(g.output, m);
        }
        return report.passed() ? kOk : kValidationFailure;
    }
    return kConfigError;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const qvfe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const qvfe::InvalidSpec& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}
