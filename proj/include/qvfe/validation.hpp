#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "qvfe/cycle_dynamics.hpp"
#include "qvfe/manifest.hpp"
#include "qvfe/open_chain.hpp"
#include "qvfe/oracles.hpp"
#include "qvfe/oscillator_network.hpp"
#include "qvfe/qubit_chain_ff.hpp"
#include "qvfe/qubit_exact.hpp"
#include "qvfe/sweep.hpp"
#include "qvfe/two_qubit.hpp"

namespace qvfe {

enum class ValidationLevel { quick, full };

struct ValidationSettings {
    int max_ed_sites = 8;               // closed-chain ED comparisons run N = 3..max_ed_sites
    std::size_t monte_carlo_samples = 100'000;
    int random_matrices = 200;          // heat-positivity trials
    std::uint64_t seed = 2024;
    unsigned jobs = 1;

    static ValidationSettings for_level(ValidationLevel level) {
        ValidationSettings s;
        if (level == ValidationLevel::full) {
            s.max_ed_sites = 12;
            s.monte_carlo_samples = 1'000'000;
            s.random_matrices = 1000;
        }
        return s;
    }
};

struct SuiteResult {
    std::string name;
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::string first_failure;
    double seconds = 0.0;

    bool passed() const noexcept { return failures == 0 && checks > 0; }
};

/// Records pass/fail for one suite; messages are built only on failure.
class Checker {
public:
    explicit Checker(SuiteResult& r) : r_(r) {}

    bool expect(bool ok, const std::function<std::string()>& what) {
        ++r_.checks;
        if (!ok) {
            fail(what());
        }
        return ok;
    }

    bool near(double a, double b, double tol, const std::string& what) {
        return expect(std::abs(a - b) <= tol, [&] { return describe(what, a, b, std::abs(a - b), tol); });
    }

    bool relative(double a, double b, double tol, const std::string& what) {
        const double scale = std::max(std::abs(a), std::abs(b));
        const double err = scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
        return expect(err <= tol, [&] { return describe(what + " (relative)", a, b, err, tol); });
    }

    void fail(const std::string& msg) {
        ++r_.failures;
        if (r_.first_failure.empty()) {
            r_.first_failure = msg;
        }
    }

private:
    static std::string describe(const std::string& what, double a, double b, double err, double tol) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": " << a << " vs " << b << ", error " << err << " > " << tol;
        return os.str();
    }

    SuiteResult& r_;
};

struct ValidationReport {
    ValidationLevel level = ValidationLevel::quick;
    std::vector<SuiteResult> suites;

    bool passed() const {
        return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["level"] = level == ValidationLevel::full ? "full" : "quick";
        j["version"] = kVersion;
        j["passed"] = passed();
        j["suites"] = nlohmann::ordered_json::array();
        for (const auto& s : suites) {
            nlohmann::ordered_json o;
            o["name"] = s.name;
            o["passed"] = s.passed();
            o["checks"] = s.checks;
            o["failures"] = s.failures;
            o["first_failure"] = s.first_failure;
            o["seconds"] = s.seconds;
            j["suites"].push_back(std::move(o));
        }
        return j;
    }
};

namespace detail {

template <typename Body>
SuiteResult run_suite(const std::string& name, Body&& body) {
    SuiteResult r;
    r.name = name;
    const auto start = std::chrono::steady_clock::now();
    Checker c(r);
    try {
        body(c);
    } catch (const std::exception& e) {
        c.fail(std::string("exception: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

inline std::string ctx(std::initializer_list<std::pair<const char*, double>> kv) {
    std::ostringstream os;
    os.precision(6);
    bool first = true;
    for (const auto& [k, v] : kv) {
        os << (first ? "" : " ") << k << "=" << v;
        first = false;
    }
    return os.str();
}

inline void compare_metrics(Checker& c, const EngineMetrics& a, const EngineMetrics& b, double tol,
                            const std::string& where) {
    c.relative(a.work(), b.work(), tol, where + " work");
    c.relative(a.heat(), b.heat(), tol, where + " heat");
    c.relative(a.gap(), b.gap(), tol, where + " gap");
    c.relative(a.std_dev(), b.std_dev(), tol, where + " std_dev");
    if (c.expect(a.efficiency_defined() == b.efficiency_defined(),
                 [&] { return where + " efficiency defined on one side only"; }) &&
        a.efficiency_defined()) {
        c.relative(*a.efficiency(), *b.efficiency(), tol, where + " efficiency");
    }
}

} // namespace detail

inline const std::vector<double>& ff_vs_ed_couplings() {
    static const std::vector<double> g{0.1, 0.5, 0.9, 1.0, 1.1, 2.0, 10.0};
    return g;
}

/// Free-fermion closed chain against exact diagonalization. `mode_fn` builds the
/// Bogoliubov modes, so a deliberately broken builder can be checked to fail.
template <typename ModeFn>
SuiteResult validate_ff_vs_ed(const ValidationSettings& s, ModeFn&& mode_fn) {
    return detail::run_suite("ff_vs_ed", [&](Checker& c) {
        for (int n = 3; n <= s.max_ed_sites; ++n) {
            for (double g : ff_vs_ed_couplings()) {
                const auto ff = metrics_closed_chain_with(n, 1.0, g, mode_fn);
                const auto ed = engine_metrics_exact(QubitChainSpec::uniform(n, 1.0, g));
                detail::compare_metrics(c, ff, ed, 1e-8, detail::ctx({{"N", n}, {"g", g}}));
            }
        }
    });
}

inline SuiteResult validate_ff_vs_ed(const ValidationSettings& s) {
    return validate_ff_vs_ed(s, [](double w, double g, double p) { return mode(w, g, p); });
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
    }
    return v;
}

inline SuiteResult validate_two_qubit_vs_ed(const ValidationSettings&) {
    return detail::run_suite("two_qubit_vs_ed", [&](Checker& c) {
        for (double delta : {0.0, 0.3, 0.9}) {
            for (double gamma : log_grid(1e-3, 1e3, 50)) {
                const auto spec = TwoQubitSpec::from_dimensionless(2.0, gamma, delta);
                detail::compare_metrics(c, metrics(spec), engine_metrics_exact(spec.as_chain()), 1e-12,
                                        detail::ctx({{"gamma", gamma}, {"delta", delta}}));
            }
        }
    });
}

inline SuiteResult validate_critical_point(const ValidationSettings&) {
    return detail::run_suite("critical_point", [&](Checker& c) {
        constexpr double pi = std::numbers::pi;
        const auto lim = thermodynamic_limit(1.0, 1.0);
        c.near(lim.work_per_site, 0.5 - 1.0 / pi, 1e-12, "thermodynamic W/(N omega)");
        c.near(*lim.efficiency, pi / 2.0 - 1.0, 1e-12, "thermodynamic efficiency");
        const auto m = metrics_closed_chain(2000, 1.0, 1.0);
        c.near(m.work() / 2000.0, 0.182, 1e-3, "N=2000 W/(N omega)");
        c.near(*m.efficiency(), 0.571, 1e-3, "N=2000 efficiency");
        for (double g : {0.5, 2.0}) {
            const auto f = metrics_closed_chain(4000, 1.0, g);
            c.near(f.std_dev() / std::sqrt(4000.0), 0.5 * std::min(1.0, g), 1e-3, detail::ctx({{"sigma/sqrtN g", g}}));
        }
        for (int n : {5, 6}) {
            const auto w = metrics_closed_chain(n, 1.0, 50.0).work();
            const double expect = n == 6 ? 3.0 : 1.5;
            c.near(w, expect, 0.02 * expect, detail::ctx({{"frustration W N", n}}));
            c.relative(engine_metrics_exact(QubitChainSpec::uniform(n, 1.0, 50.0)).work(), w, 1e-8,
                       detail::ctx({{"frustration ED N", n}}));
        }
    });
}

inline SuiteResult validate_open_chain(const ValidationSettings& s) {
    return detail::run_suite("open_chain_vs_ed", [&](Checker& c) {
        KeyedRng rng(s.seed, 11);
        auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
        const int n_max = std::min(s.max_ed_sites, 10);
        for (int n = 2; n <= n_max; ++n) {
            OpenChainSpec weak, strong;
            for (int j = 0; j < n; ++j) {
                weak.omegas.push_back(uniform(0.6, 2.0));
                strong.omegas.push_back(uniform(0.5, 1.5));
            }
            double ratio = 0.0;
            for (int j = 0; j + 1 < n; ++j) {
                weak.couplings.push_back(uniform(0.001, 0.04));
                strong.couplings.push_back(uniform(200.0, 400.0));
                ratio = std::max(ratio, weak.couplings.back() / (weak.omegas[j] + weak.omegas[j + 1]));
            }
            const auto w = weak_coupling_metrics(weak).metrics;
            const auto we = engine_metrics_exact(weak.as_chain());
            const double tol = 10.0 * ratio * ratio;
            c.relative(w.work(), we.work(), tol, detail::ctx({{"weak work N", n}}));
            c.relative(w.gap(), we.gap(), tol, detail::ctx({{"weak gap N", n}}));
            c.relative(w.std_dev(), we.std_dev(), tol, detail::ctx({{"weak sigma N", n}}));
            const auto st = strong_coupling_metrics(strong).metrics;
            const auto se = engine_metrics_exact(strong.as_chain());
            c.relative(st.work(), se.work(), 0.01, detail::ctx({{"strong work N", n}}));
            c.relative(st.gap(), se.gap(), 0.01, detail::ctx({{"strong gap N", n}}));
            c.relative(st.std_dev(), se.std_dev(), 0.01, detail::ctx({{"strong sigma N", n}}));
        }
    });
}

inline SuiteResult validate_measurement_dynamics(const ValidationSettings&) {
    return detail::run_suite("measurement_dynamics", [&](Checker& c) {
        const TwoQubitSpec spec{0.5, 0.5, 10.0};
        const MeterSpec meter{50.0};
        const double t_m = measurement_time(spec, meter).t_m;
        const auto traj = evolve_measurement(spec, meter, 3.0 * t_m, t_m / 200.0);
        double amp_err = 0.0, norm_err = 0.0;
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const auto a = analytic_amplitudes(spec, meter, traj.times[i]);
            const auto& x = traj.amplitudes[i];
            amp_err = std::max({amp_err, std::abs(x[amp::k000] - a.psi000), std::abs(x[amp::k001] - a.psi001),
                                std::abs(x[amp::k110] - a.psi110), std::abs(x[amp::k111] - a.psi111)});
            norm_err = std::max(norm_err, std::abs(norm_squared(x) - 1.0));
        }
        c.near(amp_err, 0.0, 1e-8, "ODE vs analytic amplitudes");
        c.near(norm_err, 0.0, 1e-9, "norm drift");
        const double peak = first_local_maximum(
            [&](double t) { return std::norm(analytic_amplitudes(spec, meter, t).psi111); }, 3.0 * t_m);
        c.near(peak / t_m, 1.0, 0.1, "first |psi111|^2 peak / t_M");
    });
}

inline SuiteResult validate_relaxation(const ValidationSettings& s) {
    return detail::run_suite("relaxation", [&](Checker& c) {
        using Matrix4l = Eigen::Matrix<long double, 4, 4>;
        KeyedRng rng(s.seed, 12);
        for (int trial = 0; trial < 100; ++trial) {
            const auto spec = TwoQubitSpec::from_dimensionless(
                2.0, std::pow(10.0, -2.0 + 4.0 * rng.uniform()), 0.05 + 0.94 * rng.uniform());
            const auto r = relaxation_rates(spec, {0.01, 0.0});
            Eigen::Matrix<long double, 4, 1> ev =
                Eigen::EigenSolver<Matrix4l>(rate_matrix(r).cast<long double>()).eigenvalues().real();
            std::sort(ev.data(), ev.data() + 4);
            std::vector<double> expect{0.0, r.gamma_minus, r.gamma_plus, r.gamma_plus + r.gamma_minus};
            std::sort(expect.begin(), expect.end());
            for (int i = 0; i < 4; ++i) {
                c.near(static_cast<double>(ev(i)), expect[static_cast<std::size_t>(i)], 1e-12, "rate eigenvalue");
            }
            c.expect(populations_at(populations_after_reset(spec), r, 5.0 * r.t_p)[3] >= 0.99,
                     [&] { return "post-measurement state short of 0.99 at 5 t_p"; });
        }
    });
}

inline SuiteResult validate_two_oscillator(const ValidationSettings&) {
    return detail::run_suite("two_oscillator_routes", [&](Checker& c) {
        for (double k0 : {0.1, 0.5, 1.0, 10.0, 100.0}) {
            for (double g : {0.0, 1e-3, 0.1, 0.5, 1.0, 3.0, 10.0, 30.0}) {
                const TwoOscSpec spec{k0, g};
                const auto a = metrics_two_oscillator(spec);
                const auto net = solve_network(spec.coupling_matrix());
                const double tol = 1e-12 * std::max(1.0, net.energies.e_loc_expect);
                const auto where = detail::ctx({{"k0", k0}, {"g", g}});
                c.near(a.work(), net.metrics.work(), tol, where + " work");
                c.near(a.heat(), net.metrics.heat(), tol, where + " heat");
                c.near(a.gap(), net.metrics.gap(), tol, where + " gap");
                c.near(a.std_dev(), net.metrics.std_dev(), tol, where + " std_dev");
                if (g > 0.0) {
                    c.relative(*a.efficiency(), *net.metrics.efficiency(), 1e-12, where + " efficiency");
                }
            }
        }
        const TwoOscSpec spec{1.0, 1.0};
        const auto p = two_oscillator_probabilities(spec, 40);
        c.near(p.total, 1.0, 1e-10, "probability completeness");
        double energy = 0.0;
        bool odd_zero = true;
        for (int n1 = 0; n1 <= 40; ++n1) {
            for (int n2 = 0; n2 <= 40; ++n2) {
                odd_zero = odd_zero && ((n1 + n2) % 2 == 0 || p.p(n1, n2) == 0.0);
                energy += p.p(n1, n2) * (n1 + n2 + 1) * spec.omega();
            }
        }
        c.near(energy, two_oscillator_local_energy(spec), 1e-8, "probability energy moment");
        c.expect(odd_zero, [] { return std::string("odd-parity probability nonzero"); });
    });
}

inline SuiteResult validate_gaussian_sampling(const ValidationSettings& s) {
    return detail::run_suite("gaussian_monte_carlo", [&](Checker& c) {
        KeyedRng rng(s.seed, 13);
        for (int trial = 0; trial < 5; ++trial) {
            const Eigen::MatrixXd k = oracle::random_spd(5, rng);
            const auto m = metrics_network(k);
            const auto mc = oracle::sample_gaussian_ground_state(k, s.monte_carlo_samples, s.seed + trial, s.jobs);
            c.near(mc.work, m.work(), 4.0 * mc.work_se, detail::ctx({{"work trial", trial}}));
            c.near(mc.sigma, m.std_dev(), 4.0 * mc.sigma_se, detail::ctx({{"sigma trial", trial}}));
        }
    });
}

inline SuiteResult validate_heat_positivity(const ValidationSettings& s) {
    return detail::run_suite("heat_positivity", [&](Checker& c) {
        KeyedRng rng(s.seed, 14);
        for (int trial = 0; trial < s.random_matrices; ++trial) {
            const int n = 1 + static_cast<int>(rng() % 8);
            const Eigen::MatrixXd k = oracle::random_spd(n, rng, 0.01 + rng.uniform());
            const auto cert = heat_positivity_check(k);
            c.expect(cert.q >= -1e-12, [&] { return detail::ctx({{"negative heat trial", trial}, {"Q", cert.q}}); });
            c.near(cert.q, cert.q_symmetric, 1e-9, detail::ctx({{"certificate trial", trial}}));
        }
    });
}

inline SuiteResult validate_linear_chain(const ValidationSettings&) {
    return detail::run_suite("linear_chain_closed_forms", [&](Checker& c) {
        for (int n : {2, 3, 10, 100, 1000}) {
            const auto sol = linear_chain_metrics(n, 1.0);
            c.relative(sol.lattice.sum_frequencies, sol.sum_frequencies_closed, 1e-10, detail::ctx({{"sum Omega N", n}}));
            c.relative(sol.lattice.trace_k_inverse, sol.trace_k_inverse_closed, 1e-10, detail::ctx({{"Tr K^-1 N", n}}));
            c.relative(sol.metrics().std_dev(), sol.sigma_closed, 1e-10, detail::ctx({{"sigma N", n}}));
        }
        const double fitted = fitted_chain_constant(10'000, 1.0);
        c.near(fitted, kChainConstantFitted, 0.08, "fitted chain constant");
        const auto exact = linear_chain_metrics(10'000, 1.0);
        c.relative(linear_chain_asymptotics(10'000, 1.0).e_loc_asym, exact.energies().e_loc_expect, 0.01,
                   "asymptotic <H_loc> at N=1e4");
    });
}

inline SuiteResult validate_cycle_sampler(const ValidationSettings& s) {
    return detail::run_suite("cycle_sampler", [&](Checker& c) {
        struct Case {
            const char* label;
            QubitChainSpec spec;
            EngineMetrics analytic;
        };
        const TwoQubitSpec two{0.5, 0.5, 1.0};
        const Case cases[] = {
            {"N=2 gamma=1", two.as_chain(), metrics(two)},
            {"N=6 g=2", QubitChainSpec::uniform(6, 1.0, 2.0), metrics_closed_chain(6, 1.0, 2.0)},
        };
        std::uint64_t stream = 0;
        for (const auto& k : cases) {
            const auto mc = sample_cycles(k.spec, s.monte_carlo_samples, s.seed + stream++, {s.jobs, false});
            c.near(mc.mean_work, k.analytic.work(), 4.0 * mc.std_error_mean, std::string(k.label) + " mean work");
            c.near(mc.std_work, k.analytic.std_dev(), 4.0 * mc.std_error_std, std::string(k.label) + " work std");
        }
    });
}

inline SuiteResult validate_sweep_determinism(const ValidationSettings& s) {
    return detail::run_suite("sweep_determinism", [&](Checker& c) {
        SweepConfig cfg;
        cfg.model = Model::chain_exact;
        cfg.parameters = {Range::linear("g", 0.2, 2.0, 5), Range::list("n", {3, 4, 5})};
        cfg.fixed = {{"samples", 500}};
        cfg.seed = s.seed;
        cfg.parallelism = 1;
        const auto serial = render_table(run_sweep(cfg), OutputFormat::csv);
        cfg.parallelism = 4;
        const auto parallel = render_table(run_sweep(cfg), OutputFormat::csv);
        c.expect(serial == parallel, [] { return std::string("CSV differs between 1 and 4 workers"); });
    });
}

inline ValidationReport run_validation(ValidationLevel level, unsigned jobs = 1) {
    auto s = ValidationSettings::for_level(level);
    s.jobs = jobs;
    ValidationReport report;
    report.level = level;
    report.suites.push_back(validate_ff_vs_ed(s));
    report.suites.push_back(validate_two_qubit_vs_ed(s));
    report.suites.push_back(validate_critical_point(s));
    report.suites.push_back(validate_open_chain(s));
    report.suites.push_back(validate_measurement_dynamics(s));
    report.suites.push_back(validate_relaxation(s));
    report.suites.push_back(validate_two_oscillator(s));
    report.suites.push_back(validate_gaussian_sampling(s));
    report.suites.push_back(validate_heat_positivity(s));
    report.suites.push_back(validate_linear_chain(s));
    report.suites.push_back(validate_cycle_sampler(s));
    report.suites.push_back(validate_sweep_determinism(s));
    return report;
}

} // namespace qvfe
