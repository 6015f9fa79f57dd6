#pragma once

// Measurement and relaxation stages of the two-qubit cycle.
//
// Measurement: a meter qubit M is coupled through H_M = g_M n_A sigma^x_M and
// the three-qubit state evolves under H_loc + H_int + H_M from
// cos(phi)|000> - sin(phi)|110>. Amplitudes are indexed 4a + 2b + m.
//
// Relaxation: low-temperature rate equations in the eigenbasis ordered
// (phi+, psi+, psi-, phi-), dp/dt = -M p with M lower triangular.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "qvfe/errors.hpp"
#include "qvfe/two_qubit.hpp"

namespace qvfe {

using cplx = std::complex<double>;
using ThreeQubitState = std::array<cplx, 8>;

struct MeterSpec {
    double g_m = 1.0;

    double gamma_m(const TwoQubitSpec& spec) const noexcept { return g_m / spec.sum(); }

    /// The integrator also accepts g_m = 0, where the meter stays idle.
    void validate(bool allow_zero = false) const {
        const bool ok = allow_zero ? g_m >= 0.0 : g_m > 0.0;
        if (!ok || !std::isfinite(g_m)) {
            throw InvalidSpec("meter coupling g_m must be finite and positive");
        }
    }
};

namespace amp {
inline constexpr int k000 = 0, k001 = 1, k010 = 2, k011 = 3, k100 = 4, k101 = 5, k110 = 6, k111 = 7;
}

struct EnergyTrace {
    double e_loc = 0.0;
    double e_int = 0.0;
    double e_meter = 0.0;
    double e_two_qubit_total() const noexcept { return e_loc + e_int; }
    double e_total() const noexcept { return e_loc + e_int + e_meter; }
};

struct ThreeQubitTrajectory {
    std::vector<double> times;
    std::vector<ThreeQubitState> amplitudes;
    std::vector<EnergyTrace> energies;
};

/// Real symmetric 8x8 Hamiltonian of system plus meter.
inline Eigen::Matrix<double, 8, 8> three_qubit_hamiltonian(const TwoQubitSpec& spec, const MeterSpec& meter) {
    Eigen::Matrix<double, 8, 8> h = Eigen::Matrix<double, 8, 8>::Zero();
    for (int l = 0; l < 8; ++l) {
        const int a = (l >> 2) & 1;
        const int b = (l >> 1) & 1;
        h(l, l) = spec.omega_a * a + spec.omega_b * b;
        h(l ^ 0b110, l) += 0.5 * spec.g;
        if (a == 1) {
            h(l ^ 0b001, l) += meter.g_m;
        }
    }
    return h;
}

inline ThreeQubitState initial_three_qubit_state(const TwoQubitSpec& spec) {
    const double phi = spectrum(spec).phi;
    ThreeQubitState psi{};
    psi[amp::k000] = std::cos(phi);
    psi[amp::k110] = -std::sin(phi);
    return psi;
}

inline EnergyTrace energy_trace(const TwoQubitSpec& spec, const MeterSpec& meter, const ThreeQubitState& psi) {
    EnergyTrace e;
    for (int l = 0; l < 8; ++l) {
        const double a = (l >> 2) & 1;
        const double b = (l >> 1) & 1;
        e.e_loc += (spec.omega_a * a + spec.omega_b * b) * std::norm(psi[static_cast<std::size_t>(l)]);
    }
    // <H_int> and <H_M> from the off-diagonal pairs of each coupling.
    for (int l = 0; l < 8; ++l) {
        const auto i = static_cast<std::size_t>(l);
        e.e_int += 0.5 * spec.g * std::real(std::conj(psi[i]) * psi[static_cast<std::size_t>(l ^ 0b110)]);
        if ((l >> 2) & 1) {
            e.e_meter += meter.g_m * std::real(std::conj(psi[i]) * psi[static_cast<std::size_t>(l ^ 0b001)]);
        }
    }
    return e;
}

inline double norm_squared(const ThreeQubitState& psi) {
    double s = 0.0;
    for (const auto& c : psi) {
        s += std::norm(c);
    }
    return s;
}

struct MeasurementAmplitudes {
    cplx psi000, psi001, psi110, psi111;
};

/// Closed-form amplitudes of the four populated components.
inline MeasurementAmplitudes analytic_amplitudes(const TwoQubitSpec& spec, const MeterSpec& meter, double t) {
    spec.validate();
    meter.validate();
    MeasurementAmplitudes out{};
    if (spec.g == 0.0) {
        out.psi000 = 1.0;  // |000> is a zero-energy eigenstate
        return out;
    }
    const double s = spec.sum();
    const double gamma = spec.gamma();
    const double gm = meter.gamma_m(spec);
    const double phi = spectrum(spec).phi;
    const double c = std::cos(phi);
    const double sn = std::sin(phi);
    for (int p : {1, -1}) {
        const double base = 1.0 + p * gm;
        const double root = std::hypot(base, gamma);
        for (int q : {1, -1}) {
            const double omega_pq = 0.5 * s * (base + q * root);
            const double r = 2.0 * omega_pq / spec.g;
            const double w = 0.5 * (c - r * sn) / (1.0 + r * r);
            const cplx phase = std::polar(1.0, -omega_pq * t);
            out.psi000 += w * phase;
            out.psi001 += static_cast<double>(p) * w * phase;
            out.psi110 += r * w * phase;
            out.psi111 += p * r * w * phase;
        }
    }
    return out;
}

struct MeasurementTime {
    double t_m = 0.0;
    double nu = 0.0;
};

/// nu = Omega_{++} - Omega_{--} is the largest Bohr frequency; t_M = pi / nu.
inline MeasurementTime measurement_time(const TwoQubitSpec& spec, const MeterSpec& meter) {
    spec.validate();
    meter.validate();
    const double gamma = spec.gamma();
    const double gm = meter.gamma_m(spec);
    const double nu = 0.5 * spec.sum() * (2.0 * gm + std::hypot(1.0 + gm, gamma) + std::hypot(1.0 - gm, gamma));
    return {std::numbers::pi / nu, nu};
}

struct IntegrationOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    std::size_t max_steps = 50'000'000;
};

/// Integrates the Schroedinger equation and samples it on `times` (ascending, times[0] = 0).
inline ThreeQubitTrajectory integrate_measurement(const TwoQubitSpec& spec, const MeterSpec& meter,
                                                  std::vector<double> times, IntegrationOptions opts = {}) {
    namespace odeint = boost::numeric::odeint;
    spec.validate();
    meter.validate(true);
    if (times.empty() || times.front() != 0.0 || !std::is_sorted(times.begin(), times.end())) {
        throw InvalidSpec("time grid must start at 0 and be ascending");
    }
    const Eigen::Matrix<double, 8, 8> h = three_qubit_hamiltonian(spec, meter);
    auto rhs = [&h](const ThreeQubitState& x, ThreeQubitState& dxdt, double) {
        for (int i = 0; i < 8; ++i) {
            cplx acc = 0.0;
            for (int j = 0; j < 8; ++j) {
                if (h(i, j) != 0.0) {
                    acc += h(i, j) * x[static_cast<std::size_t>(j)];
                }
            }
            dxdt[static_cast<std::size_t>(i)] = cplx(0.0, -1.0) * acc;
        }
    };

    ThreeQubitTrajectory traj;
    traj.times = times;
    traj.amplitudes.reserve(times.size());
    traj.energies.reserve(times.size());
    ThreeQubitState x = initial_three_qubit_state(spec);
    auto observer = [&](const ThreeQubitState& state, double) {
        traj.amplitudes.push_back(state);
        traj.energies.push_back(energy_trace(spec, meter, state));
    };

    const double scale = h.cwiseAbs().maxCoeff();
    const double dt0 = 1e-3 / std::max(1.0, scale);
    std::size_t steps = 0;
    try {
        auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol,
                                               odeint::runge_kutta_fehlberg78<ThreeQubitState>());
        if (times.size() == 1) {
            observer(x, 0.0);
        } else {
            steps = odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0, observer,
                                            odeint::max_step_checker(static_cast<int>(
                                                std::min<std::size_t>(opts.max_steps, 2'000'000'000))));
        }
    } catch (const std::exception& ex) {
        throw IntegrationFailure(std::string("measurement integration failed: ") + ex.what());
    }
    (void)steps;
    if (traj.amplitudes.size() != times.size()) {
        throw IntegrationFailure("integrator did not reach every requested time");
    }
    for (const auto& state : traj.amplitudes) {
        for (const auto& c : state) {
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
                throw IntegrationFailure("integrator produced non-finite amplitudes");
            }
        }
    }
    return traj;
}

/// Uniform grid 0, dt, 2 dt, ... up to t_end (t_end itself included).
inline std::vector<double> uniform_time_grid(double t_end, double dt) {
    if (!(t_end >= 0.0) || !(dt > 0.0)) {
        throw InvalidSpec("time grid needs t_end >= 0 and dt > 0");
    }
    const auto n = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        t[i] = std::min(t_end, static_cast<double>(i) * dt);
    }
    return t;
}

inline ThreeQubitTrajectory evolve_measurement(const TwoQubitSpec& spec, const MeterSpec& meter, double t_end,
                                               double dt_control, IntegrationOptions opts = {}) {
    return integrate_measurement(spec, meter, uniform_time_grid(t_end, dt_control), opts);
}

/// First local maximum of f on (0, t_max]: grid scan, then golden-section refinement.
inline double first_local_maximum(const std::function<double(double)>& f, double t_max, std::size_t grid = 2000) {
    if (!(t_max > 0.0) || grid < 3) {
        throw InvalidSpec("peak search needs t_max > 0 and at least 3 grid points");
    }
    const double h = t_max / static_cast<double>(grid);
    double prev = f(0.0);
    double cur = f(h);
    std::size_t peak = 0;
    for (std::size_t i = 2; i <= grid; ++i) {
        const double next = f(h * static_cast<double>(i));
        if (cur > prev && cur >= next) {
            peak = i - 1;
            break;
        }
        prev = cur;
        cur = next;
    }
    if (peak == 0) {
        throw DomainError("no interior local maximum in the search window");
    }
    constexpr double inv_phi = 0.6180339887498949;
    double a = h * static_cast<double>(peak - 1);
    double b = h * static_cast<double>(peak + 1);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, b); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Relaxation

struct RelaxationSpec {
    double spectral_density = 0.01;  // K
    double temperature = 0.0;        // k_B T

    void validate() const {
        if (!(spectral_density > 0.0) || !std::isfinite(spectral_density)) {
            throw InvalidSpec("spectral density K must be finite and positive");
        }
        if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
            throw InvalidSpec("temperature must be finite and non-negative");
        }
    }
};

struct RelaxationRates {
    double gamma_plus = 0.0;
    double gamma_minus = 0.0;
    double t_p = 0.0;  // 1 / Gamma_-
    double t_c = 0.0;  // 2 / (Gamma_+ + Gamma_-)
    bool low_temperature_warning = false;
    std::string warning;
};

/// Populations below this fraction of the ground state count as negligible.
inline constexpr double kThermalPopulationThreshold = 0.01;

inline RelaxationRates relaxation_rates(const TwoQubitSpec& spec, const RelaxationSpec& relax) {
    spec.validate();
    relax.validate();
    const double gamma = spec.gamma();
    const double delta = spec.delta();
    const double r = detail::root_one_gamma(gamma);
    const double rho = std::hypot(delta, gamma);
    const double prefactor = std::numbers::pi * relax.spectral_density * (1.0 + 1.0 / r);
    // gamma / rho and 1 - gamma / rho = delta^2 / (rho (rho + gamma)); both taken as 0 and 1 at gamma = 0.
    const double ratio = gamma == 0.0 ? 0.0 : gamma / rho;
    const double one_minus = gamma == 0.0 ? 1.0 : delta * delta / (rho * (rho + gamma));

    RelaxationRates out;
    out.gamma_plus = prefactor * (1.0 + ratio);
    out.gamma_minus = prefactor * one_minus;
    if (!(out.gamma_minus > 1e-12 * out.gamma_plus)) {
        throw DegenerateRelaxation("Gamma_- vanishes (resonant qubits with gamma > 0); relaxation time diverges");
    }
    out.t_p = 1.0 / out.gamma_minus;
    out.t_c = 2.0 / (out.gamma_plus + out.gamma_minus);

    if (relax.temperature > 0.0) {
        const double gap = 0.5 * spec.sum() * (r - rho);
        const double boltzmann = std::exp(-gap / relax.temperature);
        if (boltzmann >= kThermalPopulationThreshold) {
            out.low_temperature_warning = true;
            std::ostringstream os;
            os << "k_B T = " << relax.temperature << " is not small against the E_psi^- - E_phi^- gap " << gap
               << " (Boltzmann factor " << boltzmann << ")";
            out.warning = os.str();
        }
    }
    return out;
}

using Populations = std::array<double, 4>;  // (phi+, psi+, psi-, phi-)

/// M in dp/dt = -M p.
inline Eigen::Matrix4d rate_matrix(const RelaxationRates& rates) {
    const double gp = rates.gamma_plus;
    const double gm = rates.gamma_minus;
    Eigen::Matrix4d m;
    m << gp + gm, 0, 0, 0,
         -gp, gp, 0, 0,
         -gm, 0, gm, 0,
         0, -gp, -gm, 0;
    return m;
}

/// Populations right after a measurement that returned |00>.
inline Populations populations_after_reset(const TwoQubitSpec& spec) {
    const double phi = spectrum(spec).phi;
    const double s = std::sin(phi);
    return {s * s, 0.0, 0.0, 1.0 - s * s};
}

namespace detail {

// (1 - exp(-x t)) / x, tending to t as x -> 0.
inline double relax_kernel(double x, double t) noexcept {
    return x == 0.0 ? t : -std::expm1(-x * t) / x;
}

} // namespace detail

/// Exact solution of the triangular rate equations. The form used has no
/// 1 / (Gamma_+ - Gamma_-) factor, so equal rates need no special handling.
inline Populations populations_at(const Populations& initial, const RelaxationRates& rates, double t) {
    const double gp = rates.gamma_plus;
    const double gm = rates.gamma_minus;
    const double ep = std::exp(-gp * t);
    const double em = std::exp(-gm * t);
    const double a = initial[0] * ep * em;
    const double b = initial[1] * ep + initial[0] * gp * ep * detail::relax_kernel(gm, t);
    const double c = initial[2] * em + initial[0] * gm * em * detail::relax_kernel(gp, t);
    return {a, b, c, 1.0 - a - b - c};
}

inline std::vector<Populations> evolve_populations(const Populations& initial, const RelaxationRates& rates,
                                                   const std::vector<double>& t_grid) {
    double total = 0.0;
    for (double p : initial) {
        if (!(p >= 0.0)) {
            throw InvalidSpec("initial populations must be non-negative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvalidSpec("initial populations must sum to 1");
    }
    std::vector<Populations> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        if (!(t >= 0.0)) {
            throw InvalidSpec("relaxation times must be non-negative");
        }
        out.push_back(populations_at(initial, rates, t));
    }
    return out;
}

/// |<phi+|rho(t)|phi->| starting from |00><00|.
inline double coherence_magnitude(const TwoQubitSpec& spec, const RelaxationRates& rates, double t) {
    const double gamma = spec.gamma();
    return gamma * std::exp(-t / rates.t_c) / (2.0 * detail::root_one_gamma(gamma));
}

struct PowerEstimate {
    double power = 0.0;
    double work = 0.0;
    double t_m = 0.0;
    double t_p = 0.0;
};

/// P = W / (t_M + 5 t_p); five relaxation times leave about 1% outside the ground state.
inline PowerEstimate power_estimate(const TwoQubitSpec& spec, const MeterSpec& meter, const RelaxationSpec& relax) {
    PowerEstimate out;
    out.work = metrics(spec).work();
    out.t_m = measurement_time(spec, meter).t_m;
    out.t_p = relaxation_rates(spec, relax).t_p;
    out.power = out.work / (out.t_m + 5.0 * out.t_p);
    return out;
}

} // namespace qvfe
