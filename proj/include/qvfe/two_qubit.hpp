#pragma once

// Two coupled qubits, H = omega_A n_A + omega_B n_B + (g/2) sigma^x_A sigma^x_B.
//
// With S = omega_A + omega_B, gamma = g/S and delta = (omega_A - omega_B)/S the
// Hamiltonian splits into the {|00>, |11>} and {|01>, |10>} blocks:
//
//   E_phi^+- = S/2 (1 +- sqrt(1 + gamma^2)),    tan 2phi = gamma
//   E_psi^+- = S/2 (1 +- sqrt(delta^2 + gamma^2)), tan 2psi = gamma/delta
//
// and the ground state is cos(phi)|00> - sin(phi)|11>.

#include <cmath>
#include <sstream>

#include "qvfe/engine_metrics.hpp"
#include "qvfe/errors.hpp"
#include "qvfe/qubit_exact.hpp"

namespace qvfe {

struct TwoQubitSpec {
    double omega_a = 1.0;
    double omega_b = 1.0;
    double g = 0.0;

    /// Qubit pair from the dimensionless (gamma, delta) at fixed sum S.
    static TwoQubitSpec from_dimensionless(double sum, double gamma, double delta) {
        TwoQubitSpec s{0.5 * sum * (1.0 + delta), 0.5 * sum * (1.0 - delta), gamma * sum};
        s.validate();
        return s;
    }

    double sum() const noexcept { return omega_a + omega_b; }
    double gamma() const noexcept { return g / sum(); }
    double delta() const noexcept { return (omega_a - omega_b) / sum(); }

    void validate() const {
        if (!(omega_a > 0.0) || !(omega_b > 0.0) || !std::isfinite(omega_a) || !std::isfinite(omega_b)) {
            throw InvalidSpec("qubit frequencies must be finite and positive");
        }
        if (!(g >= 0.0) || !std::isfinite(g)) {
            throw InvalidSpec("coupling g must be finite and non-negative");
        }
        if (omega_a < omega_b) {
            std::ostringstream os;
            os << "expected omega_a >= omega_b so that 0 <= delta < 1, got omega_a=" << omega_a
               << " omega_b=" << omega_b;
            throw InvalidSpec(os.str());
        }
    }

    /// The same system as an open two-site chain (one bond).
    QubitChainSpec as_chain() const { return QubitChainSpec{{omega_a, omega_b}, {g}, Boundary::open}; }
};

struct TwoQubitSpectrum {
    double phi = 0.0;
    double psi = 0.0;
    double e_phi_plus = 0.0;
    double e_phi_minus = 0.0;
    double e_psi_plus = 0.0;
    double e_psi_minus = 0.0;
};

namespace detail {

// sqrt(1 + gamma^2) without overflow for huge gamma.
inline double root_one_gamma(double gamma) noexcept { return std::hypot(1.0, gamma); }

} // namespace detail

inline TwoQubitSpectrum spectrum(const TwoQubitSpec& spec) {
    spec.validate();
    const double s = spec.sum();
    const double gamma = spec.gamma();
    const double delta = spec.delta();
    const double r = detail::root_one_gamma(gamma);
    const double rho = std::hypot(delta, gamma);
    TwoQubitSpectrum out;
    out.phi = 0.5 * std::atan2(gamma, 1.0);
    out.psi = 0.5 * std::atan2(gamma, delta);  // pi/4 at delta = 0, gamma > 0
    out.e_phi_plus = 0.5 * s * (1.0 + r);
    // 1 - r = -gamma^2 / (1 + r) keeps the small-gamma limit accurate.
    out.e_phi_minus = -0.5 * s * gamma * gamma / (1.0 + r);
    out.e_psi_plus = 0.5 * s * (1.0 + rho);
    out.e_psi_minus = 0.5 * s * (1.0 - rho);
    return out;
}

struct OutcomeProbabilities {
    double p00 = 1.0;
    double p11 = 0.0;
};

inline OutcomeProbabilities outcome_probabilities(const TwoQubitSpec& spec) {
    spec.validate();
    const double r = detail::root_one_gamma(spec.gamma());
    const double gamma = spec.gamma();
    // p11 = (1 - 1/r)/2 = gamma^2 / (2 r (1 + r))
    const double p11 = 0.5 * gamma * gamma / (r * (1.0 + r));
    return {1.0 - p11, p11};
}

inline EngineMetrics metrics(const TwoQubitSpec& spec) {
    spec.validate();
    const double s = spec.sum();
    const double gamma = spec.gamma();
    const double r = detail::root_one_gamma(gamma);
    const double g2 = gamma * gamma;
    const double work = 0.5 * s * g2 / (r * (1.0 + r));
    const double gap = 0.5 * s * g2 / (1.0 + r);
    const double sigma = 0.5 * s * gamma / r;
    return EngineMetrics::from_work_gap(work, gap, sigma);
}

/// Efficiency as a function of work output alone, at fixed S.
inline double efficiency_work_tradeoff(const TwoQubitSpec& spec, double work) {
    spec.validate();
    const double s = spec.sum();
    if (!(work >= 0.0) || !(work < 0.5 * s)) {
        std::ostringstream os;
        os << "work must lie in [0, (omega_a + omega_b)/2) = [0, " << 0.5 * s << "), got " << work;
        throw DomainError(os.str());
    }
    return 1.0 - s / (2.0 * (s - work));
}

} // namespace qvfe
