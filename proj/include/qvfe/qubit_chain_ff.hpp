#pragma once

// Uniform closed qubit chain solved through its free-fermion representation.
//
// In the sector with an even number of excitations the fermions obey
// antiperiodic boundary conditions, p = (2m-1) pi / N; the odd sector is
// periodic, p = 2 m pi / N, with m = -floor((N-1)/2) .. floor(N/2). Each
// momentum carries a Bogoliubov mode
//
//   Omega_p = sqrt(omega^2 + g^2 + 2 omega g cos p)
//   u_p^2, v_p^2 = (1 +- (omega + g cos p) / Omega_p) / 2,   sign(v_p) = sign(p)
//
// and at p = 0, pi the mode is already diagonal: u = 1, v = 0 and
// Omega_p = omega + g cos p, which is negative at p = pi when g > omega.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "qvfe/elliptic.hpp"
#include "qvfe/engine_metrics.hpp"
#include "qvfe/errors.hpp"

namespace qvfe {

enum class ParitySector { even_excitations, odd_excitations };

struct MomentumGrid {
    int n = 0;
    ParitySector sector = ParitySector::even_excitations;
    std::vector<double> momenta;
};

inline MomentumGrid momentum_grid(int n, ParitySector sector = ParitySector::even_excitations) {
    if (n < 2) {
        throw InvalidSpec("momentum grid needs n >= 2");
    }
    constexpr double pi = std::numbers::pi;
    MomentumGrid grid{n, sector, {}};
    grid.momenta.reserve(static_cast<std::size_t>(n));
    for (int m = -(n - 1) / 2; m <= n / 2; ++m) {
        const int numerator = sector == ParitySector::even_excitations ? 2 * m - 1 : 2 * m;
        double p;
        if (numerator == n || numerator == -n) {
            p = pi;  // -pi folds onto pi
        } else if (numerator == 0) {
            p = 0.0;
        } else {
            p = numerator * pi / n;
        }
        grid.momenta.push_back(p);
    }
    std::sort(grid.momenta.begin(), grid.momenta.end());
    return grid;
}

struct BogoliubovMode {
    double p = 0.0;
    double u = 1.0;
    double v = 0.0;
    double omega_p = 0.0;
    /// Omega_p - omega, evaluated without cancellation.
    double omega_p_shift = 0.0;
};

inline constexpr double kTrivialMomentumSine = 1e-14;

inline BogoliubovMode mode(double omega, double g, double p) {
    if (!(omega > 0.0) || !(g >= 0.0)) {
        throw InvalidSpec("mode expects omega > 0 and g >= 0");
    }
    BogoliubovMode out;
    out.p = p;
    const double s = std::sin(p);
    const double c = std::cos(p);
    if (std::abs(s) < kTrivialMomentumSine) {
        out.omega_p = omega + g * c;
        out.omega_p_shift = g * c;
        return out;
    }
    // omega^2 + g^2 + 2 omega g cos p = (omega - g)^2 + 4 omega g cos^2(p/2)
    const double half = std::cos(0.5 * p);
    const double big = std::sqrt((omega - g) * (omega - g) + 4.0 * omega * g * half * half);
    const double lin = omega + g * c;
    const double gs2 = g * g * s * s;
    double v2;
    double u2;
    if (lin > 0.0) {
        v2 = gs2 / (2.0 * big * (big + lin));
        u2 = 1.0 - v2;
    } else {
        u2 = gs2 / (2.0 * big * (big - lin));
        v2 = 1.0 - u2;
    }
    out.omega_p = big;
    out.omega_p_shift = (g * g + 2.0 * omega * g * c) / (big + omega);
    out.u = std::sqrt(u2);
    out.v = std::copysign(std::sqrt(v2), p);
    return out;
}

struct ChainSums {
    double gap = 0.0;   // sum (Omega_p - omega) / 2
    double work = 0.0;  // omega sum v_p^2
    double variance = 0.0;  // 2 omega^2 sum u_p^2 v_p^2
};

namespace detail {

inline void check_chain_args(int n, double omega, double g) {
    if (n == 2) {
        throw DelegationNotice("the two-qubit chain is handled by the two-qubit model");
    }
    if (n < 2) {
        throw InvalidSpec("closed chain needs n >= 3");
    }
    if (!(omega > 0.0) || !std::isfinite(omega) || !(g >= 0.0) || !std::isfinite(g)) {
        throw InvalidSpec("closed chain expects finite omega > 0 and g >= 0");
    }
}

} // namespace detail

/// Mode sums over the even-excitation grid with a caller-supplied mode builder.
template <typename ModeFn>
ChainSums closed_chain_sums_with(int n, double omega, double g, ModeFn&& mode_fn) {
    detail::check_chain_args(n, omega, g);
    ChainSums sums;
    double v2_sum = 0.0;
    double uv_sum = 0.0;
    for (double p : momentum_grid(n).momenta) {
        const BogoliubovMode b = mode_fn(omega, g, p);
        sums.gap += 0.5 * b.omega_p_shift;
        v2_sum += b.v * b.v;
        uv_sum += b.u * b.u * b.v * b.v;
    }
    sums.work = omega * v2_sum;
    sums.variance = 2.0 * omega * omega * uv_sum;
    return sums;
}

template <typename ModeFn>
EngineMetrics metrics_closed_chain_with(int n, double omega, double g, ModeFn&& mode_fn) {
    const ChainSums s = closed_chain_sums_with(n, omega, g, mode_fn);
    const double gap = detail::clamp_roundoff(s.gap, omega * n, "local entanglement gap");
    return EngineMetrics::from_work_gap(s.work, gap, std::sqrt(s.variance));
}

inline ChainSums closed_chain_sums(int n, double omega, double g) {
    return closed_chain_sums_with(n, omega, g, [](double w, double c, double p) { return mode(w, c, p); });
}

inline EngineMetrics metrics_closed_chain(int n, double omega, double g) {
    return metrics_closed_chain_with(n, omega, g, [](double w, double c, double p) { return mode(w, c, p); });
}

struct PerSiteLimit {
    double gap_per_site = 0.0;
    double work_per_site = 0.0;
    double sigma_per_sqrt_site = 0.0;
    std::optional<double> efficiency;
};

/// N -> infinity values. With mu = 4 omega g / (omega + g)^2 in [0, 1],
///
///   Delta / N = (omega + g) E(mu) / pi - omega / 2
///   W / N     = omega / 2 - ((omega + g) E(mu) + (omega - g) K(mu)) / (2 pi)
///
/// which is the same pair of integrals as the negative-parameter form
/// m = -4 omega g / (omega - g)^2 after the imaginary-modulus transformation.
inline PerSiteLimit thermodynamic_limit(double omega, double g) {
    if (!(omega > 0.0) || !(g >= 0.0)) {
        throw InvalidSpec("thermodynamic limit expects omega > 0 and g >= 0");
    }
    constexpr double pi = std::numbers::pi;
    PerSiteLimit out;
    out.sigma_per_sqrt_site = 0.5 * std::min(omega, g);
    if (g == 0.0) {
        return out;
    }
    if (g == omega) {
        out.work_per_site = omega * (0.5 - 1.0 / pi);
        out.gap_per_site = omega * (2.0 / pi - 0.5);
        out.efficiency = pi / 2.0 - 1.0;
        return out;
    }
    const double sum = omega + g;
    const double mu = 4.0 * omega * g / (sum * sum);
    const elliptic::KE ke = elliptic::complete_nonnegative(std::min(mu, std::nextafter(1.0, 0.0)));
    out.gap_per_site = sum * ke.e / pi - 0.5 * omega;
    out.work_per_site = 0.5 * omega - (sum * ke.e + (omega - g) * ke.k) / (2.0 * pi);
    const double heat = out.work_per_site + out.gap_per_site;
    if (heat > 0.0) {
        out.efficiency = out.work_per_site / heat;
    }
    return out;
}

struct Asymptotics {
    double gap = 0.0;
    double work = 0.0;
    std::optional<double> efficiency;
    double sigma = 0.0;
};

/// g << omega: Delta ~ W ~ N g^2 / (8 omega), eta ~ 1/2, sigma ~ sqrt(N) g / 2.
inline Asymptotics weak_coupling_asymptotics(int n, double omega, double g) {
    if (n <= 2) {
        throw InvalidSpec("weak-coupling asymptotics need n > 2");
    }
    if (!(omega > 0.0) || !(g >= 0.0)) {
        throw InvalidSpec("weak-coupling asymptotics expect omega > 0 and g >= 0");
    }
    Asymptotics a;
    a.work = n * g * g / (8.0 * omega);
    a.gap = a.work;
    a.sigma = 0.5 * std::sqrt(static_cast<double>(n)) * g;
    if (g > 0.0) {
        a.efficiency = 0.5;
    }
    return a;
}

/// g >> omega. Odd rings are frustrated: one bond cannot antialign, which costs
/// one excitation pair relative to the even case.
inline Asymptotics strong_coupling_asymptotics(int n, double omega, double g) {
    if (n < 3) {
        throw InvalidSpec("strong-coupling asymptotics need n >= 3");
    }
    if (!(omega > 0.0) || !(g >= 0.0)) {
        throw InvalidSpec("strong-coupling asymptotics expect omega > 0 and g >= 0");
    }
    const double pairs = n % 2 == 0 ? 0.5 * n : 0.5 * n - 1.0;
    Asymptotics a;
    a.gap = pairs * g;
    a.work = pairs * omega;
    a.sigma = 0.5 * std::sqrt(static_cast<double>(n)) * omega;
    if (g > 0.0) {
        a.efficiency = omega / g;
    }
    return a;
}

} // namespace qvfe
