#pragma once

// Harmonic oscillator networks H = 1/2 sum p_j^2 + 1/2 x.K.x with unit masses.
//
// The local part keeps the diagonal of K, so local oscillator j has frequency
// sqrt(K_jj). The ground state is Gaussian with width matrix Omega = sqrt(K):
//
//   <H_loc>  = 1/4 sum_j (K_jj (Omega^-1)_jj + Omega_jj)
//   E_0loc   = 1/2 sum_j sqrt(K_jj),   E_gs = 1/2 sum_m Omega_m
//   sigma^2  = 1/8 (sum_jk K_jj (Omega^-1)_jk^2 K_kk - sum_j K_jj)

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qvfe/engine_metrics.hpp"
#include "qvfe/errors.hpp"

namespace qvfe {

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPositiveEigenTolerance = 1e-12;

struct NormalModes {
    Eigen::VectorXd frequencies;    // Omega_m = sqrt(k_m), ascending
    double shift = 0.0;             // mean of diag(K), removed before the eigensolve
    Eigen::VectorXd shifted;        // k_m - shift, accurate relative to the coupling scale
    Eigen::MatrixXd transform;      // O with K = O^T diag(k) O (rows are modes)
    Eigen::MatrixXd omega_matrix;   // Omega = O^T diag(Omega_m) O
    Eigen::MatrixXd omega_inverse;  // Omega^-1
};

inline void validate_coupling_matrix(const Eigen::MatrixXd& k) {
    if (k.rows() == 0 || k.rows() != k.cols()) {
        throw InvalidSpec("coupling matrix must be square and non-empty");
    }
    if (!k.allFinite()) {
        throw InvalidSpec("coupling matrix entries must be finite");
    }
    const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
    if ((k - k.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
        throw InvalidSpec("coupling matrix must be symmetric");
    }
    for (Eigen::Index j = 0; j < k.rows(); ++j) {
        if (!(k(j, j) > 0.0)) {
            throw InvalidSpec("coupling matrix diagonal entries must be positive");
        }
    }
}

inline NormalModes normal_modes(const Eigen::MatrixXd& k) {
    validate_coupling_matrix(k);
    // Solving for K - shift I keeps k_m - K_jj accurate to the off-diagonal scale
    // when the local frequencies are close to each other.
    const double shift = k.diagonal().mean();
    Eigen::MatrixXd ks = k;
    ks.diagonal().array() -= shift;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ks);
    if (es.info() != Eigen::Success) {
        throw ConvergenceFailure("symmetric eigensolver did not converge");
    }
    const Eigen::VectorXd kd = es.eigenvalues().array() + shift;
    const double kmax = std::max(std::abs(kd(0)), std::abs(kd(kd.size() - 1)));
    if (!(kd(0) > kPositiveEigenTolerance * kmax)) {
        std::ostringstream os;
        os << "coupling matrix is not positive definite (smallest eigenvalue " << kd(0) << ")";
        throw NotPositiveDefinite(os.str());
    }
    NormalModes m;
    m.frequencies = kd.cwiseSqrt();
    m.shift = shift;
    m.shifted = es.eigenvalues();
    const Eigen::MatrixXd& v = es.eigenvectors();
    m.transform = v.transpose();
    m.omega_matrix = v * m.frequencies.asDiagonal() * v.transpose();
    m.omega_inverse = v * m.frequencies.cwiseInverse().asDiagonal() * v.transpose();
    return m;
}

struct NetworkSolution {
    NormalModes modes;
    GroundStateEnergies energies;
    EngineMetrics metrics;
};

namespace detail {

// Local ladder operators a_j = (sqrt(w_j) x_j + i p_j / sqrt(w_j)) / sqrt 2 with
// w_j = sqrt(K_jj). In the ground state
//
//   N_jk = <a_j^+ a_k> = (c_jk (Omega^-1)_jk + Omega_jk / c_jk) / 4 - delta_jk / 2
//   A_jk = <a_j a_k>   = (c_jk (Omega^-1)_jk - Omega_jk / c_jk) / 4,   c_jk = sqrt(w_j w_k)
//
// and W = sum_j w_j N_jj, sigma^2 = sum_jk w_j w_k (N_jk^2 + A_jk^2) + sum_j w_j^2 N_jj.
// With s_mj = O_mj^2, the diagonal occupations and the gap become sums of
// non-negative mode terms:
//
//   N_jj = 1/4 sum_m s_mj (w_j - Omega_m)^2 / (w_j Omega_m)
//   Delta = sum_j sum_m s_mj (w_j - Omega_m)^2 / (4 w_j)
//
// with w_j - Omega_m = (K_jj - k_m) / (w_j + Omega_m). These equal the direct
// traces in the header comment but keep full relative accuracy as g -> 0.
struct StableNetworkSums {
    double work = 0.0;
    double gap = 0.0;
    double variance = 0.0;
};

inline StableNetworkSums stable_network_sums(const Eigen::MatrixXd& k, const NormalModes& modes) {
    const Eigen::Index n = k.rows();
    const Eigen::VectorXd w = k.diagonal().cwiseSqrt();
    const Eigen::VectorXd& om = modes.frequencies;
    const Eigen::VectorXd& ks = modes.shifted;
    StableNetworkSums out;
    Eigen::VectorXd occupation(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double nj = 0.0;
        double dj = 0.0;
        for (Eigen::Index m = 0; m < n; ++m) {
            const double s = modes.transform(m, j) * modes.transform(m, j);
            const double diff = ((k(j, j) - modes.shift) - ks(m)) / (w(j) + om(m));  // w_j - Omega_m
            nj += s * diff * diff / om(m);
            dj += s * diff * diff;
        }
        occupation(j) = 0.25 * nj / w(j);
        out.work += w(j) * occupation(j);
        // w_j - sum_m s_mj Omega_m = sum_m s_mj (w_j - Omega_m)^2 / (2 w_j)
        out.gap += 0.25 * dj / w(j);
    }
    // A_jk = 1/4 sum_m O_mj O_mk (c^2 - k_m) / (c Omega_m), split at the shift.
    const Eigen::MatrixXd g = modes.transform.transpose() * ks.cwiseQuotient(om).asDiagonal() * modes.transform;
    double var = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index l = 0; l < n; ++l) {
            const double c2 = j == l ? k(j, j) : w(j) * w(l);
            const double c = j == l ? w(j) : std::sqrt(c2);
            const double a = 0.25 * (((c2 - modes.shift) * modes.omega_inverse(j, l) - g(j, l)) / c);
            const double nl = j == l ? occupation(j)
                                     : 0.25 * (c * modes.omega_inverse(j, l) + modes.omega_matrix(j, l) / c);
            var += w(j) * w(l) * (nl * nl + a * a);
        }
        var += w(j) * w(j) * occupation(j);
    }
    out.variance = var;
    return out;
}

} // namespace detail

inline NetworkSolution solve_network(const Eigen::MatrixXd& k) {
    NetworkSolution s;
    s.modes = normal_modes(k);
    const auto sums = detail::stable_network_sums(k, s.modes);
    const double e0 = 0.5 * k.diagonal().cwiseSqrt().sum();
    const double e_loc = e0 + sums.work;
    // <H_loc^2> is carried so the generic assembler sees the same variance.
    s.energies = GroundStateEnergies{e_loc, sums.variance + e_loc * e_loc, e0, e0 - sums.gap};
    s.metrics = EngineMetrics::from_work_gap(sums.work, sums.gap, std::sqrt(sums.variance));
    return s;
}

inline EngineMetrics metrics_network(const Eigen::MatrixXd& k) { return solve_network(k).metrics; }

// ---------------------------------------------------------------------------
// Two oscillators, K = [[k0 + g, -g], [-g, k0 + g]]

struct TwoOscSpec {
    double k0 = 1.0;
    double g = 0.0;

    void validate() const {
        if (!(k0 > 0.0) || !std::isfinite(k0)) {
            throw InvalidSpec("k0 must be finite and positive");
        }
        if (!(g >= 0.0) || !std::isfinite(g)) {
            throw InvalidSpec("g must be finite and non-negative");
        }
    }

    double omega() const noexcept { return std::sqrt(k0 + g); }
    double omega_plus() const noexcept { return std::sqrt(k0); }
    double omega_minus() const noexcept { return std::sqrt(k0 + 2.0 * g); }

    Eigen::MatrixXd coupling_matrix() const {
        Eigen::MatrixXd k(2, 2);
        k << k0 + g, -g, -g, k0 + g;
        return k;
    }
};

/// <H_loc> = (w+ + w-)/4 (w^2/(w+ w-) + 1).
inline double two_oscillator_local_energy(const TwoOscSpec& spec) {
    spec.validate();
    const double w = spec.omega();
    const double wp = spec.omega_plus();
    const double wm = spec.omega_minus();
    return 0.25 * (wp + wm) * (w * w / (wp * wm) + 1.0);
}

inline EngineMetrics metrics_two_oscillator(const TwoOscSpec& spec) {
    spec.validate();
    const double g = spec.g;
    const double w = spec.omega();
    const double wp = spec.omega_plus();
    const double wm = spec.omega_minus();
    const double p = wp * wm;
    // Forms free of O(1) cancellations: w^2 - w+ w- = g^2 / (w^2 + w+ w-),
    // and 2w - w+ - w- = 2 g^2 / ((w + w+)(w + w-)(w+ + w-)).
    const double heat = (wp + wm) * g * g / (4.0 * p * (w * w + p));
    const double gap = g * g / ((w + wp) * (w + wm) * (wp + wm));
    const double sigma = w * g / (2.0 * p);
    return EngineMetrics::from_work_gap(heat - gap, gap, sigma);
}

struct TwoOscProbabilities {
    int n_max = 0;
    Eigen::MatrixXd p;  // P(n1, n2), 0 <= n1, n2 <= n_max
    double total = 0.0;
    double tail = 0.0;  // 1 - total
    double a = 0.0;
    double b = 0.0;
    double prefactor = 1.0;
};

/// P(n1, n2) from the generating function
///   Z(t1, t2) = pref exp(a (t1^2 + t2^2)/2 + b t1 t2),
///   a = (w^2 - w+ w-) / D,  b = w (w- - w+) / D,  D = (w + w+)(w + w-),
///   pref = 2 sqrt(w) (w+ w-)^(1/4) / sqrt(D),
/// with P = n1! n2! pref^2 [t1^n1 t2^n2 Z / pref]^2. Both a and b are
/// non-negative, so every term of the coefficient sum is positive and it is
/// accumulated in log space.
inline TwoOscProbabilities two_oscillator_probabilities(const TwoOscSpec& spec, int n_max,
                                                        std::optional<double> tolerance = std::nullopt) {
    spec.validate();
    if (n_max < 0) {
        throw InvalidSpec("n_max must be non-negative");
    }
    const double w = spec.omega();
    const double wp = spec.omega_plus();
    const double wm = spec.omega_minus();
    const double d = (w + wp) * (w + wm);
    const double g = spec.g;
    TwoOscProbabilities out;
    out.n_max = n_max;
    out.a = g * g / ((w * w + wp * wm) * d);
    out.b = w * (wm - wp) / d;
    out.prefactor = 2.0 * std::sqrt(w) * std::pow(wp * wm, 0.25) / std::sqrt(d);

    const double log_half_a = out.a > 0.0 ? std::log(0.5 * out.a) : -INFINITY;
    const double log_b = out.b > 0.0 ? std::log(out.b) : -INFINITY;
    const double log_pref2 = 2.0 * std::log(out.prefactor);
    auto power_term = [](int k, double log_base) { return k == 0 ? 0.0 : k * log_base; };

    const auto dim = static_cast<Eigen::Index>(n_max + 1);
    out.p = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<double> logs;
    for (int n1 = 0; n1 <= n_max; ++n1) {
        for (int n2 = 0; n2 <= n_max; ++n2) {
            if ((n1 + n2) % 2 != 0) {
                continue;  // Z is even in (t1, t2) jointly
            }
            logs.clear();
            for (int k = n1 % 2; k <= std::min(n1, n2); k += 2) {
                const int i = (n1 - k) / 2;
                const int j = (n2 - k) / 2;
                const double t = power_term(k, log_b) - std::lgamma(k + 1.0) + power_term(i + j, log_half_a) -
                                 std::lgamma(i + 1.0) - std::lgamma(j + 1.0);
                if (std::isfinite(t)) {
                    logs.push_back(t);
                }
            }
            if (logs.empty()) {
                continue;
            }
            const double peak = *std::max_element(logs.begin(), logs.end());
            double acc = 0.0;
            for (double t : logs) {
                acc += std::exp(t - peak);
            }
            const double log_coef = peak + std::log(acc);
            out.p(n1, n2) = std::exp(std::lgamma(n1 + 1.0) + std::lgamma(n2 + 1.0) + log_pref2 + 2.0 * log_coef);
        }
    }
    out.total = out.p.sum();
    out.tail = 1.0 - out.total;
    if (tolerance && out.tail > *tolerance) {
        std::ostringstream os;
        os << "n_max = " << n_max << " leaves probability " << out.tail << " outside the table (tolerance "
           << *tolerance << ")";
        throw TruncationInsufficient(os.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Linear chains and D-dimensional lattices with fixed ends, K_jj = 2 D k0.

inline constexpr int kDenseChainLimit = 1000;
inline constexpr long long kLatticeModeLimit = 20'000'000;
inline constexpr int kDenseLatticeLimit = 2000;

enum class NetworkRoute { automatic, dense, mode_sum };

inline Eigen::MatrixXd chain_coupling_matrix(int n, double k0) {
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        k(j, j) = 2.0 * k0;
        if (j + 1 < n) {
            k(j, j + 1) = -k0;
            k(j + 1, j) = -k0;
        }
    }
    return k;
}

/// Nearest-neighbour lattice of side m in `dim` dimensions, row-major site order.
inline Eigen::MatrixXd lattice_coupling_matrix(int m_side, int dim, double k0) {
    long long n = 1;
    for (int d = 0; d < dim; ++d) {
        n *= m_side;
    }
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    long long stride = 1;
    for (int d = 0; d < dim; ++d) {
        for (long long s = 0; s < n; ++s) {
            const long long coord = (s / stride) % m_side;
            if (coord + 1 < m_side) {
                k(s, s + stride) = -k0;
                k(s + stride, s) = -k0;
            }
        }
        stride *= m_side;
    }
    k.diagonal().setConstant(2.0 * dim * k0);
    return k;
}

struct LatticeSolution {
    int dim = 1;
    int m_side = 0;
    long long n = 0;
    GroundStateEnergies energies;
    EngineMetrics metrics;
    double trace_k_inverse = 0.0;  // sum_m 1/k_m
    double sum_frequencies = 0.0;  // sum_m Omega_m
};

namespace detail {

inline void check_lattice_args(int m_side, int dim, double k0) {
    if (dim < 1 || dim > 3) {
        throw InvalidSpec("lattice dimension must be 1, 2 or 3");
    }
    if (m_side < 2) {
        throw InvalidSpec("lattice side must be at least 2");
    }
    if (!(k0 > 0.0) || !std::isfinite(k0)) {
        throw InvalidSpec("k0 must be finite and positive");
    }
}

inline long long lattice_size(int m_side, int dim) {
    long long n = 1;
    for (int d = 0; d < dim; ++d) {
        n *= m_side;
    }
    return n;
}

// Every eigenvector is a product of sine modes whose squared entries average
// to 1/N on the diagonal, so the site-diagonal traces reduce to mode sums.
inline LatticeSolution lattice_mode_sums(int m_side, int dim, double k0) {
    const long long n = lattice_size(m_side, dim);
    if (n > kLatticeModeLimit) {
        std::ostringstream os;
        os << "lattice with " << n << " sites exceeds the mode-sum limit " << kLatticeModeLimit;
        throw SizeExceeded(os.str());
    }
    std::vector<double> s2(static_cast<std::size_t>(m_side));
    for (int m = 1; m <= m_side; ++m) {
        const double s = std::sin(m * std::numbers::pi / (2.0 * (m_side + 1)));
        s2[static_cast<std::size_t>(m - 1)] = 4.0 * k0 * s * s;
    }
    double sum_inv_omega = 0.0;
    double sum_omega = 0.0;
    double sum_inv_k = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    for (long long c = 0; c < n; ++c) {
        double km = 0.0;
        for (int d = 0; d < dim; ++d) {
            km += s2[static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])];
        }
        const double om = std::sqrt(km);
        sum_inv_omega += 1.0 / om;
        sum_omega += om;
        sum_inv_k += 1.0 / km;
        for (int d = 0; d < dim; ++d) {
            if (++idx[static_cast<std::size_t>(d)] < m_side) {
                break;
            }
            idx[static_cast<std::size_t>(d)] = 0;
        }
    }
    const double kjj = 2.0 * dim * k0;
    const double nn = static_cast<double>(n);
    LatticeSolution out;
    out.dim = dim;
    out.m_side = m_side;
    out.n = n;
    out.trace_k_inverse = sum_inv_k;
    out.sum_frequencies = sum_omega;
    const double e_loc = 0.25 * (kjj * sum_inv_omega + sum_omega);
    const double e0 = 0.5 * nn * std::sqrt(kjj);
    const double egs = 0.5 * sum_omega;
    const double variance = detail::clamp_roundoff(0.125 * (kjj * kjj * sum_inv_k - nn * kjj),
                                                   0.125 * kjj * kjj * sum_inv_k, "sigma^2");
    out.energies = GroundStateEnergies{e_loc, variance + e_loc * e_loc, e0, egs};
    const double work = detail::clamp_roundoff(e_loc - e0, e_loc, "<H_loc> - E_0loc");
    out.metrics = EngineMetrics::from_work_gap(work, e0 - egs, std::sqrt(variance));
    return out;
}

inline LatticeSolution lattice_dense(int m_side, int dim, double k0) {
    const long long n = lattice_size(m_side, dim);
    if (n > kDenseLatticeLimit) {
        std::ostringstream os;
        os << "dense lattice route is limited to " << kDenseLatticeLimit << " sites, got " << n;
        throw SizeExceeded(os.str());
    }
    const NetworkSolution net = solve_network(lattice_coupling_matrix(m_side, dim, k0));
    LatticeSolution out;
    out.dim = dim;
    out.m_side = m_side;
    out.n = n;
    out.energies = net.energies;
    out.metrics = net.metrics;
    out.trace_k_inverse = net.modes.frequencies.cwiseAbs2().cwiseInverse().sum();
    out.sum_frequencies = net.modes.frequencies.sum();
    return out;
}

} // namespace detail

/// Mode sums by default; `dense` builds K and goes through the general network solver.
inline LatticeSolution lattice_metrics(int m_side, int dim, double k0, NetworkRoute route = NetworkRoute::automatic) {
    detail::check_lattice_args(m_side, dim, k0);
    if (route == NetworkRoute::dense) {
        return detail::lattice_dense(m_side, dim, k0);
    }
    return detail::lattice_mode_sums(m_side, dim, k0);
}

struct LinearChainSolution {
    LatticeSolution lattice;
    double trace_k_inverse_closed = 0.0;  // N (N + 2) / (6 k0)
    double sum_frequencies_closed = 0.0;  // sqrt(k0) (cot(pi / (4 (N + 1))) - 1)
    double sigma_closed = 0.0;            // sqrt(N (N - 1) k0) / (2 sqrt 3)

    const EngineMetrics& metrics() const noexcept { return lattice.metrics; }
    const GroundStateEnergies& energies() const noexcept { return lattice.energies; }
};

/// K = k0 (2 I - T). Chains up to kDenseChainLimit go through the dense network
/// solver unless a route is forced; longer ones use the exact mode sums.
inline LinearChainSolution linear_chain_metrics(int n, double k0, NetworkRoute route = NetworkRoute::automatic) {
    detail::check_lattice_args(n, 1, k0);
    LinearChainSolution out;
    const bool dense = route == NetworkRoute::dense || (route == NetworkRoute::automatic && n <= kDenseChainLimit);
    if (dense) {
        const NetworkSolution net = solve_network(chain_coupling_matrix(n, k0));
        out.lattice.dim = 1;
        out.lattice.m_side = n;
        out.lattice.n = n;
        out.lattice.energies = net.energies;
        out.lattice.metrics = net.metrics;
        out.lattice.trace_k_inverse = net.modes.frequencies.cwiseAbs2().cwiseInverse().sum();
        out.lattice.sum_frequencies = net.modes.frequencies.sum();
    } else {
        out.lattice = detail::lattice_mode_sums(n, 1, k0);
    }
    const double nn = static_cast<double>(n);
    out.trace_k_inverse_closed = nn * (nn + 2.0) / (6.0 * k0);
    out.sum_frequencies_closed = std::sqrt(k0) * (1.0 / std::tan(std::numbers::pi / (4.0 * (nn + 1.0))) - 1.0);
    out.sigma_closed = std::sqrt(nn * (nn - 1.0) * k0) / (2.0 * std::sqrt(3.0));
    return out;
}

inline constexpr double kChainConstantFitted = 2.577;
inline constexpr double kChainConstantEulerMaclaurin = 2.5;

struct ChainAsymptotics {
    double e_loc_asym = 0.0;
    double e0_loc_asym = 0.0;
    double e_gs_asym = 0.0;
    bool small_n_warning = false;
};

/// Large-N forms: <H_loc> ~ N sqrt(k0)/(2 pi) (ln(4N/pi) + C),
/// E_0loc ~ N sqrt(k0/2), E_gs ~ 2 N sqrt(k0)/pi.
inline ChainAsymptotics linear_chain_asymptotics(int n, double k0, double c = kChainConstantFitted) {
    detail::check_lattice_args(n, 1, k0);
    const double nn = static_cast<double>(n);
    ChainAsymptotics a;
    a.e_loc_asym = nn * std::sqrt(k0) / (2.0 * std::numbers::pi) * (std::log(4.0 * nn / std::numbers::pi) + c);
    a.e0_loc_asym = nn * std::sqrt(0.5 * k0);
    a.e_gs_asym = 2.0 * nn * std::sqrt(k0) / std::numbers::pi;
    a.small_n_warning = n < 100;
    return a;
}

/// The constant C that makes the asymptotic <H_loc> exact at this N.
inline double fitted_chain_constant(int n, double k0) {
    const double e_loc = linear_chain_metrics(n, k0, NetworkRoute::mode_sum).energies().e_loc_expect;
    const double nn = static_cast<double>(n);
    return e_loc * 2.0 * std::numbers::pi / (nn * std::sqrt(k0)) - std::log(4.0 * nn / std::numbers::pi);
}

// ---------------------------------------------------------------------------
// Quantum heat positivity

struct HeatCertificate {
    double q = 0.0;            // 1/4 sum_j (K_jj (Omega^-1)_jj - Omega_jj)
    double q_symmetric = 0.0;  // sum of the certificate terms
    Eigen::MatrixXd terms;     // (k, l) term, each >= 0
};

/// Q = 1/8 sum_{j,k,l} O_kj^2 O_lj^2 (Omega_k - Omega_l)^2 (Omega_k + Omega_l) / (Omega_k Omega_l).
inline HeatCertificate heat_positivity_check(const Eigen::MatrixXd& k) {
    const NormalModes m = normal_modes(k);
    HeatCertificate c;
    c.q = 0.25 * (k.diagonal().cwiseProduct(m.omega_inverse.diagonal()).sum() - m.omega_matrix.diagonal().sum());
    const Eigen::MatrixXd s = m.transform.cwiseAbs2();  // s(k, j) = O_kj^2
    const Eigen::MatrixXd weights = s * s.transpose();
    const Eigen::Index n = k.rows();
    c.terms.resize(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            const double wa = m.frequencies(a);
            const double wb = m.frequencies(b);
            const double diff = wa - wb;
            c.terms(a, b) = 0.125 * weights(a, b) * diff * diff * (wa + wb) / (wa * wb);
        }
    }
    c.q_symmetric = c.terms.sum();
    return c;
}

} // namespace qvfe
