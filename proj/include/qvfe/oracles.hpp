#pragma once

// Independent cross-checks for the oscillator network formulas.
//
// The Gaussian ground state has Wigner function proportional to
// exp(-x.Omega.x - p.Omega^-1.p), i.e. x ~ N(0, Omega^-1/2), p ~ N(0, Omega/2).
// Weyl symbols of x_j^2 and p_j^2 are the same functions, so the phase-space
// mean of h = 1/2 sum (p_j^2 + K_jj x_j^2) is <H_loc>. For the square,
// Weyl(H_loc^2) = h^2 - 1/4 sum_j K_jj, hence sigma^2 = Var(h) - 1/4 sum K_jj.
// The square root of K is obtained by Denman-Beavers iteration so that the
// oracle shares no code with the eigendecomposition route.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qvfe/errors.hpp"
#include "qvfe/parallel.hpp"
#include "qvfe/random.hpp"

namespace qvfe::oracle {

struct MatrixRoots {
    Eigen::MatrixXd sqrt;
    Eigen::MatrixXd inv_sqrt;
};

inline MatrixRoots denman_beavers(const Eigen::MatrixXd& k, int max_iter = 100, double tol = 1e-15) {
    const Eigen::Index n = k.rows();
    Eigen::MatrixXd y = k;
    Eigen::MatrixXd z = Eigen::MatrixXd::Identity(n, n);
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::MatrixXd y_inv = y.partialPivLu().inverse();
        const Eigen::MatrixXd z_inv = z.partialPivLu().inverse();
        Eigen::MatrixXd y_next = 0.5 * (y + z_inv);
        Eigen::MatrixXd z_next = 0.5 * (z + y_inv);
        const double change = (y_next - y).norm() / std::max(1.0, y_next.norm());
        y = std::move(y_next);
        z = std::move(z_next);
        if (change < tol) {
            break;
        }
    }
    // Symmetrize away round-off drift.
    return {0.5 * (y + y.transpose()), 0.5 * (z + z.transpose())};
}

struct GaussianSampling {
    std::size_t n_samples = 0;
    double e_loc = 0.0;
    double work = 0.0;
    double work_se = 0.0;
    double sigma = 0.0;
    double sigma_se = 0.0;
};

inline GaussianSampling sample_gaussian_ground_state(const Eigen::MatrixXd& k, std::size_t n_samples,
                                                     std::uint64_t seed, unsigned jobs = 1) {
    if (n_samples < 2) {
        throw InvalidSpec("need at least two samples");
    }
    const Eigen::Index n = k.rows();
    const MatrixRoots roots = denman_beavers(k);
    const Eigen::LLT<Eigen::MatrixXd> lx(0.5 * roots.inv_sqrt);
    const Eigen::LLT<Eigen::MatrixXd> lp(0.5 * roots.sqrt);
    if (lx.info() != Eigen::Success || lp.info() != Eigen::Success) {
        throw NotPositiveDefinite("ground-state covariance is not positive definite");
    }
    const Eigen::MatrixXd cx = lx.matrixL();
    const Eigen::MatrixXd cp = lp.matrixL();
    const Eigen::VectorXd kjj = k.diagonal();
    const double e0 = 0.5 * kjj.cwiseSqrt().sum();

    // Moments of h about the rough centre 1/4 sum K_jj (Omega^-1)_jj + Omega_jj.
    const double centre = 0.25 * (kjj.cwiseProduct(roots.inv_sqrt.diagonal()).sum() + roots.sqrt.diagonal().sum());

    constexpr std::size_t kChunk = 1 << 14;
    const std::size_t n_chunks = (n_samples + kChunk - 1) / kChunk;
    struct Moments {
        double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    };
    std::vector<Moments> partial(n_chunks);
    parallel_for(n_chunks, jobs, [&](std::size_t c) {
        KeyedRng rng(seed, c);
        std::normal_distribution<double> normal;
        Eigen::VectorXd ux(n), up(n);
        Moments m;
        const std::size_t end = std::min(n_samples, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                ux(j) = normal(rng);
                up(j) = normal(rng);
            }
            const Eigen::VectorXd x = cx * ux;
            const Eigen::VectorXd p = cp * up;
            const double h = 0.5 * (p.squaredNorm() + kjj.dot(x.cwiseAbs2()));
            const double d = h - centre;
            const double d2 = d * d;
            m.s1 += d;
            m.s2 += d2;
            m.s3 += d2 * d;
            m.s4 += d2 * d2;
        }
        partial[c] = m;
    });
    Moments m;
    for (const auto& p : partial) {
        m.s1 += p.s1;
        m.s2 += p.s2;
        m.s3 += p.s3;
        m.s4 += p.s4;
    }
    const double nn = static_cast<double>(n_samples);
    const double mu = m.s1 / nn;
    const double var_h = (m.s2 / nn - mu * mu) * nn / (nn - 1.0);
    const double m4 = m.s4 / nn - 4.0 * mu * m.s3 / nn + 6.0 * mu * mu * m.s2 / nn - 3.0 * mu * mu * mu * mu;

    GaussianSampling out;
    out.n_samples = n_samples;
    out.e_loc = centre + mu;
    out.work = out.e_loc - e0;
    out.work_se = std::sqrt(var_h / nn);
    const double var_q = std::max(0.0, var_h - 0.25 * kjj.sum());
    out.sigma = std::sqrt(var_q);
    const double se_var = std::sqrt(std::max(0.0, m4 - var_h * var_h) / nn);
    out.sigma_se = out.sigma > 0.0 ? se_var / (2.0 * out.sigma) : se_var;
    return out;
}

/// Random symmetric positive-definite matrix A^T A / n + shift I with A Gaussian.
inline Eigen::MatrixXd random_spd(int n, KeyedRng& rng, double shift = 0.1) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = normal(rng);
        }
    }
    Eigen::MatrixXd k = a.transpose() * a / n;
    k.diagonal().array() += shift;
    return 0.5 * (k + k.transpose());
}

} // namespace qvfe::oracle
