#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "qvfe/oracles.hpp"
#include "qvfe/oscillator_network.hpp"

using namespace qvfe;

namespace {

constexpr double pi = std::numbers::pi;

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// Route-agreement tolerance: absolute 1e-12 on the scale of <H_loc>.
double route_tol(double e_loc) { return 1e-12 * std::max(1.0, e_loc); }

} // namespace

TEST(CouplingMatrix, Validation) {
    Eigen::MatrixXd asym(2, 2);
    asym << 2.0, 0.5, 0.4, 2.0;
    EXPECT_THROW(normal_modes(asym), InvalidSpec);
    Eigen::MatrixXd neg_diag(2, 2);
    neg_diag << 0.0, 0.0, 0.0, 1.0;
    EXPECT_THROW(normal_modes(neg_diag), InvalidSpec);
    Eigen::MatrixXd indefinite(2, 2);
    indefinite << 1.0, 2.0, 2.0, 1.0;
    EXPECT_THROW(normal_modes(indefinite), NotPositiveDefinite);
    EXPECT_THROW(normal_modes(Eigen::MatrixXd(0, 0)), InvalidSpec);
    Eigen::MatrixXd nonfinite = Eigen::MatrixXd::Identity(2, 2);
    nonfinite(0, 0) = std::nan("");
    EXPECT_THROW(normal_modes(nonfinite), InvalidSpec);
}

TEST(NormalModes, DiagonalCoupling) {
    const Eigen::Vector3d d(1.0, 4.0, 9.0);
    const auto m = normal_modes(d.asDiagonal().toDenseMatrix());
    EXPECT_NEAR((m.omega_matrix - Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff(),
                0.0, 1e-15);
    const auto metrics = metrics_network(d.asDiagonal().toDenseMatrix());
    EXPECT_NEAR(metrics.work(), 0.0, 1e-15);
    EXPECT_NEAR(metrics.heat(), 0.0, 1e-15);
    EXPECT_NEAR(metrics.std_dev(), 0.0, 1e-15);
}

TEST(NormalModes, TwoOscillatorFrequencies) {
    const TwoOscSpec s{1.5, 0.7};
    const auto m = normal_modes(s.coupling_matrix());
    EXPECT_NEAR(m.frequencies(0), std::sqrt(1.5), 1e-15);
    EXPECT_NEAR(m.frequencies(1), std::sqrt(1.5 + 1.4), 1e-15);
}

TEST(NormalModesProperty, SquareRootSelfConsistent) {
    KeyedRng rng(31, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 8);
        const Eigen::MatrixXd k = oracle::random_spd(n, rng);
        const auto m = normal_modes(k);
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
        EXPECT_LT((m.omega_matrix * m.omega_matrix - k).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT((m.transform.transpose() * m.transform - id).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((m.omega_matrix * m.omega_inverse - id).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT((m.omega_matrix - m.omega_matrix.transpose()).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_TRUE(std::is_sorted(m.frequencies.data(), m.frequencies.data() + n));
        EXPECT_GT(m.frequencies(0), 0.0);
        // Independent square root.
        const auto roots = oracle::denman_beavers(k);
        EXPECT_LT((roots.sqrt - m.omega_matrix).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT((roots.inv_sqrt - m.omega_inverse).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(TwoOscillator, ReferencePoint) {
    const auto m = metrics_two_oscillator({1.0, 1.0});
    EXPECT_NEAR(m.work(), 0.05747427411393713, 1e-15);
    EXPECT_NEAR(m.heat(), 0.1056624327025939, 1e-15);
    EXPECT_NEAR(*m.efficiency(), 0.5439423704705807, 1e-14);
    EXPECT_NEAR(m.std_dev(), std::sqrt(2.0) / (2.0 * std::sqrt(3.0)), 1e-15);
    EXPECT_NEAR(m.gap(), std::sqrt(2.0) - 0.5 * (1.0 + std::sqrt(3.0)), 1e-15);
    EXPECT_NEAR(two_oscillator_local_energy({1.0, 1.0}), 1.4716878364870323, 1e-15);
}

TEST(TwoOscillator, Uncoupled) {
    const auto m = metrics_two_oscillator({2.0, 0.0});
    EXPECT_EQ(m.work(), 0.0);
    EXPECT_EQ(m.gap(), 0.0);
    EXPECT_EQ(m.std_dev(), 0.0);
    EXPECT_FALSE(m.efficiency_defined());
}

TEST(TwoOscillator, SoftLocalSpringLimit) {
    const double g = 1.0;
    for (double k0 : {1e-6, 1e-8, 1e-10}) {
        const auto m = metrics_two_oscillator({k0, g});
        EXPECT_NEAR(m.work() / (g / (4.0 * std::sqrt(k0))), 1.0, 10.0 * std::sqrt(k0 / g));
        const double eta_asym = 1.0 - (4.0 - 2.0 * std::sqrt(2.0)) * std::sqrt(k0 / g);
        EXPECT_NEAR(*m.efficiency(), eta_asym, 10.0 * k0 / g);
    }
}

TEST(TwoOscillator, Validation) {
    EXPECT_THROW(metrics_two_oscillator({0.0, 1.0}), InvalidSpec);
    EXPECT_THROW(metrics_two_oscillator({1.0, -1.0}), InvalidSpec);
    const TwoOscSpec s{1.0, 3.0};
    EXPECT_LE(s.omega_plus(), s.omega());
    EXPECT_LE(s.omega(), s.omega_minus());
}

TEST(TwoOscillatorProperty, MatchesNetworkRoute) {
    // cond(K) = (k0 + 2g) / k0 stays below 1e3 on this grid.
    for (double k0 : {0.1, 0.5, 1.0, 10.0, 100.0}) {
        for (double g : {0.0, 1e-3, 0.1, 0.5, 1.0, 3.0, 10.0, 30.0}) {
            const TwoOscSpec s{k0, g};
            const auto a = metrics_two_oscillator(s);
            const auto net = solve_network(s.coupling_matrix());
            const double tol = route_tol(net.energies.e_loc_expect);
            EXPECT_NEAR(net.energies.e_loc_expect, two_oscillator_local_energy(s), tol) << k0 << " " << g;
            EXPECT_NEAR(a.work(), net.metrics.work(), tol) << k0 << " " << g;
            EXPECT_NEAR(a.heat(), net.metrics.heat(), tol) << k0 << " " << g;
            EXPECT_NEAR(a.gap(), net.metrics.gap(), tol) << k0 << " " << g;
            EXPECT_NEAR(a.std_dev(), net.metrics.std_dev(), tol) << k0 << " " << g;
            if (g > 0.0) {
                EXPECT_LT(rel_diff(*a.efficiency(), *net.metrics.efficiency()), 1e-12) << k0 << " " << g;
            }
        }
    }
}

TEST(TwoOscillatorProperty, IllConditionedAgreementLimitedByInputRounding) {
    // Forming k0 + g already loses k0 to relative eps (k0 + 2g) / k0, so the
    // network route can only be held to that.
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (double k0 : {1e-4, 1e-3, 0.01}) {
        for (double g : {10.0, 100.0, 1000.0}) {
            const TwoOscSpec s{k0, g};
            const double bound = 10.0 * eps * (k0 + 2.0 * g) / k0;
            const auto a = metrics_two_oscillator(s);
            const auto b = metrics_network(s.coupling_matrix());
            EXPECT_LT(rel_diff(a.work(), b.work()), bound) << k0 << " " << g;
            EXPECT_LT(rel_diff(a.std_dev(), b.std_dev()), bound) << k0 << " " << g;
            EXPECT_LT(rel_diff(*a.efficiency(), *b.efficiency()), bound) << k0 << " " << g;
        }
    }
}

TEST(TwoOscillatorProperty, NetworkRouteKeepsRelativeAccuracyAtWeakCoupling) {
    for (double k0 : {0.01, 1.0, 100.0}) {
        for (double g : {1e-8, 1e-5, 1e-3, 0.1, 10.0}) {
            const TwoOscSpec s{k0, g};
            const auto a = metrics_two_oscillator(s);
            const auto b = metrics_network(s.coupling_matrix());
            EXPECT_LT(rel_diff(a.work(), b.work()), 1e-12) << k0 << " " << g;
            EXPECT_LT(rel_diff(a.heat(), b.heat()), 1e-12) << k0 << " " << g;
            EXPECT_LT(rel_diff(a.gap(), b.gap()), 1e-12) << k0 << " " << g;
            EXPECT_LT(rel_diff(a.std_dev(), b.std_dev()), 1e-12) << k0 << " " << g;
            EXPECT_LT(rel_diff(*a.efficiency(), *b.efficiency()), 1e-12) << k0 << " " << g;
        }
    }
}

TEST(Probabilities, Uncoupled) {
    const auto p = two_oscillator_probabilities({1.0, 0.0}, 6);
    EXPECT_NEAR(p.p(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(p.total, 1.0, 1e-15);
    EXPECT_EQ(p.p.sum() - p.p(0, 0), 0.0);
}

TEST(Probabilities, MatchFockBasisDiagonalization) {
    // Ground state of the coupled pair in a truncated Fock basis of the local oscillators.
    const auto p = two_oscillator_probabilities({1.0, 1.0}, 8);
    EXPECT_NEAR(p.p(0, 0), 0.9801316317420649, 1e-13);
    EXPECT_NEAR(p.p(1, 1), 0.018207698539918816, 1e-13);
    EXPECT_NEAR(p.p(2, 0), 0.000609842264975073, 1e-14);
    EXPECT_NEAR(p.p(0, 2), 0.000609842264975073, 1e-14);
    EXPECT_NEAR(p.p(2, 2), 0.0003612778431754917, 1e-14);
    EXPECT_NEAR(p.p(4, 0), 5.691698585764057e-07, 1e-16);
    EXPECT_NEAR(p.p(3, 1), 3.3986733285502966e-05, 1e-16);
}

TEST(Probabilities, CompletenessAndEnergyMoment) {
    const TwoOscSpec s{1.0, 1.0};
    const auto p = two_oscillator_probabilities(s, 40);
    EXPECT_NEAR(p.total, 1.0, 1e-10);
    double energy = 0.0;
    for (int n1 = 0; n1 <= 40; ++n1) {
        for (int n2 = 0; n2 <= 40; ++n2) {
            if ((n1 + n2) % 2 != 0) {
                EXPECT_EQ(p.p(n1, n2), 0.0);
            }
            energy += p.p(n1, n2) * (n1 + n2 + 1) * s.omega();
        }
    }
    EXPECT_NEAR(energy, two_oscillator_local_energy(s), 1e-8);
}

TEST(Probabilities, TruncationReported) {
    EXPECT_THROW(two_oscillator_probabilities({0.01, 5.0}, 4, 1e-10), TruncationInsufficient);
    EXPECT_NO_THROW(two_oscillator_probabilities({1.0, 1.0}, 40, 1e-10));
    EXPECT_THROW(two_oscillator_probabilities({1.0, 1.0}, -1), InvalidSpec);
}

TEST(ProbabilitiesProperty, CompletenessGrowsWithCutoff) {
    for (double g : {0.1, 1.0, 5.0}) {
        double prev = 0.0;
        for (int n_max : {2, 6, 12, 24, 48}) {
            const auto p = two_oscillator_probabilities({1.0, g}, n_max);
            EXPECT_GE(p.total, prev - 1e-15);
            EXPECT_LE(p.total, 1.0 + 1e-12);
            EXPECT_GE(p.p.minCoeff(), 0.0);
            EXPECT_LT((p.p - p.p.transpose()).cwiseAbs().maxCoeff(), 1e-15);
            prev = p.total;
        }
    }
}

TEST(ProbabilitiesProperty, VarianceMatchesClosedForm) {
    for (double g : {0.2, 1.0, 3.0}) {
        const TwoOscSpec s{1.0, g};
        const auto p = two_oscillator_probabilities(s, 80);
        const double e0 = s.omega();  // both local oscillators in their ground state
        double m1 = 0.0, m2 = 0.0;
        for (int n1 = 0; n1 <= 80; ++n1) {
            for (int n2 = 0; n2 <= 80; ++n2) {
                const double w = (n1 + n2 + 1) * s.omega() - e0;
                m1 += p.p(n1, n2) * w;
                m2 += p.p(n1, n2) * w * w;
            }
        }
        const auto m = metrics_two_oscillator(s);
        EXPECT_NEAR(m1, m.work(), 1e-10);
        EXPECT_NEAR(std::sqrt(m2 - m1 * m1), m.std_dev(), 1e-9);
    }
}

TEST(NetworkProperty, MetricsInvariants) {
    KeyedRng rng(32, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 8);
        const auto m = metrics_network(oracle::random_spd(n, rng));
        EXPECT_GE(m.work(), 0.0);
        EXPECT_GE(m.heat(), -1e-12);
        EXPECT_GE(m.gap(), 0.0);
        if (m.efficiency_defined()) {
            EXPECT_GE(*m.efficiency(), 0.0);
            EXPECT_LE(*m.efficiency(), 1.0);
        }
    }
}

TEST(NetworkProperty, MatchesGaussianSampling) {
    KeyedRng rng(33, 0);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::MatrixXd k = oracle::random_spd(5, rng);
        const auto m = metrics_network(k);
        const auto mc = oracle::sample_gaussian_ground_state(k, 1'000'000, 100 + trial);
        EXPECT_LT(std::abs(mc.work - m.work()), 4.0 * mc.work_se) << trial;
        EXPECT_LT(std::abs(mc.sigma - m.std_dev()), 4.0 * mc.sigma_se) << trial;
    }
}

TEST(GaussianSampling, ReproducibleAcrossThreadCounts) {
    KeyedRng rng(34, 0);
    const Eigen::MatrixXd k = oracle::random_spd(3, rng);
    const auto a = oracle::sample_gaussian_ground_state(k, 50'000, 9, 1);
    const auto b = oracle::sample_gaussian_ground_state(k, 50'000, 9, 4);
    EXPECT_EQ(a.work, b.work);
    EXPECT_EQ(a.sigma, b.sigma);
}

TEST(LinearChain, TwoSitesEqualTwoOscillators) {
    const auto c = linear_chain_metrics(2, 1.3);
    const auto t = metrics_two_oscillator({1.3, 1.3});
    EXPECT_NEAR(c.metrics().work(), t.work(), 1e-13);
    EXPECT_NEAR(c.metrics().std_dev(), t.std_dev(), 1e-13);
    EXPECT_NEAR(c.lattice.sum_frequencies, std::sqrt(1.3) + std::sqrt(3.9), 1e-13);
}

TEST(LinearChain, ThreeSites) {
    const double k0 = 0.7;
    const auto c = linear_chain_metrics(3, k0);
    EXPECT_NEAR(c.lattice.trace_k_inverse, 2.5 / k0, 1e-13);
    EXPECT_NEAR(c.metrics().std_dev(), std::sqrt(6.0 * k0) / (2.0 * std::sqrt(3.0)), 1e-13);
}

TEST(LinearChainProperty, ClosedForms) {
    for (int n : {2, 3, 10, 100, 1000, 5000}) {
        for (double k0 : {0.5, 2.0}) {
            const auto c = linear_chain_metrics(n, k0);
            EXPECT_LT(rel_diff(c.lattice.sum_frequencies, c.sum_frequencies_closed), 1e-10) << n;
            EXPECT_LT(rel_diff(c.lattice.trace_k_inverse, c.trace_k_inverse_closed), 1e-10) << n;
            EXPECT_LT(rel_diff(c.metrics().std_dev(), c.sigma_closed), 1e-10) << n;
        }
    }
}

TEST(LinearChainProperty, RoutesAgree) {
    for (int n : {2, 7, 50, 400}) {
        const auto a = linear_chain_metrics(n, 1.0, NetworkRoute::dense);
        const auto b = linear_chain_metrics(n, 1.0, NetworkRoute::mode_sum);
        EXPECT_LT(rel_diff(a.metrics().work(), b.metrics().work()), 1e-11) << n;
        EXPECT_LT(rel_diff(a.metrics().heat(), b.metrics().heat()), 1e-11) << n;
        EXPECT_LT(rel_diff(a.metrics().std_dev(), b.metrics().std_dev()), 1e-11) << n;
    }
}

TEST(LinearChainAsymptotics, LargeChain) {
    const int n = 10'000;
    const auto exact = linear_chain_metrics(n, 1.0);
    const auto a = linear_chain_asymptotics(n, 1.0);
    EXPECT_LT(rel_diff(a.e_loc_asym, exact.energies().e_loc_expect), 0.01);
    EXPECT_NEAR(a.e0_loc_asym, exact.energies().e0_loc, 1e-9 * n);
    EXPECT_LT(rel_diff(a.e_gs_asym, exact.energies().e_gs), 1e-3);
    EXPECT_FALSE(a.small_n_warning);
    EXPECT_TRUE(linear_chain_asymptotics(50, 1.0).small_n_warning);
}

TEST(LinearChainAsymptotics, FittedConstant) {
    const double c = fitted_chain_constant(10'000, 1.0);
    EXPECT_NEAR(c, kChainConstantFitted, 0.08);
    EXPECT_GT(c, kChainConstantEulerMaclaurin);
    // Independent of the spring constant.
    EXPECT_NEAR(fitted_chain_constant(10'000, 3.0), c, 1e-9);
}

TEST(LinearChainAsymptotics, EfficiencyRisesWithLength) {
    double prev = 0.0;
    for (int n : {10, 100, 1000, 10'000, 100'000}) {
        const double eta = *linear_chain_metrics(n, 1.0).metrics().efficiency();
        EXPECT_GT(eta, prev) << n;
        EXPECT_LT(eta, 1.0);
        prev = eta;
    }
}

TEST(Lattice, OneDimensionIsLinearChain) {
    for (int m : {2, 9, 300}) {
        const auto l = lattice_metrics(m, 1, 1.0);
        const auto c = linear_chain_metrics(m, 1.0);
        EXPECT_LT(rel_diff(l.metrics.work(), c.metrics().work()), 1e-11);
        EXPECT_LT(rel_diff(l.metrics.std_dev(), c.metrics().std_dev()), 1e-11);
    }
}

TEST(Lattice, DenseRouteAgrees) {
    for (auto [m, d] : {std::pair{6, 2}, std::pair{4, 3}, std::pair{12, 2}}) {
        const auto a = lattice_metrics(m, d, 0.8, NetworkRoute::dense);
        const auto b = lattice_metrics(m, d, 0.8);
        EXPECT_LT(rel_diff(a.metrics.work(), b.metrics.work()), 1e-11) << m << " " << d;
        EXPECT_LT(rel_diff(a.metrics.heat(), b.metrics.heat()), 1e-11) << m << " " << d;
        EXPECT_LT(rel_diff(a.metrics.std_dev(), b.metrics.std_dev()), 1e-11) << m << " " << d;
    }
}

TEST(Lattice, HigherDimensionsDoLessPerOscillator) {
    const auto d1 = lattice_metrics(10, 1, 1.0);
    const auto d2 = lattice_metrics(10, 2, 1.0);
    EXPECT_LT(d2.metrics.work() / d2.n, d1.metrics.work() / d1.n);
    const auto e2 = lattice_metrics(6, 2, 1.0);
    const auto e3 = lattice_metrics(6, 3, 1.0);
    EXPECT_LT(*e3.metrics.efficiency(), *e2.metrics.efficiency());
}

TEST(Lattice, Limits) {
    EXPECT_THROW(lattice_metrics(1, 2, 1.0), InvalidSpec);
    EXPECT_THROW(lattice_metrics(5, 4, 1.0), InvalidSpec);
    EXPECT_THROW(lattice_metrics(5, 2, 0.0), InvalidSpec);
    EXPECT_THROW(lattice_metrics(300, 3, 1.0), SizeExceeded);
    EXPECT_THROW(lattice_metrics(50, 2, 1.0, NetworkRoute::dense), SizeExceeded);
}

TEST(HeatCertificate, DiagonalCoupling) {
    const Eigen::Vector3d d(1.0, 2.0, 5.0);
    const auto c = heat_positivity_check(d.asDiagonal().toDenseMatrix());
    EXPECT_NEAR(c.q, 0.0, 1e-15);
    EXPECT_NEAR(c.terms.cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(HeatCertificate, TwoOscillators) {
    const TwoOscSpec s{1.0, 2.5};
    const auto c = heat_positivity_check(s.coupling_matrix());
    EXPECT_NEAR(c.q, metrics_two_oscillator(s).heat(), 1e-13);
    EXPECT_NEAR(c.q_symmetric, c.q, 1e-13);
}

TEST(HeatCertificateProperty, RandomCouplings) {
    KeyedRng rng(35, 0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 8);
        const Eigen::MatrixXd k = oracle::random_spd(n, rng, 0.01 + rng.uniform());
        const auto c = heat_positivity_check(k);
        EXPECT_GE(c.q, -1e-12);
        EXPECT_GE(c.q_symmetric, -1e-12);
        EXPECT_GE(c.terms.minCoeff(), 0.0);
        EXPECT_NEAR(c.q, c.q_symmetric, 1e-9);
        EXPECT_NEAR(c.q, metrics_network(k).heat(), 1e-12 * std::max(1.0, k.trace()));
    }
}
