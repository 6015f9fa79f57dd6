#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "qvfe/two_qubit.hpp"

using namespace qvfe;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    }
    return g;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

} // namespace

TEST(TwoQubitSpec, Validation) {
    EXPECT_THROW((TwoQubitSpec{0.8, 1.2, 1.0}.validate()), InvalidSpec);
    EXPECT_THROW((TwoQubitSpec{1.0, 0.0, 1.0}.validate()), InvalidSpec);
    EXPECT_THROW((TwoQubitSpec{1.0, 1.0, -0.1}.validate()), InvalidSpec);
    EXPECT_NO_THROW((TwoQubitSpec{1.0, 1.0, 0.0}.validate()));
    const auto s = TwoQubitSpec::from_dimensionless(2.0, 1.5, 0.3);
    EXPECT_NEAR(s.gamma(), 1.5, 1e-15);
    EXPECT_NEAR(s.delta(), 0.3, 1e-15);
}

TEST(Spectrum, Uncoupled) {
    const auto sp = spectrum({1.2, 0.8, 0.0});
    EXPECT_EQ(sp.phi, 0.0);
    EXPECT_EQ(sp.e_phi_minus, 0.0);
    EXPECT_DOUBLE_EQ(sp.e_phi_plus, 2.0);
}

TEST(Spectrum, MatchesDenseEigensolve) {
    const TwoQubitSpec specs[] = {{1.2, 0.8, 2.0}, {1.0, 1.0, 2.0}, {1.9, 0.1, 0.37}};
    for (const auto& s : specs) {
        const auto sp = spectrum(s);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_hamiltonian(s.as_chain()));
        const auto& ev = es.eigenvalues();
        EXPECT_NEAR(ev(0), sp.e_phi_minus, 1e-13);
        EXPECT_NEAR(ev(1), sp.e_psi_minus, 1e-13);
        EXPECT_NEAR(ev(2), sp.e_psi_plus, 1e-13);
        EXPECT_NEAR(ev(3), sp.e_phi_plus, 1e-13);
    }
    const auto a = spectrum({1.2, 0.8, 2.0});
    EXPECT_NEAR(a.e_phi_plus, 1.0 + std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(a.e_phi_minus, 1.0 - std::sqrt(2.0), 1e-14);
    const auto b = spectrum({1.0, 1.0, 2.0});
    EXPECT_NEAR(b.e_psi_plus, 2.0, 1e-14);
    EXPECT_NEAR(b.e_psi_minus, 0.0, 1e-14);
    EXPECT_NEAR(b.psi, std::atan(1.0), 1e-15);
}

TEST(SpectrumProperty, OrderingAndAngles) {
    for (double delta : {0.0, 0.3, 0.9}) {
        for (double gamma : log_grid(1e-3, 1e3, 40)) {
            const auto s = TwoQubitSpec::from_dimensionless(2.0, gamma, delta);
            const auto sp = spectrum(s);
            EXPECT_LT(sp.e_phi_minus, sp.e_psi_minus);
            EXPECT_LE(sp.e_psi_minus, sp.e_psi_plus);
            EXPECT_LT(sp.e_psi_plus, sp.e_phi_plus);
            EXPECT_NEAR(std::tan(2.0 * sp.phi), gamma, 1e-12 * std::max(1.0, gamma * gamma));
            EXPECT_GE(sp.phi, 0.0);
            EXPECT_LT(sp.phi, std::atan(1.0) * 2.0);
            EXPECT_GE(sp.psi, 0.0);
            EXPECT_LT(sp.psi, std::atan(1.0) * 2.0);
        }
    }
}

TEST(OutcomeProbabilities, Limits) {
    const auto a = outcome_probabilities({1.0, 1.0, 0.0});
    EXPECT_EQ(a.p00, 1.0);
    EXPECT_EQ(a.p11, 0.0);
    const auto b = outcome_probabilities(TwoQubitSpec::from_dimensionless(2.0, 1e9, 0.2));
    EXPECT_NEAR(b.p00, 0.5, 1e-9);
    EXPECT_NEAR(b.p11, 0.5, 1e-9);
}

TEST(OutcomeProbabilities, MatchesExactDistribution) {
    const TwoQubitSpec s{1.2, 0.8, 2.0};
    const auto p = outcome_probabilities(s);
    EXPECT_NEAR(p.p00, 0.8535533905932737, 1e-15);
    EXPECT_NEAR(p.p11, 0.14644660940672624, 1e-15);
    const auto d = outcome_distribution(s.as_chain());
    EXPECT_NEAR(d.probabilities[0], p.p00, 1e-13);
    EXPECT_NEAR(d.probabilities[3], p.p11, 1e-13);
}

TEST(Metrics, ReferencePoint) {
    const auto m = metrics({1.2, 0.8, 2.0});
    const double r2 = std::sqrt(2.0);
    EXPECT_NEAR(m.work(), 1.0 - 1.0 / r2, 1e-15);
    EXPECT_NEAR(m.heat(), 1.0 / r2, 1e-15);
    EXPECT_NEAR(*m.efficiency(), 1.0 / (1.0 + r2), 1e-15);
    EXPECT_NEAR(m.std_dev(), 1.0 / r2, 1e-15);
    EXPECT_NEAR(m.gap(), -spectrum({1.2, 0.8, 2.0}).e_phi_minus, 1e-15);
}

TEST(Metrics, Limits) {
    EXPECT_FALSE(metrics({1.0, 1.0, 0.0}).efficiency_defined());
    EXPECT_NEAR(*metrics(TwoQubitSpec::from_dimensionless(2.0, 1e-6, 0.1)).efficiency(), 0.5, 1e-9);
    const auto strong = metrics(TwoQubitSpec::from_dimensionless(2.0, 1e8, 0.1));
    EXPECT_NEAR(strong.work(), 1.0, 1e-7);
    EXPECT_NEAR(*strong.efficiency(), 0.0, 1e-7);
}

TEST(Tradeoff, Values) {
    const TwoQubitSpec s{1.2, 0.8, 2.0};
    EXPECT_DOUBLE_EQ(efficiency_work_tradeoff(s, 0.0), 0.5);
    EXPECT_NEAR(efficiency_work_tradeoff(s, 1.0 - 1e-12), 0.0, 1e-11);
    EXPECT_NEAR(efficiency_work_tradeoff(s, metrics(s).work()), 1.0 / (1.0 + std::sqrt(2.0)), 1e-14);
    EXPECT_THROW(efficiency_work_tradeoff(s, 1.0), DomainError);
    EXPECT_THROW(efficiency_work_tradeoff(s, -0.1), DomainError);
}

TEST(MetricsProperty, TradeoffConsistentWithMetrics) {
    for (double gamma : log_grid(1e-3, 1e3, 60)) {
        const auto s = TwoQubitSpec::from_dimensionless(3.0, gamma, 0.4);
        const auto m = metrics(s);
        EXPECT_NEAR(efficiency_work_tradeoff(s, m.work()), *m.efficiency(), 1e-12);
    }
}

TEST(MetricsProperty, WorkIndependentOfDetuning) {
    for (double gamma : log_grid(1e-2, 1e2, 25)) {
        const double w0 = metrics(TwoQubitSpec::from_dimensionless(2.0, gamma, 0.0)).work();
        for (double delta : {0.1, 0.5, 0.99}) {
            EXPECT_NEAR(metrics(TwoQubitSpec::from_dimensionless(2.0, gamma, delta)).work(), w0, 1e-12 * w0);
        }
    }
}

TEST(MetricsProperty, MonotoneInCoupling) {
    const auto grid = log_grid(1e-3, 1e3, 400);
    double w_prev = -1.0, eta_prev = 2.0;
    for (double gamma : grid) {
        const auto m = metrics(TwoQubitSpec::from_dimensionless(2.0, gamma, 0.3));
        EXPECT_GT(m.work(), w_prev);
        EXPECT_LT(*m.efficiency(), eta_prev);
        w_prev = m.work();
        eta_prev = *m.efficiency();
    }
}

TEST(MetricsProperty, MatchesExactDiagonalization) {
    for (double delta : {0.0, 0.3, 0.9}) {
        for (double gamma : log_grid(1e-3, 1e3, 50)) {
            const auto s = TwoQubitSpec::from_dimensionless(2.0, gamma, delta);
            const auto a = metrics(s);
            const auto b = engine_metrics_exact(s.as_chain());
            EXPECT_LT(rel_diff(a.work(), b.work()), 1e-12) << gamma << " " << delta;
            EXPECT_LT(rel_diff(a.heat(), b.heat()), 1e-12) << gamma << " " << delta;
            EXPECT_LT(rel_diff(a.gap(), b.gap()), 1e-12) << gamma << " " << delta;
            EXPECT_LT(rel_diff(a.std_dev(), b.std_dev()), 1e-12) << gamma << " " << delta;
            EXPECT_LT(rel_diff(*a.efficiency(), *b.efficiency()), 1e-12) << gamma << " " << delta;
        }
    }
}
