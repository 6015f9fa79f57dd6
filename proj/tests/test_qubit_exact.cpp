#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "qvfe/qubit_exact.hpp"
#include "qvfe/random.hpp"

using namespace qvfe;

namespace {

QubitChainSpec random_spec(KeyedRng& rng, int n, Boundary boundary) {
    QubitChainSpec s;
    s.boundary = boundary;
    for (int j = 0; j < n; ++j) {
        s.omegas.push_back(0.2 + 2.0 * rng.uniform());
    }
    const int bonds = boundary == Boundary::closed ? n : n - 1;
    for (int b = 0; b < bonds; ++b) {
        s.couplings.push_back(3.0 * rng.uniform());
    }
    return s;
}

} // namespace

TEST(QubitChainSpec, ValidatesShape) {
    EXPECT_THROW((QubitChainSpec{{1.0}, {}, Boundary::open}.validate()), InvalidSpec);
    EXPECT_THROW((QubitChainSpec{{1.0, -1.0}, {1.0}, Boundary::open}.validate()), InvalidSpec);
    EXPECT_THROW((QubitChainSpec{{1.0, 1.0, 1.0}, {1.0, 1.0}, Boundary::closed}.validate()), InvalidSpec);
    EXPECT_NO_THROW((QubitChainSpec{{1.0, 1.0, 1.0}, {1.0, 1.0}, Boundary::open}.validate()));
    const auto u = QubitChainSpec::uniform(5, 0.7, 0.3);
    EXPECT_EQ(u.couplings.size(), 5u);
    EXPECT_TRUE(u.is_uniform_closed());
}

TEST(BuildHamiltonian, TwoQubitLayout) {
    const double w = 0.9, g = 0.4;
    const auto h = build_hamiltonian(QubitChainSpec{{w, w}, {g}, Boundary::open});
    ASSERT_EQ(h.rows(), 4);
    EXPECT_DOUBLE_EQ(h(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(h(1, 1), w);
    EXPECT_DOUBLE_EQ(h(2, 2), w);
    EXPECT_DOUBLE_EQ(h(3, 3), 2 * w);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            EXPECT_DOUBLE_EQ(h(i, j), i + j == 3 ? g / 2 : 0.0) << i << "," << j;
        }
    }
}

TEST(BuildHamiltonian, UncoupledIsDiagonalExcitationEnergy) {
    const auto h = build_hamiltonian(QubitChainSpec::uniform(4, 1.5, 0.0));
    for (int l = 0; l < 16; ++l) {
        EXPECT_DOUBLE_EQ(h(l, l), 1.5 * excitation_count(static_cast<std::uint64_t>(l)));
    }
    EXPECT_EQ((h - Eigen::MatrixXd(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0);
}

TEST(BuildHamiltonian, ThreeSiteRingSpectrum) {
    // Reference spectrum from an independent dense eigensolve.
    const double expected[] = {-0.23205080756887717, 0.5, 0.5, 1.5, 1.5, 1.5, 3.232050807568878, 3.5};
    const auto h = build_hamiltonian(QubitChainSpec::uniform(3, 1.0, 1.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    for (int i = 0; i < 8; ++i) {
        EXPECT_NEAR(es.eigenvalues()(i), expected[i], 1e-12);
    }
}

TEST(BuildHamiltonian, SizeCap) {
    EXPECT_THROW(build_hamiltonian(QubitChainSpec::uniform(15, 1.0, 1.0)), SizeExceeded);
    EXPECT_THROW(ground_state(QubitChainSpec::uniform(6, 1.0, 1.0), 5), SizeExceeded);
}

TEST(GroundState, UncoupledIsVacuum) {
    const auto gs = ground_state(QubitChainSpec::uniform(4, 1.0, 0.0));
    EXPECT_NEAR(gs.energy, 0.0, 1e-15);
    EXPECT_NEAR(gs.amplitudes(0), 1.0, 1e-15);
    EXPECT_NEAR(gs.amplitudes.squaredNorm(), 1.0, 1e-14);
}

TEST(GroundState, TwoQubitEnergy) {
    // S = 2, gamma = 1 gives E_phi^- = 1 - sqrt(2).
    const auto gs = ground_state(QubitChainSpec{{1.2, 0.8}, {2.0}, Boundary::open});
    EXPECT_NEAR(gs.energy, 1.0 - std::sqrt(2.0), 1e-14);
    EXPECT_EQ(gs.parity, 0);
}

TEST(GroundState, DeepStrongPicksEvenParity) {
    const auto gs = ground_state(QubitChainSpec::uniform(4, 1.0, 100.0));
    EXPECT_NEAR(gs.energy, -198.00500018749528, 1e-9);
    // -N g / 2 + N omega / 2 up to O(omega^2 / g)
    EXPECT_NEAR(gs.energy, -2.0 * 100.0 + 2.0, 0.01);
    EXPECT_EQ(gs.parity, 0);
    for (std::uint64_t l = 0; l < 16; ++l) {
        if (excitation_count(l) % 2) {
            EXPECT_EQ(gs.amplitudes(static_cast<Eigen::Index>(l)), 0.0);
        }
    }
}

TEST(GroundState, MatrixAndSpecRoutesAgree) {
    KeyedRng rng(11, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto spec = random_spec(rng, 3 + trial % 4, trial % 2 ? Boundary::open : Boundary::closed);
        const auto a = ground_state(spec);
        const auto b = ground_state(build_hamiltonian(spec));
        EXPECT_NEAR(a.energy, b.energy, 1e-12);
        EXPECT_NEAR(std::abs(a.amplitudes.dot(b.amplitudes)), 1.0, 1e-10);
    }
}

TEST(GroundState, GeneralMatrixWithoutParityBlocks) {
    Eigen::MatrixXd h(3, 3);
    h << 2, 1, 0, 1, 2, 1, 0, 1, 2;
    const auto gs = ground_state(h);
    EXPECT_NEAR(gs.energy, 2.0 - std::sqrt(2.0), 1e-14);
    EXPECT_EQ(gs.parity, -1);
}

TEST(GroundState, RejectsNonSymmetric) {
    Eigen::MatrixXd h(2, 2);
    h << 0, 1, 0, 0;
    EXPECT_THROW(ground_state(h), InvalidSpec);
}

TEST(LowestEigenpair, InverseIterationMatchesFullSolver) {
    KeyedRng rng(5, 0);
    const int n = 600;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.uniform() - 0.5;
    const auto pair = detail::lowest_eigenpair(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    EXPECT_NEAR(pair.value, es.eigenvalues()(0), 1e-11);
    EXPECT_NEAR(std::abs(pair.vector.dot(es.eigenvectors().col(0))), 1.0, 1e-9);
}

TEST(EngineMetricsExact, UncoupledIsZero) {
    const auto m = engine_metrics_exact(QubitChainSpec::uniform(5, 1.0, 0.0));
    EXPECT_EQ(m.work(), 0.0);
    EXPECT_EQ(m.heat(), 0.0);
    EXPECT_FALSE(m.efficiency_defined());
}

TEST(EngineMetricsExact, TwoQubitReference) {
    const auto m = engine_metrics_exact(QubitChainSpec{{1.2, 0.8}, {2.0}, Boundary::open});
    const double r2 = std::sqrt(2.0);
    EXPECT_NEAR(m.work(), 1.0 - 1.0 / r2, 1e-13);
    EXPECT_NEAR(m.heat(), 1.0 / r2, 1e-13);
    EXPECT_NEAR(*m.efficiency(), 1.0 / (1.0 + r2), 1e-13);
    EXPECT_NEAR(m.std_dev(), 1.0 / r2, 1e-13);
}

TEST(EngineMetricsExact, EightSiteCriticalRing) {
    const auto m = engine_metrics_exact(QubitChainSpec::uniform(8, 1.0, 1.0));
    EXPECT_NEAR(m.work() / 8.0, 0.5 - 1.0 / std::numbers::pi, 0.05);
    EXPECT_NEAR(m.work() / 8.0, 0.17963556903231115, 1e-10);
}

TEST(OutcomeDistribution, TwoQubitOutcomes) {
    const auto d = outcome_distribution(QubitChainSpec{{1.2, 0.8}, {2.0}, Boundary::open});
    const double phi = 0.5 * std::atan(1.0);
    EXPECT_NEAR(d.probabilities[0], std::cos(phi) * std::cos(phi), 1e-13);
    EXPECT_NEAR(d.probabilities[3], std::sin(phi) * std::sin(phi), 1e-13);
    EXPECT_NEAR(d.probabilities[1], 0.0, 1e-15);
    EXPECT_NEAR(d.probabilities[2], 0.0, 1e-15);
}

TEST(OutcomeDistribution, UncoupledIsCertain) {
    const auto d = outcome_distribution(QubitChainSpec::uniform(3, 1.0, 0.0));
    EXPECT_NEAR(d.probabilities[0], 1.0, 1e-15);
}

TEST(OutcomeDistribution, CriticalRingHasEvenSupport) {
    const auto d = outcome_distribution(QubitChainSpec::uniform(4, 1.0, 1.0));
    EXPECT_NEAR(d.total_probability(), 1.0, 1e-10);
    EXPECT_LT(d.max_odd_probability(), 1e-10);
}

// Distribution moments reproduce the expectation-value route.
TEST(OutcomeDistributionProperty, MomentsMatchMetrics) {
    KeyedRng rng(3, 1);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 6;
        const auto boundary = (n == 2 || trial % 3 == 0) ? Boundary::open : Boundary::closed;
        const auto spec = random_spec(rng, n, boundary);
        const auto d = outcome_distribution(spec);
        const auto m = engine_metrics_exact(spec);
        const double scale = std::max(1.0, m.work());
        EXPECT_NEAR(d.total_probability(), 1.0, 1e-10);
        EXPECT_NEAR(d.mean_work(), m.work(), 1e-10 * scale);
        EXPECT_NEAR(d.work_variance(), m.std_dev() * m.std_dev(), 1e-10 * scale * scale);
    }
}

// Excitation parity commutes with H for every chain.
TEST(HamiltonianProperty, ParityCommutes) {
    KeyedRng rng(9, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 5;
        const auto spec = random_spec(rng, n, (n == 2 || trial % 2) ? Boundary::open : Boundary::closed);
        const auto h = build_hamiltonian(spec);
        Eigen::VectorXd parity(h.rows());
        for (Eigen::Index l = 0; l < h.rows(); ++l) {
            parity(l) = excitation_count(static_cast<std::uint64_t>(l)) % 2 ? -1.0 : 1.0;
        }
        const Eigen::MatrixXd pi = parity.asDiagonal();
        EXPECT_EQ((h * pi - pi * h).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(SampleCycles, UncoupledAlwaysZero) {
    const auto s = sample_cycles(QubitChainSpec::uniform(3, 1.0, 0.0), 1000, 1);
    EXPECT_EQ(s.mean_work, 0.0);
    EXPECT_EQ(s.std_work, 0.0);
    for (const auto& r : s.records) {
        EXPECT_EQ(r.work, 0.0);
    }
}

TEST(SampleCycles, RejectsZeroSamples) {
    EXPECT_THROW(sample_cycles(QubitChainSpec::uniform(3, 1.0, 1.0), 0, 1), InvalidSpec);
}

TEST(SampleCycles, DeterministicAcrossJobCounts) {
    const auto spec = QubitChainSpec::uniform(4, 1.0, 1.5);
    const auto a = sample_cycles(spec, 100000, 99, {1, true});
    const auto b = sample_cycles(spec, 100000, 99, {4, true});
    EXPECT_EQ(a.mean_work, b.mean_work);
    EXPECT_EQ(a.std_work, b.std_work);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        ASSERT_EQ(a.records[i].basis_index, b.records[i].basis_index);
    }
    const auto c = sample_cycles(spec, 100000, 100, {1, false});
    EXPECT_NE(a.mean_work, c.mean_work);
    EXPECT_TRUE(c.records.empty());
}

TEST(SampleCycles, TwoQubitMeanWithinStandardErrors) {
    const auto spec = QubitChainSpec{{1.2, 0.8}, {2.0}, Boundary::open};
    const auto s = sample_cycles(spec, 200000, 2024, {1, false});
    const double w = 1.0 - 1.0 / std::sqrt(2.0);
    EXPECT_LT(std::abs(s.mean_work - w), 4.0 * s.std_error_mean);
    EXPECT_LT(std::abs(s.std_work - 1.0 / std::sqrt(2.0)), 4.0 * s.std_error_std);
}

TEST(Csv, DistributionColumns) {
    const auto d = outcome_distribution(QubitChainSpec{{1.0, 1.0}, {1.0}, Boundary::open});
    std::ostringstream os;
    write_distribution_csv(os, d);
    const std::string out = os.str();
    EXPECT_EQ(out.rfind("basis_index,excitation_count,probability,work_value\r\n", 0), 0u);
    EXPECT_NE(out.find("\r\n3,2,"), std::string::npos);
}

TEST(GroundState, LanczosMatchesDenseSectors) {
    for (int n : {11}) {
        for (double g : {0.1, 1.0, 10.0}) {
            for (auto boundary : {Boundary::closed, Boundary::open}) {
                auto spec = QubitChainSpec::uniform(n, 1.0, g, boundary);
                spec.omegas[3] = 1.4;  // break translation symmetry too
                for (int parity = 0; parity < 2; ++parity) {
                    const auto dense = detail::lowest_eigenpair(detail::sector_hamiltonian(spec, parity));
                    const auto sparse = detail::lowest_eigenpair_lanczos(detail::sector_hamiltonian_sparse(spec, parity));
                    ASSERT_TRUE(sparse.has_value()) << n << " " << g;
                    EXPECT_NEAR(sparse->value, dense.value, 1e-11 * std::abs(dense.value));
                    EXPECT_NEAR(std::abs(sparse->vector.dot(dense.vector)), 1.0, 1e-10) << n << " " << g;
                }
            }
        }
    }
}

TEST(GroundState, SparseSectorEqualsDenseSector) {
    const auto spec = QubitChainSpec{{1.0, 0.7, 1.3, 0.9}, {0.4, 2.0, 1.1, 0.6}, Boundary::closed};
    for (int parity = 0; parity < 2; ++parity) {
        const Eigen::MatrixXd s = Eigen::MatrixXd(detail::sector_hamiltonian_sparse(spec, parity));
        EXPECT_EQ((s - detail::sector_hamiltonian(spec, parity)).cwiseAbs().maxCoeff(), 0.0);
    }
}
