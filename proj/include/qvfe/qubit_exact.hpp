#pragma once

// Exact diagonalization of qubit chains
//
//   H = sum_j omega_j n_j + sum_bonds (g_b / 2) sigma^x_j sigma^x_k
//
// in the computational basis. Basis index l = sum_j 2^(N-1-j) l_j, so qubit 0 is
// the most significant bit. H_int flips two qubits at a time and therefore
// conserves the excitation-number parity; every solve below works in the two
// parity sectors separately, each of dimension 2^(N-1).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qvfe/csv.hpp"
#include "qvfe/engine_metrics.hpp"
#include "qvfe/errors.hpp"
#include "qvfe/parallel.hpp"
#include "qvfe/random.hpp"

namespace qvfe {

enum class Boundary { closed, open };

struct QubitChainSpec {
    std::vector<double> omegas;
    std::vector<double> couplings;  // bond j couples sites j and j+1 (mod N when closed)
    Boundary boundary = Boundary::closed;

    static QubitChainSpec uniform(int n, double omega, double g, Boundary boundary = Boundary::closed) {
        if (n < 2) {
            throw InvalidSpec("a qubit chain needs at least two sites");
        }
        const auto bonds = static_cast<std::size_t>(boundary == Boundary::closed ? n : n - 1);
        return QubitChainSpec{std::vector<double>(static_cast<std::size_t>(n), omega),
                              std::vector<double>(bonds, g), boundary};
    }

    int size() const noexcept { return static_cast<int>(omegas.size()); }

    std::size_t expected_bond_count() const noexcept {
        return boundary == Boundary::closed ? omegas.size() : omegas.size() - 1;
    }

    std::pair<int, int> bond_sites(std::size_t b) const noexcept {
        const int j = static_cast<int>(b);
        return {j, (j + 1) % size()};
    }

    void validate() const {
        if (omegas.size() < 2) {
            throw InvalidSpec("a qubit chain needs at least two sites");
        }
        for (double w : omegas) {
            if (!(w > 0.0) || !std::isfinite(w)) {
                throw InvalidSpec("qubit frequencies must be finite and positive");
            }
        }
        if (couplings.size() != expected_bond_count()) {
            std::ostringstream os;
            os << "expected " << expected_bond_count() << " couplings for "
               << (boundary == Boundary::closed ? "closed" : "open") << " chain of " << omegas.size()
               << " qubits, got " << couplings.size();
            throw InvalidSpec(os.str());
        }
        for (double g : couplings) {
            if (!std::isfinite(g)) {
                throw InvalidSpec("couplings must be finite");
            }
        }
    }

    /// Uniform frequencies and couplings on a closed ring.
    bool is_uniform_closed() const noexcept {
        if (boundary != Boundary::closed || omegas.empty()) {
            return false;
        }
        const bool same_w = std::all_of(omegas.begin(), omegas.end(), [&](double w) { return w == omegas.front(); });
        const bool same_g = std::all_of(couplings.begin(), couplings.end(),
                                        [&](double g) { return g == couplings.front(); });
        return same_w && same_g;
    }
};

inline constexpr int kDefaultMaxQubits = 14;

inline int excitation_count(std::uint64_t l) noexcept { return std::popcount(l); }

inline double local_energy(const QubitChainSpec& spec, std::uint64_t l) noexcept {
    const int n = spec.size();
    double e = 0.0;
    for (int j = 0; j < n; ++j) {
        if ((l >> (n - 1 - j)) & 1U) {
            e += spec.omegas[static_cast<std::size_t>(j)];
        }
    }
    return e;
}

namespace detail {

inline void check_size(const QubitChainSpec& spec, int max_qubits) {
    spec.validate();
    if (spec.size() > max_qubits) {
        std::ostringstream os;
        os << "chain of " << spec.size() << " qubits exceeds the exact-diagonalization cap of " << max_qubits;
        throw SizeExceeded(os.str());
    }
}

inline std::uint64_t flip_mask(const QubitChainSpec& spec, std::size_t bond) {
    const int n = spec.size();
    const auto [j, k] = spec.bond_sites(bond);
    return (std::uint64_t{1} << (n - 1 - j)) ^ (std::uint64_t{1} << (n - 1 - k));
}

// Basis states of one parity sector in ascending order. Each pair (2k, 2k+1)
// holds exactly one state of each parity, so state l sits at position l >> 1.
inline std::uint64_t sector_state(std::uint64_t position, int parity) noexcept {
    const std::uint64_t l = position << 1;
    return (std::popcount(l) & 1) == parity ? l : (l | 1U);
}

inline Eigen::MatrixXd sector_hamiltonian(const QubitChainSpec& spec, int parity) {
    const std::uint64_t dim = std::uint64_t{1} << (spec.size() - 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    std::vector<std::uint64_t> masks(spec.couplings.size());
    for (std::size_t b = 0; b < masks.size(); ++b) {
        masks[b] = flip_mask(spec, b);
    }
    for (std::uint64_t pos = 0; pos < dim; ++pos) {
        const std::uint64_t l = sector_state(pos, parity);
        const auto col = static_cast<Eigen::Index>(pos);
        h(col, col) = local_energy(spec, l);
        for (std::size_t b = 0; b < masks.size(); ++b) {
            const auto row = static_cast<Eigen::Index>((l ^ masks[b]) >> 1);
            h(row, col) += 0.5 * spec.couplings[b];
        }
    }
    return h;
}

inline Eigen::SparseMatrix<double> sector_hamiltonian_sparse(const QubitChainSpec& spec, int parity) {
    const std::uint64_t dim = std::uint64_t{1} << (spec.size() - 1);
    std::vector<std::uint64_t> masks(spec.couplings.size());
    for (std::size_t b = 0; b < masks.size(); ++b) {
        masks[b] = flip_mask(spec, b);
    }
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(dim) * (masks.size() + 1));
    for (std::uint64_t pos = 0; pos < dim; ++pos) {
        const std::uint64_t l = sector_state(pos, parity);
        const auto col = static_cast<Eigen::Index>(pos);
        entries.emplace_back(col, col, local_energy(spec, l));
        for (std::size_t b = 0; b < masks.size(); ++b) {
            entries.emplace_back(static_cast<Eigen::Index>((l ^ masks[b]) >> 1), col, 0.5 * spec.couplings[b]);
        }
    }
    Eigen::SparseMatrix<double> h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    h.setFromTriplets(entries.begin(), entries.end());  // duplicates (two bonds, same flip) are summed
    return h;
}

struct Eigenpair {
    double value = 0.0;
    Eigen::VectorXd vector;
};

// Solves (T - shift) x = b for a symmetric tridiagonal T via LDL^T.
// Returns false when the shifted matrix is not positive definite.
inline bool solve_shifted_tridiagonal(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub, double shift,
                                      Eigen::VectorXd& x) {
    const Eigen::Index n = diag.size();
    Eigen::VectorXd d(n);
    Eigen::VectorXd l(std::max<Eigen::Index>(n - 1, 0));
    d(0) = diag(0) - shift;
    if (!(d(0) > 0.0)) {
        return false;
    }
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        l(i) = sub(i) / d(i);
        d(i + 1) = diag(i + 1) - shift - l(i) * sub(i);
        if (!(d(i + 1) > 0.0)) {
            return false;
        }
    }
    for (Eigen::Index i = 1; i < n; ++i) {
        x(i) -= l(i - 1) * x(i - 1);
    }
    x.array() /= d.array();
    for (Eigen::Index i = n - 2; i >= 0; --i) {
        x(i) -= l(i) * x(i + 1);
    }
    return true;
}

// Lowest eigenpair of a dense real-symmetric matrix. Small matrices use the
// full solver; larger ones are tridiagonalized once, the lowest tridiagonal
// eigenvalue is refined by inverse iteration and back-transformed, which skips
// the O(n^3) eigenvector accumulation.
inline Eigenpair lowest_eigenpair(const Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    if (n == 0) {
        throw InvalidSpec("empty matrix");
    }
    constexpr Eigen::Index kFullSolverLimit = 384;
    if (n <= kFullSolverLimit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        if (es.info() != Eigen::Success) {
            throw ConvergenceFailure("symmetric eigensolver did not converge");
        }
        return {es.eigenvalues()(0), es.eigenvectors().col(0)};
    }

    Eigen::Tridiagonalization<Eigen::MatrixXd> tri(a);
    const Eigen::VectorXd diag = tri.diagonal();
    const Eigen::VectorXd sub = tri.subDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw ConvergenceFailure("tridiagonal eigenvalue iteration did not converge");
    }
    const double lambda = es.eigenvalues()(0);
    const double scale = std::max({1.0, std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(n - 1))});

    double offset = 1e-9 * scale;
    Eigen::VectorXd x(n);
    KeyedRng rng(0x5EEDULL, static_cast<std::uint64_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = 1.0 + 0.5 * rng.uniform();
    }
    x.normalize();
    bool converged = false;
    for (int iter = 0; iter < 60 && !converged; ++iter) {
        Eigen::VectorXd y = x;
        if (!solve_shifted_tridiagonal(diag, sub, lambda - offset, y)) {
            offset *= 4.0;
            continue;
        }
        y.normalize();
        if (y.dot(x) < 0.0) {
            y = -y;
        }
        converged = (y - x).norm() < 1e-14 * std::sqrt(static_cast<double>(n));
        x = std::move(y);
    }

    Eigenpair out;
    out.vector = tri.matrixQ() * x;
    out.vector.normalize();
    const Eigen::VectorXd av = a * out.vector;
    out.value = out.vector.dot(av);
    const double residual = (av - out.value * out.vector).norm();
    if (!(residual <= 1e-9 * scale)) {
        std::ostringstream os;
        os << "inverse iteration residual " << residual << " above tolerance";
        throw ConvergenceFailure(os.str());
    }
    return out;
}

// Lowest eigenpair of a sparse symmetric matrix by Lanczos with full
// reorthogonalization, restarted from the current Ritz vector. Returns nullopt
// when the residual does not reach tolerance, so callers can fall back to the
// dense path.
inline std::optional<Eigenpair> lowest_eigenpair_lanczos(const Eigen::SparseMatrix<double>& a) {
    const Eigen::Index n = a.rows();
    double scale = 1.0;
    for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
        double col = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, c); it; ++it) {
            col += std::abs(it.value());
        }
        scale = std::max(scale, col);
    }
    const double tol = 1e-12 * scale;
    const Eigen::Index m_max = std::min<Eigen::Index>(n, 160);

    Eigen::VectorXd x(n);
    KeyedRng rng(0x5EEDULL, static_cast<std::uint64_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = 1.0 + 0.5 * rng.uniform();
    }
    x.normalize();

    Eigen::MatrixXd v(n, m_max);
    for (int restart = 0; restart < 30; ++restart) {
        Eigen::VectorXd alpha(m_max);
        Eigen::VectorXd beta(m_max);
        v.col(0) = x;
        Eigen::Index m = m_max;
        for (Eigen::Index j = 0; j < m_max; ++j) {
            Eigen::VectorXd w = a * v.col(j);
            alpha(j) = v.col(j).dot(w);
            for (int pass = 0; pass < 2; ++pass) {
                w -= v.leftCols(j + 1) * (v.leftCols(j + 1).transpose() * w);
            }
            beta(j) = w.norm();
            if (j + 1 == m_max || beta(j) < 1e-14 * scale) {
                m = j + 1;
                break;
            }
            v.col(j + 1) = w / beta(j);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(alpha.head(m), beta.head(std::max<Eigen::Index>(m - 1, 0)),
                                  Eigen::ComputeEigenvectors);
        if (es.info() != Eigen::Success) {
            return std::nullopt;
        }
        x = v.leftCols(m) * es.eigenvectors().col(0);
        x.normalize();
        const Eigen::VectorXd ax = a * x;
        const double value = x.dot(ax);
        if ((ax - value * x).norm() <= tol) {
            return Eigenpair{value, std::move(x)};
        }
    }
    return std::nullopt;
}

inline Eigenpair sector_ground_pair(const QubitChainSpec& spec, int parity) {
    constexpr int kSparseFromQubits = 11;
    if (spec.size() >= kSparseFromQubits) {
        if (auto pair = lowest_eigenpair_lanczos(sector_hamiltonian_sparse(spec, parity))) {
            return std::move(*pair);
        }
    }
    return lowest_eigenpair(sector_hamiltonian(spec, parity));
}

inline bool is_power_of_two(Eigen::Index n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

// Fix the global sign so the largest-magnitude amplitude is positive.
inline void canonical_sign(Eigen::VectorXd& v) {
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) {
        v = -v;
    }
}

inline bool prefer_odd(double even_value, double odd_value) noexcept {
    const double tol = 1e-10 * std::max(1.0, std::abs(even_value));
    return odd_value < even_value - tol;
}

} // namespace detail

/// Full 2^N x 2^N Hamiltonian.
inline Eigen::MatrixXd build_hamiltonian(const QubitChainSpec& spec, int max_qubits = kDefaultMaxQubits) {
    detail::check_size(spec, max_qubits);
    const std::uint64_t dim = std::uint64_t{1} << spec.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::uint64_t l = 0; l < dim; ++l) {
        const auto col = static_cast<Eigen::Index>(l);
        h(col, col) = local_energy(spec, l);
        for (std::size_t b = 0; b < spec.couplings.size(); ++b) {
            h(static_cast<Eigen::Index>(l ^ detail::flip_mask(spec, b)), col) += 0.5 * spec.couplings[b];
        }
    }
    return h;
}

struct GroundState {
    double energy = 0.0;
    Eigen::VectorXd amplitudes;  // length 2^N, computational basis
    int parity = -1;             // 0 even, 1 odd, -1 when H does not conserve parity
};

/// Ground state of a real symmetric matrix. When H is a qubit Hamiltonian that
/// conserves excitation parity, the sectors are solved separately and a
/// (near-)degenerate pair resolves to the even-parity state.
inline GroundState ground_state(const Eigen::MatrixXd& h) {
    const Eigen::Index dim = h.rows();
    if (dim == 0 || h.cols() != dim) {
        throw InvalidSpec("ground_state expects a non-empty square matrix");
    }
    const double norm = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * norm) {
        throw InvalidSpec("ground_state expects a symmetric matrix");
    }

    bool parity_blocks = detail::is_power_of_two(dim) && dim >= 2;
    if (parity_blocks) {
        for (Eigen::Index c = 0; c < dim && parity_blocks; ++c) {
            for (Eigen::Index r = 0; r < dim; ++r) {
                if (((std::popcount(static_cast<std::uint64_t>(r)) ^ std::popcount(static_cast<std::uint64_t>(c))) & 1) &&
                    h(r, c) != 0.0) {
                    parity_blocks = false;
                    break;
                }
            }
        }
    }

    GroundState gs;
    if (!parity_blocks) {
        auto pair = detail::lowest_eigenpair(h);
        detail::canonical_sign(pair.vector);
        gs.energy = pair.value;
        gs.amplitudes = std::move(pair.vector);
        return gs;
    }

    detail::Eigenpair sectors[2];
    const Eigen::Index half = dim / 2;
    for (int parity = 0; parity < 2; ++parity) {
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(half));
        for (Eigen::Index p = 0; p < half; ++p) {
            idx[static_cast<std::size_t>(p)] =
                static_cast<Eigen::Index>(detail::sector_state(static_cast<std::uint64_t>(p), parity));
        }
        sectors[parity] = detail::lowest_eigenpair(h(idx, idx));
    }
    const int chosen = detail::prefer_odd(sectors[0].value, sectors[1].value) ? 1 : 0;
    gs.energy = sectors[chosen].value;
    gs.parity = chosen;
    gs.amplitudes = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index p = 0; p < half; ++p) {
        gs.amplitudes(static_cast<Eigen::Index>(detail::sector_state(static_cast<std::uint64_t>(p), chosen))) =
            sectors[chosen].vector(p);
    }
    detail::canonical_sign(gs.amplitudes);
    return gs;
}

/// Sector-blocked ground state straight from the chain description; never forms
/// the full 2^N matrix.
inline GroundState ground_state(const QubitChainSpec& spec, int max_qubits = kDefaultMaxQubits) {
    detail::check_size(spec, max_qubits);
    detail::Eigenpair sectors[2] = {detail::sector_ground_pair(spec, 0), detail::sector_ground_pair(spec, 1)};
    const int chosen = detail::prefer_odd(sectors[0].value, sectors[1].value) ? 1 : 0;

    GroundState gs;
    gs.energy = sectors[chosen].value;
    gs.parity = chosen;
    const std::uint64_t half = std::uint64_t{1} << (spec.size() - 1);
    gs.amplitudes = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * half));
    for (std::uint64_t p = 0; p < half; ++p) {
        gs.amplitudes(static_cast<Eigen::Index>(detail::sector_state(p, chosen))) =
            sectors[chosen].vector(static_cast<Eigen::Index>(p));
    }
    detail::canonical_sign(gs.amplitudes);
    return gs;
}

struct ExactSolution {
    GroundState ground;
    GroundStateEnergies energies;
    EngineMetrics metrics;
};

/// E_0loc is zero for every qubit chain here: H_loc = sum omega_j n_j with omega_j > 0.
inline ExactSolution solve_exact(const QubitChainSpec& spec, int max_qubits = kDefaultMaxQubits) {
    ExactSolution sol;
    sol.ground = ground_state(spec, max_qubits);
    double e1 = 0.0;
    double e2 = 0.0;
    for (Eigen::Index l = 0; l < sol.ground.amplitudes.size(); ++l) {
        const double p = sol.ground.amplitudes(l) * sol.ground.amplitudes(l);
        if (p == 0.0) {
            continue;
        }
        const double e = local_energy(spec, static_cast<std::uint64_t>(l));
        e1 += p * e;
        e2 += p * e * e;
    }
    sol.energies = GroundStateEnergies{e1, e2, 0.0, sol.ground.energy};
    sol.metrics = metrics_from_energies(sol.energies);
    return sol;
}

inline EngineMetrics engine_metrics_exact(const QubitChainSpec& spec, int max_qubits = kDefaultMaxQubits) {
    return solve_exact(spec, max_qubits).metrics;
}

struct OutcomeDistribution {
    int n = 0;
    std::vector<double> probabilities;  // P_l = |<l|gs>|^2
    std::vector<double> work_values;    // W_l = E_l - E_0loc

    double mean_work() const {
        double w = 0.0;
        for (std::size_t l = 0; l < probabilities.size(); ++l) {
            w += probabilities[l] * work_values[l];
        }
        return w;
    }

    double work_variance() const {
        const double mean = mean_work();
        double v = 0.0;
        for (std::size_t l = 0; l < probabilities.size(); ++l) {
            const double d = work_values[l] - mean;
            v += probabilities[l] * d * d;
        }
        return v;
    }

    double total_probability() const { return std::accumulate(probabilities.begin(), probabilities.end(), 0.0); }

    /// Largest probability carried by a state with an odd number of excitations.
    double max_odd_probability() const {
        double m = 0.0;
        for (std::size_t l = 0; l < probabilities.size(); ++l) {
            if (excitation_count(l) & 1) {
                m = std::max(m, probabilities[l]);
            }
        }
        return m;
    }
};

inline OutcomeDistribution outcome_distribution(const QubitChainSpec& spec, int max_qubits = kDefaultMaxQubits) {
    const GroundState gs = ground_state(spec, max_qubits);
    OutcomeDistribution d;
    d.n = spec.size();
    const auto dim = static_cast<std::size_t>(gs.amplitudes.size());
    d.probabilities.resize(dim);
    d.work_values.resize(dim);
    for (std::size_t l = 0; l < dim; ++l) {
        const double a = gs.amplitudes(static_cast<Eigen::Index>(l));
        d.probabilities[l] = a * a;
        d.work_values[l] = local_energy(spec, l);
    }
    return d;
}

struct CycleSample {
    std::uint64_t basis_index = 0;
    double work = 0.0;
};

struct CycleSampling {
    std::size_t n_samples = 0;
    double mean_work = 0.0;
    double std_work = 0.0;
    double std_error_mean = 0.0;  // s / sqrt(n)
    double std_error_std = 0.0;   // sqrt((m4 - s^4) / (4 s^2 n)), zero when s = 0
    std::vector<CycleSample> records;
};

struct SamplingOptions {
    unsigned jobs = 1;
    bool keep_records = true;
};

/// Monte Carlo realization of measurement outcomes. Sample i draws its outcome
/// from a generator keyed by (seed, i), so results do not depend on `jobs`.
inline CycleSampling sample_cycles(const OutcomeDistribution& dist, std::size_t n_samples, std::uint64_t seed,
                                   SamplingOptions options = {}) {
    if (n_samples == 0) {
        throw InvalidSpec("n_samples must be at least 1");
    }
    std::vector<double> cdf(dist.probabilities.size());
    std::partial_sum(dist.probabilities.begin(), dist.probabilities.end(), cdf.begin());
    const double total = cdf.back();
    const double shift = dist.mean_work();

    constexpr std::size_t kChunk = 1 << 15;
    const std::size_t n_chunks = (n_samples + kChunk - 1) / kChunk;
    struct Moments {
        double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    };
    std::vector<Moments> partial(n_chunks);
    CycleSampling out;
    out.n_samples = n_samples;
    if (options.keep_records) {
        out.records.resize(n_samples);
    }

    parallel_for(n_chunks, options.jobs, [&](std::size_t c) {
        Moments m;
        const std::size_t end = std::min(n_samples, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            KeyedRng rng(seed, i);
            const double u = rng.uniform() * total;
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            if (it == cdf.end()) {
                --it;
            }
            const auto l = static_cast<std::size_t>(it - cdf.begin());
            const double w = dist.work_values[l];
            if (options.keep_records) {
                out.records[i] = CycleSample{l, w};
            }
            const double d = w - shift;
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
    const double n = static_cast<double>(n_samples);
    const double mu = m.s1 / n;  // mean offset from `shift`
    const double var = std::max(0.0, m.s2 / n - mu * mu);
    const double m4 = m.s4 / n - 4.0 * mu * m.s3 / n + 6.0 * mu * mu * m.s2 / n - 3.0 * mu * mu * mu * mu;
    out.mean_work = shift + mu;
    out.std_work = std::sqrt(var * n / std::max(1.0, n - 1.0));
    out.std_error_mean = out.std_work / std::sqrt(n);
    out.std_error_std = var > 0.0 ? std::sqrt(std::max(0.0, m4 - var * var) / (4.0 * var * n)) : 0.0;
    return out;
}

inline CycleSampling sample_cycles(const QubitChainSpec& spec, std::size_t n_samples, std::uint64_t seed,
                                   SamplingOptions options = {}) {
    return sample_cycles(outcome_distribution(spec), n_samples, seed, options);
}

/// Columns: basis_index, excitation_count, probability, work_value.
inline void write_distribution_csv(std::ostream& os, const OutcomeDistribution& dist) {
    csv::write_row(os, {"basis_index", "excitation_count", "probability", "work_value"});
    for (std::size_t l = 0; l < dist.probabilities.size(); ++l) {
        csv::write_row(os, {std::to_string(l), std::to_string(excitation_count(l)),
                            csv::format_double(dist.probabilities[l]), csv::format_double(dist.work_values[l])});
    }
}

/// One row per drawn cycle, in draw order, with the same columns as the distribution.
inline void write_samples_csv(std::ostream& os, const OutcomeDistribution& dist, const CycleSampling& sampling) {
    csv::write_row(os, {"basis_index", "excitation_count", "probability", "work_value"});
    for (const auto& s : sampling.records) {
        csv::write_row(os, {std::to_string(s.basis_index), std::to_string(excitation_count(s.basis_index)),
                            csv::format_double(dist.probabilities[s.basis_index]), csv::format_double(s.work)});
    }
}

} // namespace qvfe
