#pragma once

// Open chains with site frequencies omega_j and bond couplings g_j in the two
// perturbative regimes.
//
// Weak coupling: the ground state is |0...0> plus first-order admixtures of
// |1_j 1_{j+1}> with amplitude -g_j / (2 (omega_j + omega_{j+1})).
// Deep-strong coupling: the ground state is the positive-parity combination of
// the two antialigned sigma^x configurations, which is equiprobable over all
// computational states with an even number of excitations.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "qvfe/engine_metrics.hpp"
#include "qvfe/errors.hpp"
#include "qvfe/qubit_exact.hpp"

namespace qvfe {

struct OpenChainSpec {
    std::vector<double> omegas;
    std::vector<double> couplings;  // N - 1 entries

    static OpenChainSpec uniform(int n, double omega, double g) {
        if (n < 2) {
            throw InvalidSpec("open chain needs at least two sites");
        }
        return {std::vector<double>(static_cast<std::size_t>(n), omega),
                std::vector<double>(static_cast<std::size_t>(n - 1), g)};
    }

    int size() const noexcept { return static_cast<int>(omegas.size()); }

    void validate() const { as_chain().validate(); }

    QubitChainSpec as_chain() const { return QubitChainSpec{omegas, couplings, Boundary::open}; }
};

inline constexpr double kWeakCouplingWarnRatio = 0.2;
inline constexpr double kStrongCouplingWarnRatio = 5.0;

struct WeakCouplingResult {
    EngineMetrics metrics;
    std::vector<double> pair_probabilities;  // P(1_j 1_{j+1}), one per bond
    double p_local_ground = 1.0;             // P(0...0)
    bool regime_warning = false;
    std::string warning;
};

inline WeakCouplingResult weak_coupling_metrics(const OpenChainSpec& spec) {
    spec.validate();
    WeakCouplingResult out;
    double work = 0.0;
    double second = 0.0;
    double max_ratio = 0.0;
    for (std::size_t j = 0; j < spec.couplings.size(); ++j) {
        const double pair = spec.omegas[j] + spec.omegas[j + 1];
        const double ratio = spec.couplings[j] / pair;
        max_ratio = std::max(max_ratio, std::abs(ratio));
        const double p = 0.25 * ratio * ratio;
        out.pair_probabilities.push_back(p);
        work += p * pair;
        second += p * pair * pair;
    }
    out.p_local_ground = 1.0 - std::accumulate(out.pair_probabilities.begin(), out.pair_probabilities.end(), 0.0);
    if (max_ratio > kWeakCouplingWarnRatio) {
        out.regime_warning = true;
        std::ostringstream os;
        os << "max g_j/(omega_j+omega_j+1) = " << max_ratio << " exceeds " << kWeakCouplingWarnRatio
           << "; weak-coupling expansion may be inaccurate";
        out.warning = os.str();
    }
    // To this order Delta equals W.
    const double variance = std::max(0.0, second - work * work);
    out.metrics = EngineMetrics::from_work_gap(work, work, std::sqrt(variance));
    return out;
}

struct StrongCouplingResult {
    EngineMetrics metrics;
    bool regime_warning = false;
    std::string warning;
};

inline StrongCouplingResult strong_coupling_metrics(const OpenChainSpec& spec) {
    spec.validate();
    const double sum_w = std::accumulate(spec.omegas.begin(), spec.omegas.end(), 0.0);
    const double sum_g = std::accumulate(spec.couplings.begin(), spec.couplings.end(), 0.0);
    const double sum_w2 = std::inner_product(spec.omegas.begin(), spec.omegas.end(), spec.omegas.begin(), 0.0);

    // Over the even-parity states any N-1 bits are independent and uniform, so
    // the site occupations are pairwise uncorrelated for N >= 3. At N = 2 the
    // two bits are locked together.
    const double sigma = spec.size() == 2 ? 0.5 * sum_w : 0.5 * std::sqrt(sum_w2);

    StrongCouplingResult out;
    out.metrics = EngineMetrics::from_work_gap(0.5 * sum_w, 0.5 * sum_g, sigma);
    const double min_g = *std::min_element(spec.couplings.begin(), spec.couplings.end());
    const double max_w = *std::max_element(spec.omegas.begin(), spec.omegas.end());
    if (min_g < kStrongCouplingWarnRatio * max_w) {
        out.regime_warning = true;
        std::ostringstream os;
        os << "min g_j/max omega_j = " << min_g / max_w << " is below " << kStrongCouplingWarnRatio
           << "; deep-strong expansion may be inaccurate";
        out.warning = os.str();
    }
    return out;
}

} // namespace qvfe
