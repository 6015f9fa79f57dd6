#pragma once

// Engine-agnostic figures of merit.
//
// Every engine in this library is described by four ground-state energies:
// <H_loc> and <H_loc^2> in the interacting ground state, the local ground
// energy E_0loc and the interacting ground energy E_gs. From these,
//
//   W     = <H_loc> - E_0loc           (average work output)
//   Delta = E_0loc - E_gs              (local entanglement gap)
//   Q     = W + Delta                  (quantum heat)
//   eta   = W / Q                      (efficiency, undefined at Q = 0)
//   sigma = sqrt(<H_loc^2> - <H_loc>^2)

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "qvfe/errors.hpp"

namespace qvfe {

struct GroundStateEnergies {
    double e_loc_expect = 0.0;   ///< <H_loc> in the interacting ground state
    double e_loc2_expect = 0.0;  ///< <H_loc^2> in the interacting ground state
    double e0_loc = 0.0;         ///< lowest eigenvalue of H_loc
    double e_gs = 0.0;           ///< lowest eigenvalue of H_loc + H_int
};

/// Relative tolerance used to absorb eigensolver round-off in bound checks.
inline constexpr double kEnergyRoundoff = 1e-12;

class EngineMetrics {
public:
    EngineMetrics() = default;

    /// The single construction path: heat is always formed as work + gap.
    static EngineMetrics from_work_gap(double work, double gap, double std_dev) {
        EngineMetrics m;
        m.work_ = work;
        m.gap_ = gap;
        m.heat_ = work + gap;
        m.std_dev_ = std_dev;
        if (m.heat_ > 0.0) {
            m.efficiency_ = m.work_ / m.heat_;
        }
        return m;
    }

    double work() const noexcept { return work_; }
    double heat() const noexcept { return heat_; }
    double gap() const noexcept { return gap_; }
    double std_dev() const noexcept { return std_dev_; }

    /// Empty when the quantum heat vanishes (uncoupled limit).
    std::optional<double> efficiency() const noexcept { return efficiency_; }
    bool efficiency_defined() const noexcept { return efficiency_.has_value(); }

    /// Raised only for hand-supplied energies with E_0loc < E_gs; kept representable.
    bool efficiency_exceeds_unity() const noexcept {
        return efficiency_.has_value() && *efficiency_ > 1.0;
    }

    /// Efficiency or a caller-supplied stand-in (handy for printing and sorting).
    double efficiency_or(double fallback) const noexcept { return efficiency_.value_or(fallback); }

private:
    double work_ = 0.0;
    double heat_ = 0.0;
    double gap_ = 0.0;
    double std_dev_ = 0.0;
    std::optional<double> efficiency_;
};

namespace detail {

// Values in [-tol, 0) are round-off and clamp to zero; anything lower is rejected.
inline double clamp_roundoff(double value, double scale, const char* what) {
    const double tol = kEnergyRoundoff * std::max(1.0, scale);
    if (value >= 0.0) {
        return value;
    }
    if (value >= -tol) {
        return 0.0;
    }
    std::ostringstream os;
    os << what << " is negative beyond round-off tolerance: " << value;
    throw InvalidEnergies(os.str());
}

} // namespace detail

inline EngineMetrics metrics_from_energies(const GroundStateEnergies& e) {
    if (!std::isfinite(e.e_loc_expect) || !std::isfinite(e.e_loc2_expect) ||
        !std::isfinite(e.e0_loc) || !std::isfinite(e.e_gs)) {
        throw InvalidEnergies("ground-state energies must be finite");
    }
    const double variance =
        detail::clamp_roundoff(e.e_loc2_expect - e.e_loc_expect * e.e_loc_expect,
                               e.e_loc_expect * e.e_loc_expect, "<H_loc^2> - <H_loc>^2");
    const double work = detail::clamp_roundoff(e.e_loc_expect - e.e0_loc,
                                               std::max(std::abs(e.e_loc_expect), std::abs(e.e0_loc)),
                                               "<H_loc> - E_0loc");
    const double gap = e.e0_loc - e.e_gs;
    return EngineMetrics::from_work_gap(work, gap, std::sqrt(variance));
}

} // namespace qvfe
