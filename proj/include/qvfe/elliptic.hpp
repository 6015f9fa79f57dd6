#pragma once

// Complete elliptic integrals in the parameter convention
//
//   K(m) = int_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta)
//   E(m) = int_0^{pi/2} sqrt(1 - m sin^2 theta) dtheta,   m < 1.
//
// Evaluated by the arithmetic-geometric mean. Negative parameters are mapped
// onto [0, 1) first, K(m) = K(m/(m-1)) / sqrt(1-m), E(m) = sqrt(1-m) E(m/(m-1)),
// which avoids the cancellation the plain AGM sum suffers for large |m|.

#include <cmath>
#include <limits>
#include <numbers>

#include "qvfe/errors.hpp"

namespace qvfe::elliptic {

inline constexpr double kAgmTolerance = 1e-13;

struct KE {
    double k = 0.0;
    double e = 0.0;
};

/// K and E together for 0 <= m < 1.
inline KE complete_nonnegative(double m) {
    if (!(m >= 0.0) || !(m < 1.0)) {
        throw DomainError("elliptic parameter must lie in [0, 1)");
    }
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    double c2 = m;      // c_n^2
    double weight = 0.5;  // 2^(n-1)
    double sum = weight * c2;
    for (int i = 0; i < 64; ++i) {
        if (std::abs(a - b) <= kAgmTolerance * a) {
            break;
        }
        const double an = 0.5 * (a + b);
        const double cn = 0.5 * (a - b);
        b = std::sqrt(a * b);
        a = an;
        c2 = cn * cn;
        weight *= 2.0;
        sum += weight * c2;
    }
    const double k = std::numbers::pi / (2.0 * a);
    return {k, k * (1.0 - sum)};
}

/// K and E for any m < 1.
inline KE complete(double m) {
    if (!(m < 1.0)) {
        throw DomainError("elliptic parameter must be below 1");
    }
    if (m >= 0.0) {
        return complete_nonnegative(m);
    }
    const double s = std::sqrt(1.0 - m);
    const KE t = complete_nonnegative(-m / (1.0 - m));
    return {t.k / s, t.e * s};
}

inline double complete_k(double m) { return complete(m).k; }
inline double complete_e(double m) { return complete(m).e; }

} // namespace qvfe::elliptic
