#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "orlicz/common.hpp"

namespace orlicz {

// Quadrature on log-spaced abscissae. All integrands in this project live on
// (0, inf) and are smooth away from the endpoints, so the composite trapezoid
// rule in the variable u = log t, paired with a Richardson check at doubled
// density, is accurate and cheap.

inline constexpr int kQuadPointsPerDecade = 256;

namespace detail {

// Trapezoid of f(t) dt over [a, b] with `m` log-spaced subintervals.
inline double trapezoid_log(const std::function<double(double)>& f, double a, double b, int m) {
    // integrand in u = log t: f(e^u) e^u
    const double ua = std::log(a), ub = std::log(b);
    const double h = (ub - ua) / m;
    double acc = 0.5 * (f(a) * a + f(b) * b);
    for (int i = 1; i < m; ++i) {
        const double t = std::exp(ua + h * i);
        acc += f(t) * t;
    }
    return acc * h;
}

}  // namespace detail

// Integral of f over [a, b], 0 < a < b, log-spaced trapezoid with one
// Richardson extrapolation step.
inline double integrate_log(const std::function<double(double)>& f, double a, double b,
                            int per_decade = kQuadPointsPerDecade) {
    if (!(a > 0) || !(b > a)) {
        if (a == b) return 0.0;
        throw DomainError("integrate_log: need 0 < a <= b");
    }
    const double decades = std::log10(b / a);
    const int m = std::max(4, static_cast<int>(std::ceil(decades * per_decade)));
    const double t1 = detail::trapezoid_log(f, a, b, m);
    const double t2 = detail::trapezoid_log(f, a, b, 2 * m);
    return (4.0 * t2 - t1) / 3.0;
}

// Result of an improper integral with convergence bookkeeping.
struct TailIntegral {
    double value = 0.0;     // inf when divergent
    bool divergent = false;
    double last_ratio = 0;  // ratio of the last two segment contributions
    double evidence_hi = 0; // where the sweep stopped
};

// Integral of f over (0, r]. Splits [.] into decades going down from r and
// applies a geometric-tail test: decaying decade contributions are
// extrapolated, flat or growing ones flag divergence (this is how a log
// divergence at 0 is distinguished from slow convergence).
inline TailIntegral integrate_down_to_zero(const std::function<double(double)>& f, double r,
                                           int per_decade = kQuadPointsPerDecade,
                                           int max_decades = 60) {
    TailIntegral out;
    double total = 0.0;
    std::vector<double> seg;
    double hi = r;
    for (int k = 0; k < max_decades; ++k) {
        const double lo = hi / 10.0;
        const double s = integrate_log(f, lo, hi, per_decade);
        seg.push_back(s);
        total += s;
        hi = lo;
        if (total > 0 && s < 1e-14 * total && seg.size() >= 3) {
            out.value = total;
            out.evidence_hi = lo;
            return out;
        }
        if (seg.size() >= 3) {
            const double q1 = seg[seg.size() - 1] / seg[seg.size() - 2];
            const double q2 = seg[seg.size() - 2] / seg[seg.size() - 3];
            out.last_ratio = q1;
            if (q1 >= 0.999 || q1 > 1.0) {
                out.divergent = true;
                out.value = kInf;
                out.evidence_hi = lo;
                return out;
            }
            // Stable geometric decay: extrapolate the remaining tail.
            if (std::abs(q1 - q2) < 1e-3 * std::max(q1, 1e-30) && q1 < 0.999) {
                out.value = total + seg.back() * q1 / (1.0 - q1);
                out.evidence_hi = lo;
                return out;
            }
        }
    }
    out.value = total;
    out.evidence_hi = hi;
    return out;
}

// Integral of f over [r, inf). The upper end is doubled until the increment
// drops below 1e-8 of the running total; flat or growing increments flag
// divergence.
inline TailIntegral integrate_to_infinity(const std::function<double(double)>& f, double r,
                                          int per_decade = kQuadPointsPerDecade,
                                          int max_doublings = 220) {
    TailIntegral out;
    double total = 0.0;
    std::vector<double> seg;
    double lo = r;
    for (int k = 0; k < max_doublings; ++k) {
        const double hi = lo * 2.0;
        const double s = integrate_log(f, lo, hi, per_decade);
        seg.push_back(s);
        total += s;
        lo = hi;
        out.evidence_hi = hi;
        if (s <= 1e-8 * std::max(total, 1e-300) && seg.size() >= 3) {
            out.value = total;
            return out;
        }
        if (seg.size() >= 4) {
            const double q1 = seg[seg.size() - 1] / std::max(seg[seg.size() - 2], 1e-300);
            const double q2 = seg[seg.size() - 2] / std::max(seg[seg.size() - 3], 1e-300);
            out.last_ratio = q1;
            if (q1 >= 0.9995 && q2 >= 0.9995) {
                out.divergent = true;
                out.value = kInf;
                return out;
            }
        }
    }
    // Ran out of budget without the increment dying: treat as divergent.
    out.divergent = true;
    out.value = kInf;
    return out;
}

}  // namespace orlicz
