#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace orlicz {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_inf(double x) { return std::isinf(x) && x > 0; }

// Product with the measure-theoretic convention 0 * inf = 0.
inline double mul0inf(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DomainError : public Error {
  public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

// Thrown by lemma checkers when the conditions a lemma assumes were not
// certified first.
class HypothesisError : public Error {
  public:
    explicit HypothesisError(const std::string& what) : Error(what) {}
};

// A positive scalar function on (0, inf) together with the text it was
// built from, so reports can echo the definition.
struct ScalarFn {
    std::function<double(double)> fn;
    std::string text;

    double operator()(double t) const { return fn(t); }
};

// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
    switch (n) {
        case 1: return 2.0;
        case 2: return M_PI;
        case 3: return 4.0 * M_PI / 3.0;
        default: throw DomainError("unit_ball_volume: dimension must be 1, 2 or 3");
    }
}

// Surface measure of the unit sphere S^{n-1}.
inline double sphere_surface(int n) {
    return n * unit_ball_volume(n);
}

inline double ball_volume(int n, double r) {
    return unit_ball_volume(n) * std::pow(r, n);
}

// Log-spaced grid over [lo, hi] with `per_decade` points per decade.
// Endpoints are always included.
inline std::vector<double> log_grid(double lo, double hi, int per_decade) {
    if (!(lo > 0) || !(hi > lo)) throw DomainError("log_grid: need 0 < lo < hi");
    if (per_decade < 1) throw DomainError("log_grid: per_decade must be >= 1");
    const double l0 = std::log10(lo), l1 = std::log10(hi);
    const int steps = std::max(1, static_cast<int>(std::ceil((l1 - l0) * per_decade)));
    std::vector<double> g(steps + 1);
    for (int i = 0; i <= steps; ++i)
        g[i] = std::pow(10.0, l0 + (l1 - l0) * i / steps);
    g.front() = lo;
    g.back() = hi;
    return g;
}

// Least-squares slope of log(y) against log(x) over the points with x in
// [x_lo, x_hi]. Non-positive y values are skipped. Used by the trend tests:
// a bounded ratio has slope ~ 0, a power-law divergence shows its exponent.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                           double x_lo, double x_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] < x_lo || x[i] > x_hi) continue;
        if (!(y[i] > 0) || !std::isfinite(y[i])) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++m;
    }
    if (m < 2) return 0.0;
    const double denom = m * sxx - sx * sx;
    if (denom == 0) return 0.0;
    return (m * sxy - sx * sy) / denom;
}

enum class Trend { flat, growing, decaying };

inline const char* to_string(Trend t) {
    switch (t) {
        case Trend::flat: return "flat";
        case Trend::growing: return "growing";
        default: return "decaying";
    }
}

// Classify the end behaviour of a ratio curve from its outermost decade.
// |slope| < 0.05 counts as flat.
inline Trend classify_trend(const std::vector<double>& r, const std::vector<double>& ratio,
                            bool upper_end, double flat_band = 0.05) {
    if (r.empty()) return Trend::flat;
    double x_lo, x_hi;
    if (upper_end) {
        x_hi = r.back();
        x_lo = x_hi / 10.0;
    } else {
        x_lo = r.front();
        x_hi = x_lo * 10.0;
    }
    double s = loglog_slope(r, ratio, x_lo, x_hi);
    // At the lower end a curve that rises toward r -> 0 has negative slope
    // in log-log; flip the sign so "growing" always means growing outward.
    if (!upper_end) s = -s;
    if (s > flat_band) return Trend::growing;
    if (s < -flat_band) return Trend::decaying;
    return Trend::flat;
}

}  // namespace orlicz
