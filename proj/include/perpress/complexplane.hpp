#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace perpress {

using cplx = std::complex<double>;

/// Point at infinity on the Riemann sphere, encoded with non-finite components.
inline cplx infinity_point() {
    return {std::numeric_limits<double>::infinity(), 0.0};
}

inline bool is_finite_point(const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline bool is_infinite_point(const cplx& z) { return !is_finite_point(z); }

inline double abs2(const cplx& z) {
    return z.real() * z.real() + z.imag() * z.imag();
}

/// Chordal (spherical) distance: 2|a-b| / sqrt((1+|a|^2)(1+|b|^2)).
/// Continuous across infinity: d(z, inf) = 2/sqrt(1+|z|^2), d(inf, inf) = 0.
/// Range [0, 2].
inline double chordal_dist(cplx a, cplx b) {
    const bool ia = is_infinite_point(a);
    const bool ib = is_infinite_point(b);
    if (ia && ib) return 0.0;
    if (ia) return 2.0 / std::hypot(1.0, std::abs(b));
    if (ib) return 2.0 / std::hypot(1.0, std::abs(a));
    // Guard against overflow in |a-b| and |a|^2 for huge finite inputs by
    // mapping through 1/z, an isometry of the chordal metric.
    constexpr double big = 1e140;
    if (std::abs(a.real()) > big || std::abs(a.imag()) > big ||
        std::abs(b.real()) > big || std::abs(b.imag()) > big) {
        const cplx ra = (a == cplx{0.0, 0.0}) ? infinity_point() : 1.0 / a;
        const cplx rb = (b == cplx{0.0, 0.0}) ? infinity_point() : 1.0 / b;
        return chordal_dist(ra, rb);
    }
    const double num = 2.0 * std::abs(a - b);
    return num / (std::hypot(1.0, std::abs(a)) * std::hypot(1.0, std::abs(b)));
}

enum class Metric { euclidean, chordal };

/// Distance in the requested metric. Euclidean distance of anything to
/// infinity is +inf (callers using euclidean stay among finite points).
inline double point_dist(Metric m, const cplx& a, const cplx& b) {
    if (m == Metric::chordal) return chordal_dist(a, b);
    if (is_infinite_point(a) || is_infinite_point(b))
        return is_infinite_point(a) && is_infinite_point(b)
                   ? 0.0
                   : std::numeric_limits<double>::infinity();
    return std::abs(a - b);
}

}  // namespace perpress
