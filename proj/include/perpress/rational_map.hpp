#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "perpress/complexplane.hpp"

namespace perpress {

/// Orbit left the bounded region (polynomial escape radius or the general
/// magnitude guard) before completing the requested length.
struct EscapeError : std::runtime_error {
    int step;
    explicit EscapeError(int s)
        : std::runtime_error("orbit escaped at step " + std::to_string(s)),
          step(s) {}
};

/// Orbit hit a pole (rational maps iterated without sphere handling).
struct PoleError : std::runtime_error {
    int step;
    explicit PoleError(int s)
        : std::runtime_error("orbit hit a pole at step " + std::to_string(s)),
          step(s) {}
};

/// Finite orbit segment z, f(z), ..., f^(len-1)(z).
struct OrbitSegment {
    std::vector<cplx> points;
    int length() const { return static_cast<int>(points.size()); }
};

/// Derivative along an orbit in polar form: log-magnitude plus accumulated
/// argument. Keeps (f^k)' representable far past double overflow.
struct PolarDerivative {
    double log_abs = 0.0;
    double arg = 0.0;
    /// Collapse to a complex value; magnitudes past overflow come back as
    /// the infinite point, underflow as 0.
    cplx to_complex() const;
};

/// One-dimensional holomorphic map z -> P(z)/Q(z) with complex polynomial
/// coefficients in ascending order. Polynomial maps are the Q = const case
/// and get cheaper eval/derivative paths plus a meaningful escape radius.
class RationalMap {
  public:
    /// Validates: non-degenerate (deg P >= 1 or deg Q >= 1, not both
    /// constant), max(deg P, deg Q) >= 2, and numerator/denominator share
    /// no root within the coprimality tolerance. Throws
    /// std::invalid_argument with a description on failure.
    RationalMap(std::vector<cplx> numerator, std::vector<cplx> denominator);

    static RationalMap polynomial(std::vector<cplx> coeffs);

    int degree() const { return degree_; }
    bool is_polynomial() const { return polynomial_; }

    /// Escape radius max(2, 2 * max|coeff|) for polynomial maps; quiet NaN
    /// for general rational maps (no escape criterion).
    double escape_radius() const { return escape_radius_; }

    std::span<const cplx> numerator() const { return num_; }
    std::span<const cplx> denominator() const { return den_; }

    /// Evaluate f(z). Accepts the infinite point (value determined by the
    /// degree gap). Poles return the infinite point. Indeterminate values
    /// (|P| and |Q| both below scale-aware tolerance) throw
    /// std::domain_error: the map is numerically degenerate there.
    cplx eval(cplx z) const;
    cplx operator()(cplx z) const { return eval(z); }

    /// f'(z) for finite z. Throws std::domain_error within pole tolerance
    /// (derivative of a rational map is unbounded there).
    cplx derivative(cplx z) const;

    /// log|f'(z)|, computed in log space; -inf at critical points. Same
    /// pole restriction as derivative().
    double log_abs_derivative(cplx z) const;

    /// Orbit z, f(z), ..., f^(n-1)(z) (n points, n >= 1). Throws
    /// EscapeError if a polynomial orbit leaves the escape radius (or any
    /// orbit exceeds the magnitude guard), PoleError on pole hits.
    OrbitSegment iterate(cplx z, int n) const;

    /// Non-throwing orbit advance used by hot loops. Writes up to n points
    /// into out (resized); returns the number written before a stop.
    enum class AdvanceStatus { complete, escaped, pole, non_finite };
    AdvanceStatus advance(cplx z, int n, std::vector<cplx>& out) const;

    /// Derivative of f^k along the orbit starting at z, in polar form.
    /// k = 0 gives the identity derivative (log_abs 0, arg 0).
    PolarDerivative orbit_derivative(cplx z, int k) const;

  private:
    std::vector<cplx> num_, den_;
    std::vector<cplx> dnum_, dden_;
    int degree_ = 0;
    bool polynomial_ = false;
    double escape_radius_ = 0.0;
    double magnitude_guard_ = 1e100;
    double pole_rel_tol_ = 1e-12;

    cplx eval_at_infinity() const;
};

/// Chordal distance on the sphere (alias at map level so callers of the
/// map module need not reach into the metric header).
inline double spherical_dist(const cplx& a, const cplx& b) {
    return chordal_dist(a, b);
}

}  // namespace perpress
