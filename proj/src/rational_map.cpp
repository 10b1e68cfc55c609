#include "perpress/rational_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "perpress/polynomial.hpp"

namespace perpress {

cplx PolarDerivative::to_complex() const {
    if (std::isinf(log_abs) && log_abs > 0.0) return infinity_point();
    const double mag = std::exp(log_abs);
    if (std::isinf(mag)) return infinity_point();
    return mag * cplx{std::cos(arg), std::sin(arg)};
}

RationalMap::RationalMap(std::vector<cplx> numerator,
                         std::vector<cplx> denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
    const int dp = poly_degree(num_);
    const int dq = poly_degree(den_);
    if (dp < 0) throw std::invalid_argument("map numerator is zero");
    if (dq < 0) throw std::invalid_argument("map denominator is zero");
    num_.resize(static_cast<std::size_t>(dp) + 1);
    den_.resize(static_cast<std::size_t>(dq) + 1);
    degree_ = std::max(dp, dq);
    if (degree_ < 2)
        throw std::invalid_argument(
            "map degree must be at least 2 (got degree " +
            std::to_string(degree_) + ")");

    polynomial_ = (dq == 0);
    if (polynomial_) {
        // Normalize the constant denominator away.
        const cplx q0 = den_[0];
        for (cplx& c : num_) c /= q0;
        den_ = {cplx{1.0, 0.0}};
        double cmax = 0.0;
        for (const cplx& c : num_) cmax = std::max(cmax, std::abs(c));
        escape_radius_ = std::max(2.0, 2.0 * cmax);
    } else {
        escape_radius_ = std::numeric_limits<double>::quiet_NaN();
        // Numerical coprimality: no shared root within tolerance.
        const auto rp = find_roots(num_);
        const auto rq = find_roots(den_);
        for (const cplx& a : rp.roots)
            for (const cplx& b : rq.roots)
                if (chordal_dist(a, b) < 1e-8)
                    throw std::invalid_argument(
                        "numerator and denominator share a root near (" +
                        std::to_string(a.real()) + ", " +
                        std::to_string(a.imag()) + ")");
    }
    dnum_ = poly_derivative(num_);
    dden_ = poly_derivative(den_);
}

RationalMap RationalMap::polynomial(std::vector<cplx> coeffs) {
    return RationalMap(std::move(coeffs), {cplx{1.0, 0.0}});
}

cplx RationalMap::eval_at_infinity() const {
    const int dp = static_cast<int>(num_.size()) - 1;
    const int dq = static_cast<int>(den_.size()) - 1;
    if (dp > dq) return infinity_point();
    if (dp < dq) return {0.0, 0.0};
    return num_.back() / den_.back();
}

cplx RationalMap::eval(cplx z) const {
    if (is_infinite_point(z)) return eval_at_infinity();
    if (polynomial_) return poly_eval(num_, z);
    const auto p = poly_eval_scaled(num_, z);
    const auto q = poly_eval_scaled(den_, z);
    const bool p_zero = std::abs(p.value) <= pole_rel_tol_ * p.scale;
    const bool q_zero = std::abs(q.value) <= pole_rel_tol_ * q.scale;
    if (q_zero) {
        if (p_zero)
            throw std::domain_error(
                "indeterminate evaluation: numerator and denominator both"
                " vanish (numerically degenerate map)");
        return infinity_point();
    }
    return p.value / q.value;
}

cplx RationalMap::derivative(cplx z) const {
    if (!is_finite_point(z))
        throw std::domain_error("derivative requested at infinity");
    if (polynomial_) return poly_eval(dnum_, z);
    const auto q = poly_eval_scaled(den_, z);
    if (std::abs(q.value) <= pole_rel_tol_ * q.scale)
        throw std::domain_error("derivative requested at a pole");
    const cplx p = poly_eval(num_, z);
    const cplx dp = poly_eval(dnum_, z);
    const cplx dq = poly_eval(dden_, z);
    return (dp * q.value - p * dq) / (q.value * q.value);
}

double RationalMap::log_abs_derivative(cplx z) const {
    if (polynomial_) {
        const cplx d = poly_eval(dnum_, z);
        return std::log(std::abs(d));
    }
    const auto q = poly_eval_scaled(den_, z);
    if (std::abs(q.value) <= pole_rel_tol_ * q.scale)
        throw std::domain_error("derivative requested at a pole");
    const cplx p = poly_eval(num_, z);
    const cplx dp = poly_eval(dnum_, z);
    const cplx dq = poly_eval(dden_, z);
    return std::log(std::abs(dp * q.value - p * dq)) -
           2.0 * std::log(std::abs(q.value));
}

RationalMap::AdvanceStatus RationalMap::advance(cplx z, int n,
                                                std::vector<cplx>& out) const {
    out.clear();
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        if (!is_finite_point(z)) {
            // Polynomial overflow is escape by continuation; rational maps
            // distinguish pole values (inf) from arithmetic breakdown (nan).
            if (polynomial_) return AdvanceStatus::escaped;
            const bool has_nan = std::isnan(z.real()) || std::isnan(z.imag());
            return has_nan ? AdvanceStatus::non_finite : AdvanceStatus::pole;
        }
        if (std::abs(z) > magnitude_guard_) return AdvanceStatus::escaped;
        out.push_back(z);
        if (k + 1 < n) {
            if (polynomial_) {
                z = poly_eval(num_, z);
            } else {
                const auto q = poly_eval_scaled(den_, z);
                if (std::abs(q.value) <= pole_rel_tol_ * q.scale)
                    return AdvanceStatus::pole;
                z = poly_eval(num_, z) / q.value;
            }
        }
    }
    return AdvanceStatus::complete;
}

OrbitSegment RationalMap::iterate(cplx z, int n) const {
    if (n < 1) throw std::invalid_argument("orbit length must be >= 1");
    OrbitSegment seg;
    seg.points.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        if (!is_finite_point(z)) {
            if (polynomial_) throw EscapeError(k);
            throw PoleError(k);
        }
        if (polynomial_ && std::abs(z) > escape_radius_) throw EscapeError(k);
        if (std::abs(z) > magnitude_guard_) throw EscapeError(k);
        seg.points.push_back(z);
        if (k + 1 < n) z = eval(z);
    }
    return seg;
}

PolarDerivative RationalMap::orbit_derivative(cplx z, int k) const {
    if (k < 0) throw std::invalid_argument("orbit derivative needs k >= 0");
    PolarDerivative d;
    for (int j = 0; j < k; ++j) {
        const double la = log_abs_derivative(z);
        d.log_abs += la;
        if (std::isfinite(la)) {
            const cplx dv = derivative(z);
            d.arg += std::atan2(dv.imag(), dv.real());
        }
        z = eval(z);
        if (is_infinite_point(z) && j + 1 < k)
            throw std::domain_error("orbit reached infinity inside "
                                    "orbit_derivative");
    }
    d.arg = std::remainder(d.arg, 2.0 * M_PI);
    return d;
}

}  // namespace perpress
