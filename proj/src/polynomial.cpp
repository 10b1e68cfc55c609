#include "perpress/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace perpress {

cplx poly_eval(std::span<const cplx> coeffs, cplx z) {
    if (coeffs.empty()) return {0.0, 0.0};
    cplx acc = coeffs.back();
    for (std::size_t i = coeffs.size() - 1; i-- > 0;) acc = acc * z + coeffs[i];
    return acc;
}

ScaledEval poly_eval_scaled(std::span<const cplx> coeffs, cplx z) {
    if (coeffs.empty()) return {{0.0, 0.0}, 0.0};
    const double az = std::abs(z);
    cplx acc = coeffs.back();
    double scale = std::abs(coeffs.back());
    for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
        acc = acc * z + coeffs[i];
        scale = scale * az + std::abs(coeffs[i]);
    }
    return {acc, scale};
}

std::vector<cplx> poly_derivative(std::span<const cplx> coeffs) {
    if (coeffs.size() <= 1) return {};
    std::vector<cplx> d(coeffs.size() - 1);
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        d[k - 1] = static_cast<double>(k) * coeffs[k];
    return d;
}

int poly_degree(std::span<const cplx> coeffs, double rel_tol) {
    double cmax = 0.0;
    for (const cplx& c : coeffs) cmax = std::max(cmax, std::abs(c));
    if (cmax == 0.0) return -1;
    for (std::size_t i = coeffs.size(); i-- > 0;)
        if (std::abs(coeffs[i]) > rel_tol * cmax) return static_cast<int>(i);
    return -1;
}

namespace {

// One Newton step, guarded against vanishing derivative.
cplx newton_polish(std::span<const cplx> p, std::span<const cplx> dp, cplx w,
                   int steps) {
    for (int s = 0; s < steps; ++s) {
        const cplx pv = poly_eval(p, w);
        const cplx dv = poly_eval(dp, w);
        if (std::abs(dv) == 0.0) break;
        const cplx step = pv / dv;
        if (!is_finite_point(step)) break;
        w -= step;
    }
    return w;
}

}  // namespace

RootSolve find_roots(std::vector<cplx> coeffs, double tol) {
    RootSolve out;
    const int deg = poly_degree(coeffs);
    if (deg <= 0) {
        out.converged = true;
        return out;
    }
    coeffs.resize(static_cast<std::size_t>(deg) + 1);

    // Normalize to monic for stable correction terms.
    const cplx lead = coeffs.back();
    for (cplx& c : coeffs) c /= lead;

    if (deg == 1) {
        out.roots = {-coeffs[0]};
        out.converged = true;
        return out;
    }
    if (deg == 2) {
        // Stable quadratic formula.
        const cplx b = coeffs[1], c = coeffs[0];
        const cplx disc = std::sqrt(b * b - 4.0 * c);
        const cplx q = (std::real(std::conj(b) * disc) >= 0.0)
                           ? -0.5 * (b + disc)
                           : -0.5 * (b - disc);
        if (std::abs(q) == 0.0) {
            out.roots = {cplx{0.0, 0.0}, -b};
        } else {
            out.roots = {q, c / q};
        }
        out.converged = true;
        return out;
    }

    const auto dcoeffs = poly_derivative(coeffs);

    // Cauchy bound on root modulus, shrunk slightly; asymmetric angular
    // offset breaks symmetric stalls.
    double r = 0.0;
    for (int k = 0; k < deg; ++k) r = std::max(r, std::abs(coeffs[k]));
    r = 0.9 * (1.0 + r);
    std::vector<cplx> w(static_cast<std::size_t>(deg));
    for (int k = 0; k < deg; ++k) {
        const double th =
            2.0 * M_PI * (static_cast<double>(k) + 0.35) / deg + 0.4;
        w[static_cast<std::size_t>(k)] = r * cplx{std::cos(th), std::sin(th)};
    }

    const int max_iter = 200;
    bool done = false;
    int it = 0;
    for (; it < max_iter && !done; ++it) {
        done = true;
        for (int i = 0; i < deg; ++i) {
            auto& wi = w[static_cast<std::size_t>(i)];
            const auto [pv, scale] = poly_eval_scaled(coeffs, wi);
            if (std::abs(pv) <= tol * std::max(scale, 1e-300)) continue;
            const cplx dv = poly_eval(dcoeffs, wi);
            cplx ratio;
            if (std::abs(dv) > 0.0 && std::abs(pv / dv) < 1e100) {
                ratio = pv / dv;
            } else {
                // Derivative collapsed; nudge off the bad spot.
                wi += 1e-6 * (std::abs(wi) + 1.0) * cplx{1.0, 1.0};
                done = false;
                continue;
            }
            cplx sum{0.0, 0.0};
            for (int j = 0; j < deg; ++j) {
                if (j == i) continue;
                const cplx diff = wi - w[static_cast<std::size_t>(j)];
                if (std::abs(diff) == 0.0) {
                    sum = cplx{0.0, 0.0};
                    break;
                }
                sum += 1.0 / diff;
            }
            const cplx denom = 1.0 - ratio * sum;
            const cplx corr =
                (std::abs(denom) > 1e-300) ? ratio / denom : ratio;
            wi -= corr;
            done = false;
        }
    }

    for (auto& wi : w) wi = newton_polish(coeffs, dcoeffs, wi, 4);

    bool all_ok = true;
    for (const auto& wi : w) {
        const auto [pv, scale] = poly_eval_scaled(coeffs, wi);
        if (!(std::abs(pv) <= 1e-10 * std::max(scale, 1e-300))) all_ok = false;
    }
    out.roots = std::move(w);
    out.converged = all_ok;
    out.iterations = it;
    return out;
}

}  // namespace perpress
