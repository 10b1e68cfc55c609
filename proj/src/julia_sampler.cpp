#include "perpress/julia_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "perpress/polynomial.hpp"

namespace perpress {

EscapeResult escape_classify(const RationalMap& map, cplx z, int max_iter) {
    if (!map.is_polynomial())
        throw std::invalid_argument(
            "escape classification needs a polynomial map");
    if (max_iter < 0) throw std::invalid_argument("max_iter must be >= 0");
    const double radius = map.escape_radius();
    for (int k = 0; k < max_iter; ++k) {
        if (!is_finite_point(z) || std::abs(z) > radius)
            return {true, k};
        z = map.eval(z);
    }
    if (!is_finite_point(z) || std::abs(z) > radius)
        return {true, max_iter};
    return {false, max_iter};
}

namespace {

/// Fixed points: roots of P(z) - z Q(z). Returns the repelling one with
/// the largest |f'|, preferring the lexicographically first on ties.
cplx repelling_fixed_point(const RationalMap& map) {
    std::vector<cplx> fp(map.numerator().begin(), map.numerator().end());
    const auto den = map.denominator();
    if (fp.size() < den.size() + 1) fp.resize(den.size() + 1);
    for (std::size_t k = 0; k < den.size(); ++k) fp[k + 1] -= den[k];
    auto solve = find_roots(std::move(fp));
    if (!solve.converged)
        throw std::runtime_error("fixed point solve did not converge");
    std::sort(solve.roots.begin(), solve.roots.end(),
              [](const cplx& a, const cplx& b) {
                  return a.real() != b.real() ? a.real() < b.real()
                                              : a.imag() < b.imag();
              });
    double best = 1.0 + 1e-9;
    const cplx* pick = nullptr;
    for (const cplx& z : solve.roots) {
        double m;
        try {
            m = std::abs(map.derivative(z));
        } catch (const std::domain_error&) {
            continue;
        }
        if (m > best) {
            best = m;
            pick = &z;
        }
    }
    if (!pick)
        throw std::runtime_error(
            "no repelling fixed point found; map unsupported by "
            "inverse-iteration sampling");
    return *pick;
}

/// One inverse step: a root of P(w) - z Q(w), branch chosen by rng.
cplx inverse_step(const RationalMap& map, const cplx& z, std::mt19937_64& rng) {
    std::vector<cplx> pre(map.numerator().begin(), map.numerator().end());
    const auto den = map.denominator();
    if (pre.size() < den.size()) pre.resize(den.size());
    for (std::size_t k = 0; k < den.size(); ++k) pre[k] -= z * den[k];
    auto solve = find_roots(std::move(pre));
    if (solve.roots.empty() || !solve.converged)
        throw std::runtime_error("inverse branch solve failed");
    std::sort(solve.roots.begin(), solve.roots.end(),
              [](const cplx& a, const cplx& b) {
                  return a.real() != b.real() ? a.real() < b.real()
                                              : a.imag() < b.imag();
              });
    return solve.roots[rng() % solve.roots.size()];
}

}  // namespace

JuliaSample inverse_iteration_sample(const RationalMap& map, int count,
                                     int depth, std::uint64_t seed) {
    if (count < 1)
        throw std::invalid_argument("sample count must be positive");
    if (depth < 2) throw std::invalid_argument("sample depth must be >= 2");

    const cplx start = repelling_fixed_point(map);
    const int burn = depth / 2;
    const int keep = depth - burn;

    JuliaSample out;
    out.generator = SampleGenerator::inverse_iteration;
    out.seed = seed;
    out.count = count;
    out.depth = depth;
    out.points.reserve(static_cast<std::size_t>(count));

    std::uint64_t chain = 0;
    while (static_cast<int>(out.points.size()) < count) {
        std::mt19937_64 rng(seed + chain);
        cplx z = start;
        for (int k = 0; k < burn; ++k) z = inverse_step(map, z, rng);
        for (int k = 0;
             k < keep && static_cast<int>(out.points.size()) < count; ++k) {
            z = inverse_step(map, z, rng);
            out.points.push_back(z);
        }
        ++chain;
    }
    return out;
}

double min_potential(const JuliaSample& sample, const RationalMap& map,
                     const Potential& phi) {
    if (sample.points.empty())
        throw std::invalid_argument("min over an empty sample");
    double m = std::numeric_limits<double>::infinity();
    for (const cplx& z : sample.points) m = std::min(m, phi.eval(map, z));
    return m;
}

}  // namespace perpress
