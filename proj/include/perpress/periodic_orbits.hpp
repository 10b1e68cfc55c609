#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "perpress/julia_sampler.hpp"
#include "perpress/rational_map.hpp"

namespace perpress {

/// Expansion filter parameters: alpha is the exponential rate floor, c the
/// multiplicative slack. Validated: alpha > 0, 0 < c <= 1 (the finite
/// reduction of the filter is exact only for c <= 1).
struct FilterParams {
    double alpha;
    double c;
    FilterParams(double alpha_, double c_);
};

/// One solution of f^n(z) = z with its dynamical data.
struct PeriodicPoint {
    cplx z;
    int n = 0;                 ///< the period it was enumerated at
    int primitive_period = 0;  ///< smallest m | n with f^m(z) = z
    cplx multiplier;           ///< (f^n)'(z); infinite point on overflow
    double log_abs_multiplier = 0.0;
    double arg_multiplier = 0.0;
    double residual = 0.0;  ///< |f^n(z) - z| at the accepted point
};

struct EnumerationReport {
    long found = 0;
    long expected = 0;
    bool complete = false;
    long unresolved_multiplicity = 0;
};

/// Knobs for the Newton search. Defaults reproduce complete enumerations
/// for quadratic/cubic polynomials through the supported period range.
struct SearchBudget {
    int max_newton_iters = 200;
    int max_step_halvings = 30;
    double convergence_rtol = 1e-10;  ///< accept when |g| <= rtol*(1+|z|)
    double polish_rtol = 1e-13;       ///< post-dedup polish target
    double dedup_tol = 1e-8;          ///< chordal identification radius
    int refinement_rounds = 6;
    std::uint64_t refinement_seed = 0x9e3779b97f4a7c15ull;
    long max_expected = 1l << 20;  ///< refuse larger root counts up front
    int threads = 1;
};

struct PeriodicSet {
    std::vector<PeriodicPoint> points;  ///< sorted by (re, im)
    int n = 0;
    EnumerationReport report;
};

/// Enumerate solutions of f^n(z) = z by damped Newton iteration on
/// f^n(z) - z, seeded from the Julia sample, a ring outside it, and the
/// periodic points of all proper divisors of n; found orbits are closed
/// under the map and the search refines around known roots until the
/// expected count (degree^n for polynomials, +1 on the sphere otherwise)
/// is reached or the budget is exhausted. Incomplete enumerations are
/// reported, never silent.
PeriodicSet find_periodic(const RationalMap& map, int n,
                          const JuliaSample& sample,
                          const SearchBudget& budget = {});

/// |multiplier| > 1 + margin. Points within margin of the unit circle are
/// the indifferent-ambiguous band: not classified repelling.
bool classify_repelling(const PeriodicPoint& p, double margin = 1e-6);

/// Subset of points passing the expansion filter at (alpha, c): the
/// multiplier satisfies |(f^n)'| >= e^(n alpha) and every partial orbit
/// product of length r < n started anywhere on the orbit satisfies
/// |(f^r)'(f^i z)| >= c e^(r alpha). All points must share the period n.
/// Works in log space throughout.
std::vector<PeriodicPoint> filter_per_alpha_c(
    const std::vector<PeriodicPoint>& points, const RationalMap& map,
    const FilterParams& params);

/// Direct check of the defining inequalities for k = 1..k_max at every
/// orbit offset, using cyclic accumulation of log|f'| along the stored
/// orbit. Independent of the reduction in filter_per_alpha_c; used to
/// cross-validate it.
bool brute_force_membership(const PeriodicPoint& p, const RationalMap& map,
                            const FilterParams& params, int k_max);

}  // namespace perpress
