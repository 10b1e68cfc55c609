#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "perpress/pressure.hpp"

namespace perpress {

struct BowenOptions {
    double tol = 1e-3;  ///< final bracket width
    int max_bisections = 200;
    /// When set, also solve the same equation with the separated-set
    /// estimate on this sample at cross_check_epsilon and record the root.
    const JuliaSample* cross_check_sample = nullptr;
    double cross_check_epsilon = 0.0;
};

struct BowenResult {
    double t_star = 0.0;
    double t_lo = 0.0, t_hi = 0.0;  ///< final bracket
    double residual = 0.0;          ///< |pressure value at t_star|
    int n_used = 0;
    bool incomplete_basis = false;  ///< no complete enumeration in range
    std::optional<double> cross_check_root;
    std::vector<std::pair<double, double>> evaluations;  ///< (t, value)
};

/// Solve pressure(-t log|f'|) = 0 by bisection on the level-n periodic
/// point value at the largest n in [n_min, n_max] whose enumeration is
/// complete (largest n outright, flagged, if none is). The level value is
/// strictly decreasing in t on filtered sets, which is also enforced: a
/// non-monotone pair of evaluations or an empty-filter fallback aborts
/// with std::runtime_error. An invalid bracket (no sign change) throws
/// std::invalid_argument.
BowenResult bowen_root(PeriodicTable& table, const FilterParams& params,
                       int n_min, int n_max, double t_lo, double t_hi,
                       const BowenOptions& opts = {});

}  // namespace perpress
