#include "perpress/bowen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace perpress {

namespace {

/// Level value (1/n) log Q at the Bowen family member t, guarded against
/// the empty-filter fallback (which would silently flatten the function).
double level_value(PeriodicTable& table, const FilterParams& params, int n,
                   double t) {
    const QpResult q =
        log_partition_sum(table, Potential::log_deriv(t), params, n);
    if (q.fallback)
        throw std::runtime_error(
            "empty filtered set at t = " + std::to_string(t) +
            "; the equation value would be fallback-contaminated");
    return q.log_value / static_cast<double>(n);
}

void check_monotone(std::vector<std::pair<double, double>>& evals) {
    // All evaluations so far must describe a decreasing function of t.
    auto sorted = evals;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].second > sorted[i - 1].second + 1e-9)
            throw std::runtime_error(
                "level pressure value failed to decrease in t between t = " +
                std::to_string(sorted[i - 1].first) + " and t = " +
                std::to_string(sorted[i].first));
}

/// Root of the separated-set analogue. The separated subset depends only
/// on the metric, so extract it once (any potential works; constant 0
/// keeps it cheap), precompute each point's Birkhoff sum of log|f'|, and
/// bisect over reweighted log-sums.
double separated_root(const RationalMap& map, const JuliaSample& sample,
                      int n, double eps, double t_lo, double t_hi,
                      double tol) {
    const SeparatedResult base = separated_pressure(
        map, Potential::constant(0.0), sample, n, eps, Metric::euclidean);
    std::vector<double> bsum;
    bsum.reserve(base.points.size());
    std::vector<cplx> orbit;
    for (const cplx& z : base.points) {
        if (map.advance(z, n, orbit) != RationalMap::AdvanceStatus::complete)
            continue;
        double s = 0.0;
        for (const cplx& w : orbit) s += map.log_abs_derivative(w);
        bsum.push_back(s);
    }
    if (bsum.empty())
        throw std::runtime_error("cross-check separated set is empty");

    std::vector<double> terms(bsum.size());
    auto value = [&](double t) {
        for (std::size_t i = 0; i < bsum.size(); ++i) terms[i] = -t * bsum[i];
        return log_sum_exp(terms) / static_cast<double>(n);
    };
    double lo = t_lo, hi = t_hi;
    if (!(value(lo) > 0.0) || !(value(hi) < 0.0))
        throw std::invalid_argument(
            "cross-check bracket does not straddle the root");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (value(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

BowenResult bowen_root(PeriodicTable& table, const FilterParams& params,
                       int n_min, int n_max, double t_lo, double t_hi,
                       const BowenOptions& opts) {
    if (n_min < 1 || n_max < n_min)
        throw std::invalid_argument("bad level range");
    if (!(t_lo < t_hi)) throw std::invalid_argument("bracket must be ordered");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");

    BowenResult res;
    res.n_used = n_max;
    res.incomplete_basis = true;
    for (int n = n_max; n >= n_min; --n) {
        if (table.at(n).report.complete) {
            res.n_used = n;
            res.incomplete_basis = false;
            break;
        }
    }

    auto value = [&](double t) {
        const double v = level_value(table, params, res.n_used, t);
        res.evaluations.emplace_back(t, v);
        check_monotone(res.evaluations);
        return v;
    };

    double lo = t_lo, hi = t_hi;
    const double v_lo = value(lo);
    const double v_hi = value(hi);
    if (!(v_lo > 0.0) || !(v_hi < 0.0))
        throw std::invalid_argument(
            "invalid bracket: value(" + std::to_string(lo) + ") = " +
            std::to_string(v_lo) + ", value(" + std::to_string(hi) + ") = " +
            std::to_string(v_hi) + " do not straddle zero");

    int steps = 0;
    while (hi - lo > opts.tol && steps < opts.max_bisections) {
        const double mid = 0.5 * (lo + hi);
        const double vm = value(mid);
        if (vm > 0.0)
            lo = mid;
        else
            hi = mid;
        ++steps;
    }
    res.t_lo = lo;
    res.t_hi = hi;
    res.t_star = 0.5 * (lo + hi);
    res.residual = std::abs(value(res.t_star));

    if (opts.cross_check_sample) {
        res.cross_check_root = separated_root(
            table.map(), *opts.cross_check_sample, res.n_used,
            opts.cross_check_epsilon, t_lo, t_hi, opts.tol);
    }
    return res;
}

}  // namespace perpress
