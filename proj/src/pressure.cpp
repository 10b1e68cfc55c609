#include "perpress/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace perpress {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Kahan-compensated accumulator.
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

}  // namespace

double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (const double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;  // empty, all -inf, or an inf/nan
    KahanSum acc;
    for (const double x : xs) acc.add(std::exp(x - m));
    return m + std::log(acc.s);
}

PeriodicTable::PeriodicTable(RationalMap map, JuliaSample sample,
                             SearchBudget budget)
    : map_(std::move(map)),
      sample_(std::move(sample)),
      budget_(budget) {}

const PeriodicSet& PeriodicTable::at(int n) {
    auto it = sets_.find(n);
    if (it == sets_.end())
        it = sets_.emplace(n, find_periodic(map_, n, sample_, budget_)).first;
    return it->second;
}

void PeriodicTable::put(PeriodicSet set) {
    const int n = set.n;
    sets_[n] = std::move(set);
}

std::vector<int> PeriodicTable::levels() const {
    std::vector<int> out;
    out.reserve(sets_.size());
    for (const auto& [n, s] : sets_) out.push_back(n);
    return out;
}

QpResult log_partition_sum(PeriodicTable& table, const Potential& phi,
                           const FilterParams& params, int n) {
    if (n < 1) throw std::invalid_argument("partition sum needs n >= 1");
    const PeriodicSet& set = table.at(n);
    const auto filtered = filter_per_alpha_c(set.points, table.map(), params);

    QpResult r;
    r.count_total = static_cast<long>(set.points.size());
    r.count_filtered = static_cast<long>(filtered.size());
    r.report = set.report;
    if (filtered.empty()) {
        r.fallback = true;
        r.log_value = static_cast<double>(n) *
                      min_potential(table.sample(), table.map(), phi);
        return r;
    }
    std::vector<double> terms;
    terms.reserve(filtered.size());
    std::vector<cplx> orbit;
    for (const PeriodicPoint& p : filtered) {
        if (table.map().advance(p.z, n, orbit) !=
            RationalMap::AdvanceStatus::complete)
            throw std::runtime_error(
                "orbit of an enumerated periodic point broke down");
        terms.push_back(birkhoff_sum(phi, table.map(), orbit));
    }
    r.log_value = log_sum_exp(terms);
    return r;
}

double partition_sum(PeriodicTable& table, const Potential& phi,
                     const FilterParams& params, int n) {
    return std::exp(log_partition_sum(table, phi, params, n).log_value);
}

namespace {

double tail_window_max(const std::vector<PressureSeriesEntry>& series,
                       int window) {
    double v = kNegInf;
    const std::size_t w =
        std::min<std::size_t>(series.size(), static_cast<std::size_t>(window));
    for (std::size_t i = series.size() - w; i < series.size(); ++i)
        v = std::max(v, series[i].value);
    return v;
}

void fit_growth_slope(PressureEstimate& est) {
    // Least-squares slope of log-sum against n, fallback levels excluded.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k = 0;
    for (const auto& e : est.series) {
        if (e.fallback) continue;
        const double x = e.n, y = e.log_sum;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++k;
    }
    if (k >= 2 && sxx * k - sx * sx > 0.0)
        est.diagnostics.growth_slope = (sxy * k - sx * sy) / (sxx * k - sx * sx);
    else
        est.diagnostics.growth_slope =
            std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

PressureEstimate periodic_point_pressure(PeriodicTable& table,
                                         const Potential& phi,
                                         const FilterParams& params, int n_min,
                                         int n_max, int window) {
    if (n_min < 1 || n_max < n_min)
        throw std::invalid_argument("bad level range");
    if (window < 1) throw std::invalid_argument("window must be >= 1");

    PressureEstimate est;
    est.method = PressureMethod::periodic_point;
    est.diagnostics.alpha = params.alpha;
    est.diagnostics.c = params.c;
    for (int n = n_min; n <= n_max; ++n) {
        const QpResult q = log_partition_sum(table, phi, params, n);
        PressureSeriesEntry e;
        e.n = n;
        e.log_sum = q.log_value;
        e.value = q.log_value / static_cast<double>(n);
        e.count_filtered = q.count_filtered;
        e.count_total = q.count_total;
        e.fallback = q.fallback;
        est.series.push_back(e);
        est.diagnostics.reports.push_back(q.report);
        if (q.fallback) ++est.diagnostics.fallback_levels;
        if (!q.report.complete) est.diagnostics.any_incomplete = true;
    }
    if (est.diagnostics.fallback_levels > 0)
        est.diagnostics.warnings.push_back(
            std::to_string(est.diagnostics.fallback_levels) +
            " level(s) had an empty filtered set; sample-minimum fallback "
            "used");
    if (est.diagnostics.any_incomplete)
        est.diagnostics.warnings.push_back(
            "some enumerations are incomplete; values are lower bounds");
    est.window = static_cast<int>(std::min<std::size_t>(
        est.series.size(), static_cast<std::size_t>(window)));
    est.value = tail_window_max(est.series, window);
    fit_growth_slope(est);
    return est;
}

PressureEstimate periodic_point_pressure_c_limit(
    PeriodicTable& table, const Potential& phi, double alpha,
    std::span<const double> c_schedule, int n_min, int n_max,
    double stabilization_tol, int window) {
    if (c_schedule.empty())
        throw std::invalid_argument("c schedule must not be empty");
    for (std::size_t i = 0; i < c_schedule.size(); ++i) {
        if (!(c_schedule[i] > 0.0) || !(c_schedule[i] <= 1.0))
            throw std::invalid_argument("c schedule values must be in (0, 1]");
        if (i > 0 && !(c_schedule[i] < c_schedule[i - 1]))
            throw std::invalid_argument(
                "c schedule must be strictly descending");
    }

    PressureEstimate current;
    std::vector<std::pair<double, double>> c_series;
    std::vector<std::string> warnings;
    for (std::size_t i = 0; i < c_schedule.size(); ++i) {
        const FilterParams params(alpha, c_schedule[i]);
        current = periodic_point_pressure(table, phi, params, n_min, n_max,
                                          window);
        for (const auto& w : current.diagnostics.warnings)
            warnings.push_back("c = " + std::to_string(c_schedule[i]) + ": " +
                               w);
        c_series.emplace_back(c_schedule[i], current.value);
        if (i > 0) {
            const double prev = c_series[i - 1].second;
            if (current.value < prev - 1e-9)
                throw std::runtime_error(
                    "pressure decreased along the descending c schedule "
                    "(monotonicity violated): likely incomplete enumeration");
            if (std::abs(current.value - prev) < stabilization_tol) break;
        }
    }
    current.diagnostics.c_series = std::move(c_series);
    current.diagnostics.warnings = std::move(warnings);
    if (current.diagnostics.c_series.size() == c_schedule.size() &&
        c_schedule.size() > 1) {
        const auto& cs = current.diagnostics.c_series;
        if (std::abs(cs[cs.size() - 1].second - cs[cs.size() - 2].second) >=
            stabilization_tol)
            current.diagnostics.warnings.push_back(
                "estimate did not stabilize along the c schedule");
    }
    return current;
}

namespace {

/// Deterministic candidate order for the greedy separated subset:
/// angle in [0, 2 pi), then modulus, then input index.
std::vector<std::size_t> angular_order(const std::vector<cplx>& pts) {
    std::vector<std::size_t> idx(pts.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<double> angle(pts.size()), mod(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double th = std::atan2(pts[i].imag(), pts[i].real());
        if (th < 0.0) th += 2.0 * M_PI;
        angle[i] = th;
        mod[i] = std::abs(pts[i]);
    }
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (angle[a] != angle[b]) return angle[a] < angle[b];
        if (mod[a] != mod[b]) return mod[a] < mod[b];
        return a < b;
    });
    return idx;
}

bool sparse_check(const std::vector<cplx>& pts, double eps, Metric metric) {
    // A sample resolves scale eps when every point has a companion within
    // eps/4. Grid hashing keeps this linear; the cell size converts the
    // metric ball to euclidean coordinates (chordal <= 2 euclidean).
    if (pts.size() < 2) return true;
    const double target = eps / 4.0;
    double cell;
    if (metric == Metric::euclidean) {
        cell = target;
    } else {
        cell = target / 2.0;  // chordal(a,b) <= 2|a-b|
    }
    if (!(cell > 0.0)) return true;
    const auto key = [cell](const cplx& z) {
        return std::pair<long, long>(
            static_cast<long>(std::floor(z.real() / cell)),
            static_cast<long>(std::floor(z.imag() / cell)));
    };
    std::map<std::pair<long, long>, std::vector<std::size_t>> grid;
    for (std::size_t i = 0; i < pts.size(); ++i)
        grid[key(pts[i])].push_back(i);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto [kx, ky] = key(pts[i]);
        bool near = false;
        for (long dx = -1; dx <= 1 && !near; ++dx)
            for (long dy = -1; dy <= 1 && !near; ++dy) {
                const auto it = grid.find({kx + dx, ky + dy});
                if (it == grid.end()) continue;
                for (const std::size_t j : it->second)
                    if (j != i &&
                        point_dist(metric, pts[i], pts[j]) <= target) {
                        near = true;
                        break;
                    }
            }
        if (!near) return true;
    }
    return false;
}

}  // namespace

SeparatedResult separated_pressure(const RationalMap& map,
                                   const Potential& phi,
                                   const JuliaSample& sample, int n,
                                   double epsilon, Metric metric) {
    if (n < 1) throw std::invalid_argument("separated level needs n >= 1");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("epsilon must be positive");
    if (sample.points.empty())
        throw std::invalid_argument("separated estimate over an empty sample");

    SeparatedResult res;
    res.n = n;
    res.epsilon = epsilon;
    res.sparse_sample = sparse_check(sample.points, epsilon, metric);

    // Orbit matrix, one row per usable sample point.
    const std::size_t N = sample.points.size();
    std::vector<cplx> rows;
    rows.reserve(N * static_cast<std::size_t>(n));
    std::vector<cplx> usable;
    usable.reserve(N);
    std::vector<cplx> orbit;
    for (const cplx& z : sample.points) {
        if (map.advance(z, n, orbit) != RationalMap::AdvanceStatus::complete)
            continue;
        usable.push_back(z);
        rows.insert(rows.end(), orbit.begin(), orbit.end());
    }
    if (usable.empty())
        throw std::runtime_error("no sample orbit survived to the requested "
                                 "level");

    const auto order = angular_order(usable);
    const std::size_t un = static_cast<std::size_t>(n);
    const bool euclid = (metric == Metric::euclidean);
    const double eps2 = epsilon * epsilon;

    std::vector<std::size_t> chosen;
    chosen.reserve(usable.size());
    for (const std::size_t cand : order) {
        const cplx* rc = rows.data() + cand * un;
        bool separated_from_all = true;
        // Most recently chosen points are angular neighbors: scan in
        // reverse so rejections exit fast.
        for (std::size_t j = chosen.size(); j-- > 0;) {
            const cplx* rj = rows.data() + chosen[j] * un;
            bool some_k_far = false;
            for (std::size_t k = un; k-- > 0;) {
                if (euclid) {
                    if (abs2(rc[k] - rj[k]) > eps2) {
                        some_k_far = true;
                        break;
                    }
                } else {
                    if (chordal_dist(rc[k], rj[k]) > epsilon) {
                        some_k_far = true;
                        break;
                    }
                }
            }
            if (!some_k_far) {
                separated_from_all = false;
                break;
            }
        }
        if (separated_from_all) chosen.push_back(cand);
    }

    std::vector<double> terms;
    terms.reserve(chosen.size());
    res.points.reserve(chosen.size());
    for (const std::size_t i : chosen) {
        const cplx* r = rows.data() + i * un;
        terms.push_back(
            birkhoff_sum(phi, map, std::span<const cplx>(r, un)));
        res.points.push_back(usable[i]);
    }
    res.set_size = static_cast<long>(chosen.size());
    res.log_sum = log_sum_exp(terms);
    res.value = res.log_sum / static_cast<double>(n);
    return res;
}

PressureEstimate separated_pressure_series(const RationalMap& map,
                                           const Potential& phi,
                                           const JuliaSample& sample,
                                           int n_min, int n_max, double epsilon,
                                           Metric metric) {
    if (n_min < 1 || n_max < n_min)
        throw std::invalid_argument("bad level range");
    PressureEstimate est;
    est.method = PressureMethod::separated_set;
    est.diagnostics.epsilon = epsilon;
    for (int n = n_min; n <= n_max; ++n) {
        const SeparatedResult r =
            separated_pressure(map, phi, sample, n, epsilon, metric);
        PressureSeriesEntry e;
        e.n = n;
        e.value = r.value;
        e.log_sum = r.log_sum;
        e.count_filtered = r.set_size;
        e.count_total = static_cast<long>(sample.points.size());
        est.series.push_back(e);
        if (r.sparse_sample) est.diagnostics.sparse_sample = true;
    }
    if (est.diagnostics.sparse_sample)
        est.diagnostics.warnings.push_back(
            "sample does not resolve epsilon/4: separated values are lower "
            "bounds");
    est.window = 1;
    est.value = est.series.back().value;
    fit_growth_slope(est);
    return est;
}

PeriodicOrbitMeasure orbit_measure(const std::vector<PeriodicPoint>& points,
                                   const RationalMap& map,
                                   const Potential& phi) {
    if (points.empty())
        throw std::invalid_argument("orbit measure over an empty set");
    const int n = points.front().n;
    for (const auto& p : points)
        if (p.n != n)
            throw std::invalid_argument(
                "orbit measure needs a common period");

    PeriodicOrbitMeasure mu;
    mu.n = n;
    mu.points = points;
    std::vector<double> x;
    x.reserve(points.size());
    for (const auto& p : points) x.push_back(birkhoff_sum(phi, map, p.z, n));
    mu.log_normalizer = log_sum_exp(x);
    mu.weights.resize(x.size());
    KahanSum total;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mu.weights[i] = std::exp(x[i] - mu.log_normalizer);
        total.add(mu.weights[i]);
    }
    for (double& w : mu.weights) w /= total.s;
    return mu;
}

double measure_integral(const PeriodicOrbitMeasure& mu, const RationalMap& map,
                        const Potential& psi) {
    KahanSum acc;
    for (std::size_t i = 0; i < mu.points.size(); ++i) {
        if (mu.weights[i] == 0.0) continue;
        acc.add(mu.weights[i] *
                (birkhoff_sum(psi, map, mu.points[i].z, mu.n) /
                 static_cast<double>(mu.n)));
    }
    return acc.s;
}

double lyapunov_exponent(const PeriodicOrbitMeasure& mu) {
    KahanSum acc;
    for (std::size_t i = 0; i < mu.points.size(); ++i) {
        if (mu.weights[i] == 0.0) continue;
        const double la = mu.points[i].log_abs_multiplier;
        if (!std::isfinite(la) && la < 0.0)
            throw std::domain_error(
                "zero multiplier in the measure support");
        acc.add(mu.weights[i] * (la / static_cast<double>(mu.n)));
    }
    return acc.s;
}

}  // namespace perpress
