#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perpress/julia_sampler.hpp"
#include "perpress/periodic_orbits.hpp"
#include "perpress/potential.hpp"
#include "perpress/rational_map.hpp"

namespace perpress {

/// Kahan-compensated log(sum(exp(x))) that never overflows: shifts by the
/// max first. Empty input gives -inf. The identity
/// log_sum_exp(x + a) == a + log_sum_exp(x) holds to rounding.
double log_sum_exp(std::span<const double> xs);

/// Memoizing supplier of periodic point sets for one map. Sets computed on
/// demand with the stored sample/budget; precomputed sets (e.g. loaded
/// from a cache) can be injected.
class PeriodicTable {
  public:
    PeriodicTable(RationalMap map, JuliaSample sample,
                  SearchBudget budget = {});

    const PeriodicSet& at(int n);
    void put(PeriodicSet set);
    bool has(int n) const { return sets_.count(n) > 0; }
    std::vector<int> levels() const;

    const RationalMap& map() const { return map_; }
    const JuliaSample& sample() const { return sample_; }
    const SearchBudget& budget() const { return budget_; }

  private:
    RationalMap map_;
    JuliaSample sample_;
    SearchBudget budget_;
    std::map<int, PeriodicSet> sets_;
};

struct QpResult {
    double log_value = 0.0;  ///< log of the filtered partition sum
    bool fallback = false;   ///< empty filtered set; exp(n min phi) used
    long count_filtered = 0;
    long count_total = 0;
    EnumerationReport report;
};

/// Filtered partition sum at level n: sum over the filtered period-n set
/// of exp(S_n phi), in log space. Empty filtered sets fall back to
/// n * min(phi over the sample), flagged.
QpResult log_partition_sum(PeriodicTable& table, const Potential& phi,
                           const FilterParams& params, int n);

/// Convenience linear-scale wrapper of log_partition_sum.
double partition_sum(PeriodicTable& table, const Potential& phi,
                     const FilterParams& params, int n);

enum class PressureMethod { periodic_point, separated_set };

struct PressureSeriesEntry {
    int n = 0;
    double value = 0.0;    ///< (1/n) log of the level-n sum
    double log_sum = 0.0;  ///< the level-n log partition / separated sum
    long count_filtered = 0;
    long count_total = 0;
    bool fallback = false;
};

struct PressureDiagnostics {
    double alpha = 0.0;
    double c = 0.0;
    double epsilon = 0.0;
    int fallback_levels = 0;
    bool any_incomplete = false;
    std::vector<EnumerationReport> reports;  ///< aligned with the series
    double growth_slope = 0.0;  ///< least-squares slope of log-sum vs n
    bool sparse_sample = false;  ///< separated estimate is a lower bound
    std::vector<std::pair<double, double>> c_series;  ///< (c, value) pairs
    std::vector<std::string> warnings;
};

struct PressureEstimate {
    double value = 0.0;
    PressureMethod method = PressureMethod::periodic_point;
    int window = 0;  ///< tail window width the value was taken over
    std::vector<PressureSeriesEntry> series;
    PressureDiagnostics diagnostics;
};

/// Periodic-point pressure at fixed (alpha, c): series of level values for
/// n in [n_min, n_max]; the estimate is the max over the tail window (a
/// finite stand-in for the limsup).
PressureEstimate periodic_point_pressure(PeriodicTable& table,
                                         const Potential& phi,
                                         const FilterParams& params, int n_min,
                                         int n_max, int window = 4);

/// Run periodic_point_pressure along a strictly descending schedule of c
/// values in (0, 1], stopping early once consecutive estimates differ by
/// less than stabilization_tol. The filtered sets grow as c decreases, so
/// the c-series of estimates must be non-decreasing within tolerance;
/// violations signal enumeration trouble and throw std::runtime_error.
PressureEstimate periodic_point_pressure_c_limit(
    PeriodicTable& table, const Potential& phi, double alpha,
    std::span<const double> c_schedule, int n_min, int n_max,
    double stabilization_tol = 1e-3, int window = 4);

struct SeparatedResult {
    double value = 0.0;
    double log_sum = 0.0;
    long set_size = 0;
    int n = 0;
    double epsilon = 0.0;
    bool sparse_sample = false;  ///< sample too coarse; value is a lower bound
    std::vector<cplx> points;    ///< the extracted separated subset
};

/// Classical pressure estimate at level (n, epsilon): greedily extract a
/// maximal (n, epsilon)-separated subset of the sample (deterministic
/// order: angle, then modulus, then input index) and return
/// (1/n) log sum exp(S_n phi) over it.
SeparatedResult separated_pressure(const RationalMap& map,
                                   const Potential& phi,
                                   const JuliaSample& sample, int n,
                                   double epsilon,
                                   Metric metric = Metric::euclidean);

/// Series of separated estimates for n in [n_min, n_max] at one epsilon.
/// The estimate value is the largest-n entry (no limsup proxy: the level
/// values at fixed epsilon approach the pressure from this side slowly).
PressureEstimate separated_pressure_series(const RationalMap& map,
                                           const Potential& phi,
                                           const JuliaSample& sample,
                                           int n_min, int n_max,
                                           double epsilon,
                                           Metric metric = Metric::euclidean);

/// Probability measure on a level-n periodic point set with weights
/// proportional to exp(S_n phi).
struct PeriodicOrbitMeasure {
    std::vector<PeriodicPoint> points;
    std::vector<double> weights;  ///< sums to 1
    double log_normalizer = 0.0;
    int n = 0;
};

/// Build the weighted measure from a (typically filtered) set sharing one
/// period. Throws std::invalid_argument on an empty set.
PeriodicOrbitMeasure orbit_measure(const std::vector<PeriodicPoint>& points,
                                   const RationalMap& map,
                                   const Potential& phi);

/// Integral of psi: sum of weights times orbit-averaged Birkhoff sums
/// (1/n) S_n psi.
double measure_integral(const PeriodicOrbitMeasure& mu, const RationalMap& map,
                        const Potential& psi);

/// Lyapunov exponent of the measure: weighted average of
/// (1/n) log|multiplier|. A zero multiplier in the support (log = -inf)
/// throws std::domain_error.
double lyapunov_exponent(const PeriodicOrbitMeasure& mu);

}  // namespace perpress
