#include "perpress/periodic_orbits.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "perpress/polynomial.hpp"

namespace perpress {

FilterParams::FilterParams(double alpha_, double c_) : alpha(alpha_), c(c_) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("filter alpha must be positive");
    if (!(c > 0.0) || !(c <= 1.0))
        throw std::invalid_argument("filter c must lie in (0, 1]");
}

namespace {

struct GEval {
    cplx value;      // f^n(w) - w
    cplx dvalue;     // (f^n)'(w) - 1
    bool ok = false;  // orbit stayed finite and evaluable
};

/// One pass computing g and g' together; the derivative of f^n is the
/// chain-rule product along the orbit, never expanded coefficients.
GEval eval_g(const RationalMap& map, cplx w, int n) {
    GEval r;
    cplx z = w;
    cplx prod{1.0, 0.0};
    for (int k = 0; k < n; ++k) {
        if (!is_finite_point(z) || std::abs(z) > 1e100) return r;
        cplx dv;
        try {
            dv = map.derivative(z);
        } catch (const std::domain_error&) {
            return r;
        }
        prod *= dv;
        if (!is_finite_point(prod)) return r;
        try {
            z = map.eval(z);
        } catch (const std::domain_error&) {
            return r;
        }
    }
    if (!is_finite_point(z)) return r;
    r.value = z - w;
    r.dvalue = prod - cplx{1.0, 0.0};
    r.ok = true;
    return r;
}

/// Damped Newton iteration on g = f^n - id. Returns the root on
/// convergence (|g| <= rtol * (1 + |w|)).
std::optional<cplx> newton_root(const RationalMap& map, cplx w, int n,
                                const SearchBudget& b, double rtol) {
    GEval g = eval_g(map, w, n);
    if (!g.ok) return std::nullopt;
    for (int it = 0; it < b.max_newton_iters; ++it) {
        const double gm = std::abs(g.value);
        if (gm <= rtol * (1.0 + std::abs(w))) return w;
        if (std::abs(g.dvalue) == 0.0) return std::nullopt;
        const cplx step = g.value / g.dvalue;
        if (!is_finite_point(step)) return std::nullopt;
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h < b.max_step_halvings; ++h) {
            const cplx w2 = w - t * step;
            const GEval g2 = eval_g(map, w2, n);
            if (g2.ok && std::abs(g2.value) < gm) {
                w = w2;
                g = g2;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) return std::nullopt;
    }
    return std::nullopt;
}

struct Candidate {
    cplx z;
};

bool lex_less(const cplx& a, const cplx& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}

/// Sort + window dedup under the chordal tolerance. Keeps the first point
/// of each cluster in lex order, so the result is independent of input
/// order.
std::vector<cplx> dedup_points(std::vector<cplx> pts, double tol) {
    std::sort(pts.begin(), pts.end(), lex_less);
    double maxmod = 0.0;
    for (const cplx& z : pts) maxmod = std::max(maxmod, std::abs(z));
    const double window = 0.55 * tol * (1.0 + maxmod * maxmod) + 1e-300;
    std::vector<cplx> out;
    out.reserve(pts.size());
    for (const cplx& z : pts) {
        bool dup = false;
        for (std::size_t j = out.size(); j-- > 0;) {
            if (z.real() - out[j].real() > window) break;
            if (chordal_dist(z, out[j]) <= tol) {
                dup = true;
                break;
            }
        }
        out.push_back(z);
        if (dup) out.pop_back();
    }
    return out;
}

std::vector<int> proper_divisors(int n) {
    std::vector<int> d;
    for (int m = 1; m < n; ++m)
        if (n % m == 0) d.push_back(m);
    return d;
}

/// Run Newton from every seed, in chunks when threaded; results keep a
/// deterministic order because they are sorted and deduplicated afterward.
std::vector<cplx> newton_sweep(const RationalMap& map, int n,
                               const std::vector<cplx>& seeds,
                               const SearchBudget& b) {
    const int threads = std::max(1, b.threads);
    std::vector<std::vector<cplx>> chunks(
        static_cast<std::size_t>(threads));
    auto work = [&](int t) {
        auto& local = chunks[static_cast<std::size_t>(t)];
        for (std::size_t i = static_cast<std::size_t>(t); i < seeds.size();
             i += static_cast<std::size_t>(threads)) {
            if (auto r = newton_root(map, seeds[i], n, b, b.convergence_rtol))
                local.push_back(*r);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    std::vector<cplx> roots;
    for (auto& c : chunks) roots.insert(roots.end(), c.begin(), c.end());
    return roots;
}

/// Polish each orbit image of every root and add it to the root set: an
/// orbit is either wholly enumerated or wholly missing otherwise.
void close_under_orbit(const RationalMap& map, int n, const SearchBudget& b,
                       std::vector<cplx>& roots) {
    std::vector<cplx> extra;
    std::vector<cplx> orbit;
    for (const cplx& z : roots) {
        if (map.advance(z, n, orbit) != RationalMap::AdvanceStatus::complete)
            continue;
        for (int j = 1; j < n; ++j) {
            SearchBudget quick = b;
            quick.max_newton_iters = 12;
            if (auto r = newton_root(map, orbit[static_cast<std::size_t>(j)],
                                     n, quick, b.convergence_rtol))
                extra.push_back(*r);
        }
    }
    roots.insert(roots.end(), extra.begin(), extra.end());
}

long expected_count(const RationalMap& map, int n) {
    long e = 1;
    for (int k = 0; k < n; ++k) {
        if (e > (1l << 60) / map.degree()) return -1;  // overflow guard
        e *= map.degree();
    }
    return map.is_polynomial() ? e : e + 1;
}

}  // namespace

PeriodicSet find_periodic(const RationalMap& map, int n,
                          const JuliaSample& sample,
                          const SearchBudget& budget) {
    if (n < 1) throw std::invalid_argument("period must be >= 1");
    const long expected = expected_count(map, n);
    if (expected < 0 || expected > budget.max_expected)
        throw std::invalid_argument(
            "expected root count degree^n exceeds the search budget (n = " +
            std::to_string(n) + ")");

    // Seed pool shared across divisor levels, built smallest level first:
    // periodic points of every m | n are also solutions at level n.
    double maxmod = 0.0;
    for (const cplx& z : sample.points) maxmod = std::max(maxmod, std::abs(z));
    if (maxmod == 0.0) maxmod = 1.0;

    std::vector<int> levels = proper_divisors(n);
    levels.push_back(n);
    std::vector<cplx> divisor_roots;

    std::vector<cplx> roots_n;
    for (const int m : levels) {
        const long expected_m = expected_count(map, m);
        std::vector<cplx> seeds = sample.points;
        const long ring_count = expected_m + 1;
        const double ring_r =
            (1.0 + std::min(0.05, 50.0 / static_cast<double>(expected_m))) *
            maxmod;
        seeds.reserve(seeds.size() +
                      static_cast<std::size_t>(ring_count) +
                      divisor_roots.size());
        for (long k = 0; k < ring_count; ++k) {
            const double th = 2.0 * M_PI * static_cast<double>(k) /
                              static_cast<double>(ring_count);
            seeds.push_back(ring_r * cplx{std::cos(th), std::sin(th)});
        }
        seeds.insert(seeds.end(), divisor_roots.begin(), divisor_roots.end());

        std::vector<cplx> roots = newton_sweep(map, m, seeds, budget);
        roots = dedup_points(std::move(roots), budget.dedup_tol);
        close_under_orbit(map, m, budget, roots);
        roots = dedup_points(std::move(roots), budget.dedup_tol);

        // Refinement: re-seed near known roots while the count is short.
        std::mt19937_64 rng(budget.refinement_seed ^
                            static_cast<std::uint64_t>(m));
        for (int round = 0;
             round < budget.refinement_rounds &&
             static_cast<long>(roots.size()) < expected_m;
             ++round) {
            std::vector<cplx> extra_seeds;
            for (std::size_t i = 0; i < roots.size(); ++i) {
                double gap = 1e-3;
                if (i > 0)
                    gap = std::min(gap, std::abs(roots[i] - roots[i - 1]));
                if (i + 1 < roots.size())
                    gap = std::min(gap, std::abs(roots[i] - roots[i + 1]));
                gap = std::max(gap, 1e-12);
                for (const double frac : {0.35, 0.65}) {
                    for (int a = 0; a < 3; ++a) {
                        const double th =
                            2.0 * M_PI *
                            (static_cast<double>(rng() % 4096) / 4096.0);
                        extra_seeds.push_back(
                            roots[i] + frac * gap *
                                           cplx{std::cos(th), std::sin(th)});
                    }
                }
            }
            auto found = newton_sweep(map, m, extra_seeds, budget);
            roots.insert(roots.end(), found.begin(), found.end());
            roots = dedup_points(std::move(roots), budget.dedup_tol);
            close_under_orbit(map, m, budget, roots);
            roots = dedup_points(std::move(roots), budget.dedup_tol);
        }

        if (m == n) {
            roots_n = std::move(roots);
        } else {
            divisor_roots.insert(divisor_roots.end(), roots.begin(),
                                 roots.end());
        }
    }

    // Final polish to tighten residuals, then assemble point data.
    PeriodicSet set;
    set.n = n;
    set.points.reserve(roots_n.size());
    std::vector<cplx> polished;
    polished.reserve(roots_n.size());
    for (const cplx& z : roots_n) {
        SearchBudget fine = budget;
        fine.max_newton_iters = 8;
        if (auto r = newton_root(map, z, n, fine, budget.polish_rtol))
            polished.push_back(*r);
        else
            polished.push_back(z);  // keep the coarse root
    }
    polished = dedup_points(std::move(polished), budget.dedup_tol);

    std::vector<cplx> orbit;
    const auto divisors = proper_divisors(n);
    for (const cplx& z : polished) {
        if (map.advance(z, n + 1, orbit) !=
            RationalMap::AdvanceStatus::complete)
            continue;
        PeriodicPoint p;
        p.z = z;
        p.n = n;
        p.residual = std::abs(orbit.back() - z);
        if (p.residual > 1e-7 * (1.0 + std::abs(z))) continue;

        p.primitive_period = n;
        for (const int m : divisors) {
            if (chordal_dist(orbit[static_cast<std::size_t>(m)], z) <=
                budget.dedup_tol) {
                p.primitive_period = m;
                break;
            }
        }

        PolarDerivative pd;
        bool mult_ok = true;
        for (int k = 0; k < n; ++k) {
            double la;
            try {
                la = map.log_abs_derivative(orbit[static_cast<std::size_t>(k)]);
            } catch (const std::domain_error&) {
                mult_ok = false;
                break;
            }
            pd.log_abs += la;
            if (std::isfinite(la)) {
                const cplx dv =
                    map.derivative(orbit[static_cast<std::size_t>(k)]);
                pd.arg += std::atan2(dv.imag(), dv.real());
            }
        }
        if (!mult_ok) continue;
        pd.arg = std::remainder(pd.arg, 2.0 * M_PI);
        // Canonicalize through the complex value when representable so a
        // 17-digit cache round trip reproduces identical downstream data.
        p.multiplier = pd.to_complex();
        if (is_finite_point(p.multiplier)) {
            p.log_abs_multiplier = std::log(std::abs(p.multiplier));
            p.arg_multiplier =
                std::atan2(p.multiplier.imag(), p.multiplier.real());
        } else {
            p.log_abs_multiplier = pd.log_abs;
            p.arg_multiplier = pd.arg;
        }
        set.points.push_back(p);
    }

    std::sort(set.points.begin(), set.points.end(),
              [](const PeriodicPoint& a, const PeriodicPoint& b) {
                  return lex_less(a.z, b.z);
              });

    set.report.found = static_cast<long>(set.points.size());
    set.report.expected = expected;
    set.report.complete = (set.report.found == expected);
    set.report.unresolved_multiplicity =
        std::max(0l, expected - set.report.found);
    return set;
}

bool classify_repelling(const PeriodicPoint& p, double margin) {
    return p.log_abs_multiplier > std::log1p(margin);
}

std::vector<PeriodicPoint> filter_per_alpha_c(
    const std::vector<PeriodicPoint>& points, const RationalMap& map,
    const FilterParams& params) {
    std::vector<PeriodicPoint> out;
    const double logc = std::log(params.c);
    std::vector<cplx> orbit;
    std::vector<double> L;
    for (const PeriodicPoint& p : points) {
        if (!points.empty() && p.n != points.front().n)
            throw std::invalid_argument(
                "filter input must share a common period");
        const int n = p.n;
        // (A): |(f^n)'(z)| >= e^(n alpha), in logs.
        if (!(p.log_abs_multiplier >= static_cast<double>(n) * params.alpha))
            continue;
        if (map.advance(p.z, n, orbit) !=
            RationalMap::AdvanceStatus::complete)
            continue;
        L.resize(static_cast<std::size_t>(n));
        bool finite_orbit_logs = true;
        for (int k = 0; k < n; ++k) {
            try {
                L[static_cast<std::size_t>(k)] = map.log_abs_derivative(
                    orbit[static_cast<std::size_t>(k)]);
            } catch (const std::domain_error&) {
                finite_orbit_logs = false;
                break;
            }
        }
        if (!finite_orbit_logs) continue;
        // (B): every orbit-cyclic partial sum of length r < n clears
        // log c + r alpha. Combined with (A) this is equivalent to the
        // full k in N family (write k = qn + r).
        bool pass = true;
        for (int i = 0; i < n && pass; ++i) {
            double s = 0.0;
            for (int r = 1; r < n; ++r) {
                s += L[static_cast<std::size_t>((i + r - 1) % n)];
                if (!(s >= logc + static_cast<double>(r) * params.alpha)) {
                    pass = false;
                    break;
                }
            }
        }
        if (pass) out.push_back(p);
    }
    return out;
}

bool brute_force_membership(const PeriodicPoint& p, const RationalMap& map,
                            const FilterParams& params, int k_max) {
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    const int n = p.n;
    std::vector<cplx> orbit;
    if (map.advance(p.z, n, orbit) != RationalMap::AdvanceStatus::complete)
        return false;
    std::vector<double> L(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        try {
            L[static_cast<std::size_t>(k)] =
                map.log_abs_derivative(orbit[static_cast<std::size_t>(k)]);
        } catch (const std::domain_error&) {
            return false;
        }
    }
    const double logc = std::log(params.c);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 1; k <= k_max; ++k) {
            s += L[static_cast<std::size_t>((i + k - 1) % n)];
            if (!(s >= logc + static_cast<double>(k) * params.alpha))
                return false;
        }
    }
    return true;
}

}  // namespace perpress
