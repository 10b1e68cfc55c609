#include "perpress/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace perpress {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string pp_series_csv(const PressureEstimate& est) {
    std::ostringstream os;
    os << "n,count_filtered,count_total,log_qp,value_n,fallback_used\n";
    for (const auto& e : est.series) {
        os << e.n << ',' << e.count_filtered << ',' << e.count_total << ','
           << format_double(e.log_sum) << ',' << format_double(e.value) << ','
           << (e.fallback ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string sep_series_csv(const std::vector<PressureEstimate>& per_epsilon) {
    std::ostringstream os;
    os << "epsilon,n,set_size,log_sum,value_n,lower_bound_flag\n";
    for (const auto& est : per_epsilon) {
        for (const auto& e : est.series) {
            os << format_double(est.diagnostics.epsilon) << ',' << e.n << ','
               << e.count_filtered << ',' << format_double(e.log_sum) << ','
               << format_double(e.value) << ','
               << (est.diagnostics.sparse_sample ? 1 : 0) << '\n';
        }
    }
    return os.str();
}

std::string compare_csv(const PressureEstimate& pp,
                        const PressureEstimate& sep) {
    std::ostringstream os;
    os << "n,pp_value,sep_value,difference\n";
    for (const auto& e : pp.series) {
        const PressureSeriesEntry* s = nullptr;
        for (const auto& se : sep.series)
            if (se.n == e.n) {
                s = &se;
                break;
            }
        if (!s) continue;
        os << e.n << ',' << format_double(e.value) << ','
           << format_double(s->value) << ','
           << format_double(e.value - s->value) << '\n';
    }
    return os.str();
}

std::string periodic_points_csv(const std::vector<const PeriodicSet*>& sets) {
    std::ostringstream os;
    os << "n,re,im,mult_re,mult_im,primitive_period,residual\n";
    for (const PeriodicSet* set : sets) {
        for (const auto& p : set->points) {
            os << set->n << ',' << format_double(p.z.real()) << ','
               << format_double(p.z.imag()) << ','
               << format_double(p.multiplier.real()) << ','
               << format_double(p.multiplier.imag()) << ','
               << p.primitive_period << ',' << format_double(p.residual)
               << '\n';
        }
    }
    return os.str();
}

std::string bowen_sweep_csv_header() {
    return "alpha,c,n_used,t_lo,t_hi,t_star,residual,cross_check_root\n";
}

std::string bowen_sweep_csv_row(const BowenResult& r, double alpha, double c) {
    std::ostringstream os;
    os << format_double(alpha) << ',' << format_double(c) << ',' << r.n_used
       << ',' << format_double(r.t_lo) << ',' << format_double(r.t_hi) << ','
       << format_double(r.t_star) << ',' << format_double(r.residual) << ','
       << (r.cross_check_root ? format_double(*r.cross_check_root) : "")
       << '\n';
    return os.str();
}

nlohmann::ordered_json report_json(const EnumerationReport& r) {
    return {{"found", r.found},
            {"expected", r.expected},
            {"complete", r.complete},
            {"unresolved_multiplicity", r.unresolved_multiplicity}};
}

nlohmann::ordered_json estimate_json(const PressureEstimate& est) {
    nlohmann::ordered_json j;
    j["value"] = est.value;
    j["method"] = est.method == PressureMethod::periodic_point
                      ? "periodic_point"
                      : "separated_set";
    j["window"] = est.window;
    nlohmann::ordered_json series = nlohmann::ordered_json::array();
    for (const auto& e : est.series) {
        series.push_back({{"n", e.n},
                          {"value", e.value},
                          {"log_sum", e.log_sum},
                          {"count_filtered", e.count_filtered},
                          {"count_total", e.count_total},
                          {"fallback", e.fallback}});
    }
    j["series"] = std::move(series);

    nlohmann::ordered_json d;
    if (est.method == PressureMethod::periodic_point) {
        d["alpha"] = est.diagnostics.alpha;
        d["c"] = est.diagnostics.c;
        d["fallback_levels"] = est.diagnostics.fallback_levels;
        d["any_incomplete"] = est.diagnostics.any_incomplete;
        nlohmann::ordered_json reps = nlohmann::ordered_json::array();
        for (const auto& r : est.diagnostics.reports)
            reps.push_back(report_json(r));
        d["enumeration_reports"] = std::move(reps);
        if (!est.diagnostics.c_series.empty()) {
            nlohmann::ordered_json cs = nlohmann::ordered_json::array();
            for (const auto& [c, v] : est.diagnostics.c_series)
                cs.push_back({{"c", c}, {"value", v}});
            d["c_series"] = std::move(cs);
        }
    } else {
        d["epsilon"] = est.diagnostics.epsilon;
        d["sparse_sample"] = est.diagnostics.sparse_sample;
    }
    if (std::isfinite(est.diagnostics.growth_slope))
        d["growth_slope"] = est.diagnostics.growth_slope;
    d["warnings"] = est.diagnostics.warnings;
    j["diagnostics"] = std::move(d);
    return j;
}

nlohmann::ordered_json bowen_json(const BowenResult& r, double alpha,
                                  double c) {
    nlohmann::ordered_json j;
    j["t_star"] = r.t_star;
    j["bracket"] = {r.t_lo, r.t_hi};
    j["residual"] = r.residual;
    j["n_used"] = r.n_used;
    j["incomplete_basis"] = r.incomplete_basis;
    j["alpha"] = alpha;
    j["c"] = c;
    if (r.cross_check_root) j["cross_check_root"] = *r.cross_check_root;
    nlohmann::ordered_json evals = nlohmann::ordered_json::array();
    for (const auto& [t, v] : r.evaluations)
        evals.push_back({{"t", t}, {"value", v}});
    j["evaluations"] = std::move(evals);
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace perpress
