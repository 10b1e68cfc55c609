#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "perpress/bowen.hpp"
#include "perpress/pressure.hpp"

namespace perpress {

/// Shortest round-trip decimal rendering (std::to_chars), so artifacts
/// are byte-stable across runs and parse back to the identical double.
std::string format_double(double v);

/// CSV rows: n,count_filtered,count_total,log_qp,value_n,fallback_used
std::string pp_series_csv(const PressureEstimate& est);

/// CSV rows: epsilon,n,set_size,log_sum,value_n,lower_bound_flag
std::string sep_series_csv(const std::vector<PressureEstimate>& per_epsilon);

/// CSV rows: n,pp_value,sep_value,difference (series aligned on n).
std::string compare_csv(const PressureEstimate& pp,
                        const PressureEstimate& sep);

/// CSV rows: n,re,im,mult_re,mult_im,primitive_period,residual
std::string periodic_points_csv(const std::vector<const PeriodicSet*>& sets);

/// CSV row for one Bowen solve, with header when asked.
std::string bowen_sweep_csv_row(const BowenResult& r, double alpha, double c);
std::string bowen_sweep_csv_header();

nlohmann::ordered_json estimate_json(const PressureEstimate& est);
nlohmann::ordered_json bowen_json(const BowenResult& r, double alpha,
                                  double c);
nlohmann::ordered_json report_json(const EnumerationReport& r);

/// Write text to path, creating parent directories. Throws
/// std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace perpress
