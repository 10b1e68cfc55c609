#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "perpress/complexplane.hpp"

namespace perpress {

/// Configuration problem (syntax or semantics). Carries the 1-based line
/// number, 0 when the problem is not tied to a line.
struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_, const std::string& what_)
        : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) +
                                             ": " + what_
                                       : what_),
          line(line_) {}
};

/// One experiment description: the map, the weight function, filter and
/// level schedules, sampling parameters, and output options. Parsed from
/// an INI-style file; see the project README for the grammar.
struct RunConfig {
    // [map]
    std::vector<cplx> numerator;
    std::vector<cplx> denominator = {cplx{1.0, 0.0}};

    // [potential]
    std::string potential_expr = "const(0)";

    // [run]
    double alpha = 0.3;
    std::vector<double> c_schedule = {1.0, 0.5, 0.25};
    int n_min = 1;
    int n_max = 12;
    std::vector<double> epsilon_schedule = {0.1, 0.05, 0.02};
    Metric metric = Metric::euclidean;
    double stabilization_tol = 1e-3;
    int window = 4;

    // [sample]
    int sample_count = 4000;
    int sample_depth = 48;
    std::uint64_t seed = 1;

    // [bowen]
    double bracket_lo = 0.5;
    double bracket_hi = 1.5;
    double bowen_tol = 1e-3;

    // [output]
    std::string out_dir = "out";
    bool emit_csv = true;
    bool emit_json = true;

    int threads = 1;  // CLI-level override, not a config key
};

/// Parse and validate configuration text. Throws ConfigError with a line
/// number on syntax problems and with the violated constraint on semantic
/// problems.
RunConfig parse_config_text(std::string_view text);

/// Read the file and parse it. Missing/unreadable file throws ConfigError.
RunConfig parse_config_file(const std::string& path);

/// Semantic validation only; used again after command-line overrides.
void validate_config(const RunConfig& cfg);

}  // namespace perpress
