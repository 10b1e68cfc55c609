#include "perpress/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "perpress/potential.hpp"

namespace perpress {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

double parse_double(const std::string& tok, int line, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(line, std::string(what) + ": bad number '" + tok +
                                    "'");
    }
}

long parse_long(const std::string& tok, int line, const char* what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(line, std::string(what) + ": bad integer '" + tok +
                                    "'");
    }
}

/// Coefficient token: "re" or "re,im".
cplx parse_coeff(const std::string& tok, int line) {
    const auto comma = tok.find(',');
    if (comma == std::string::npos)
        return {parse_double(tok, line, "coefficient"), 0.0};
    return {parse_double(tok.substr(0, comma), line, "coefficient"),
            parse_double(tok.substr(comma + 1), line, "coefficient")};
}

std::vector<cplx> parse_coeff_list(const std::string& val, int line) {
    std::vector<cplx> out;
    for (const auto& tok : split_ws(val)) out.push_back(parse_coeff(tok, line));
    return out;
}

std::vector<double> parse_double_list(const std::string& val, int line,
                                      const char* what) {
    std::vector<double> out;
    for (const auto& tok : split_ws(val))
        out.push_back(parse_double(tok, line, what));
    return out;
}

void apply_key(RunConfig& cfg, const std::string& section,
               const std::string& key, const std::string& val, int line) {
    auto unknown = [&]() -> ConfigError {
        return ConfigError(line, "unknown key '" + key + "' in section [" +
                                     section + "]");
    };
    if (section == "map") {
        if (key == "numerator")
            cfg.numerator = parse_coeff_list(val, line);
        else if (key == "denominator")
            cfg.denominator = parse_coeff_list(val, line);
        else
            throw unknown();
    } else if (section == "potential") {
        if (key == "expr")
            cfg.potential_expr = val;
        else
            throw unknown();
    } else if (section == "run") {
        if (key == "alpha")
            cfg.alpha = parse_double(val, line, "alpha");
        else if (key == "c_schedule")
            cfg.c_schedule = parse_double_list(val, line, "c_schedule");
        else if (key == "n_min")
            cfg.n_min = static_cast<int>(parse_long(val, line, "n_min"));
        else if (key == "n_max")
            cfg.n_max = static_cast<int>(parse_long(val, line, "n_max"));
        else if (key == "epsilon_schedule")
            cfg.epsilon_schedule =
                parse_double_list(val, line, "epsilon_schedule");
        else if (key == "metric") {
            if (val == "euclidean")
                cfg.metric = Metric::euclidean;
            else if (val == "chordal")
                cfg.metric = Metric::chordal;
            else
                throw ConfigError(line, "metric must be 'euclidean' or "
                                        "'chordal'");
        } else if (key == "stabilization_tol")
            cfg.stabilization_tol =
                parse_double(val, line, "stabilization_tol");
        else if (key == "window")
            cfg.window = static_cast<int>(parse_long(val, line, "window"));
        else
            throw unknown();
    } else if (section == "sample") {
        if (key == "count")
            cfg.sample_count =
                static_cast<int>(parse_long(val, line, "sample count"));
        else if (key == "depth")
            cfg.sample_depth =
                static_cast<int>(parse_long(val, line, "sample depth"));
        else if (key == "seed")
            cfg.seed =
                static_cast<std::uint64_t>(parse_long(val, line, "seed"));
        else
            throw unknown();
    } else if (section == "bowen") {
        if (key == "bracket") {
            const auto v = parse_double_list(val, line, "bracket");
            if (v.size() != 2)
                throw ConfigError(line, "bracket needs exactly two values");
            cfg.bracket_lo = v[0];
            cfg.bracket_hi = v[1];
        } else if (key == "tol")
            cfg.bowen_tol = parse_double(val, line, "bowen tol");
        else
            throw unknown();
    } else if (section == "output") {
        if (key == "directory")
            cfg.out_dir = val;
        else if (key == "formats") {
            cfg.emit_csv = false;
            cfg.emit_json = false;
            std::string v = val;
            std::replace(v.begin(), v.end(), ',', ' ');
            for (const auto& tok : split_ws(v)) {
                if (tok == "csv")
                    cfg.emit_csv = true;
                else if (tok == "json")
                    cfg.emit_json = true;
                else
                    throw ConfigError(line, "unknown format '" + tok + "'");
            }
        } else
            throw unknown();
    } else {
        throw ConfigError(line, "unknown section [" + section + "]");
    }
}

}  // namespace

void validate_config(const RunConfig& cfg) {
    if (cfg.numerator.empty())
        throw ConfigError(0, "[map] numerator is required");
    if (!(cfg.alpha > 0.0)) throw ConfigError(0, "alpha must be positive");
    if (cfg.c_schedule.empty())
        throw ConfigError(0, "c_schedule must not be empty");
    for (std::size_t i = 0; i < cfg.c_schedule.size(); ++i) {
        if (!(cfg.c_schedule[i] > 0.0) || !(cfg.c_schedule[i] <= 1.0))
            throw ConfigError(0, "c_schedule values must lie in (0, 1]");
        if (i > 0 && !(cfg.c_schedule[i] < cfg.c_schedule[i - 1]))
            throw ConfigError(0, "c_schedule must be strictly descending");
    }
    if (cfg.n_min < 1) throw ConfigError(0, "n_min must be >= 1");
    if (cfg.n_max < cfg.n_min)
        throw ConfigError(0, "n_max must be >= n_min");
    for (std::size_t i = 0; i < cfg.epsilon_schedule.size(); ++i) {
        if (!(cfg.epsilon_schedule[i] > 0.0))
            throw ConfigError(0, "epsilon_schedule values must be positive");
        if (i > 0 &&
            !(cfg.epsilon_schedule[i] < cfg.epsilon_schedule[i - 1]))
            throw ConfigError(0,
                              "epsilon_schedule must be strictly descending");
    }
    if (cfg.sample_count < 1)
        throw ConfigError(0, "sample count must be positive");
    if (cfg.sample_depth < 2) throw ConfigError(0, "sample depth must be >= 2");
    if (!(cfg.stabilization_tol > 0.0))
        throw ConfigError(0, "stabilization_tol must be positive");
    if (cfg.window < 1) throw ConfigError(0, "window must be >= 1");
    if (!(cfg.bracket_lo < cfg.bracket_hi))
        throw ConfigError(0, "bowen bracket must be ordered (lo < hi)");
    if (!(cfg.bowen_tol > 0.0))
        throw ConfigError(0, "bowen tol must be positive");
    try {
        (void)Potential::parse(cfg.potential_expr);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, std::string("potential expr: ") + e.what());
    }
    if (cfg.threads < 1) throw ConfigError(0, "threads must be >= 1");
}

RunConfig parse_config_text(std::string_view text) {
    RunConfig cfg;
    std::string section;
    int line_no = 0;
    std::istringstream is{std::string(text)};
    std::string raw;
    while (std::getline(is, raw)) {
        ++line_no;
        const auto hash = raw.find_first_of("#;");
        std::string line = trim(hash == std::string::npos
                                    ? std::string_view(raw)
                                    : std::string_view(raw).substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(line_no, "unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(line_no, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line_no, "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string val = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "empty key");
        if (section.empty())
            throw ConfigError(line_no, "key before any [section]");
        apply_key(cfg, section, key, val, line_no);
    }
    validate_config(cfg);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(0, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace perpress
