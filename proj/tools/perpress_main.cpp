#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "perpress/bowen.hpp"
#include "perpress/cache.hpp"
#include "perpress/report.hpp"
#include "perpress/run_config.hpp"

namespace {

using namespace perpress;
using nlohmann::ordered_json;

struct CliOverrides {
    std::string config_path;
    std::string out_dir;
    std::string c_schedule;
    std::string formats;
    int n_max = -1;
    double alpha = -1.0;
    long long seed = -1;
    int threads = -1;
};

void add_common_options(CLI::App* cmd, CliOverrides& ov) {
    cmd->add_option("--config", ov.config_path, "experiment config file")
        ->required();
    cmd->add_option("--out", ov.out_dir, "output directory override");
    cmd->add_option("--n-max", ov.n_max, "largest period level override");
    cmd->add_option("--alpha", ov.alpha, "expansion rate floor override");
    cmd->add_option("--c-schedule", ov.c_schedule,
                    "comma-separated descending c values override");
    cmd->add_option("--seed", ov.seed, "sample seed override");
    cmd->add_option("--threads", ov.threads, "worker threads override");
    cmd->add_option("--format", ov.formats,
                    "artifact formats override (csv,json)");
}

RunConfig load_config(const CliOverrides& ov) {
    RunConfig cfg = parse_config_file(ov.config_path);
    if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
    if (ov.n_max > 0) cfg.n_max = ov.n_max;
    if (ov.alpha > 0.0) cfg.alpha = ov.alpha;
    if (ov.seed >= 0) cfg.seed = static_cast<std::uint64_t>(ov.seed);
    if (ov.threads > 0) cfg.threads = ov.threads;
    if (!ov.c_schedule.empty()) {
        std::string v = ov.c_schedule;
        std::replace(v.begin(), v.end(), ',', ' ');
        std::istringstream is(v);
        cfg.c_schedule.clear();
        double x;
        while (is >> x) cfg.c_schedule.push_back(x);
    }
    if (!ov.formats.empty()) {
        cfg.emit_csv = false;
        cfg.emit_json = false;
        std::string v = ov.formats;
        std::replace(v.begin(), v.end(), ',', ' ');
        std::istringstream is(v);
        std::string tok;
        while (is >> tok) {
            if (tok == "csv")
                cfg.emit_csv = true;
            else if (tok == "json")
                cfg.emit_json = true;
            else
                throw ConfigError(0, "unknown format '" + tok + "'");
        }
    }
    validate_config(cfg);
    return cfg;
}

std::string cache_dir_for(const RunConfig& cfg) {
    if (const char* env = std::getenv("PERPRESS_CACHE_DIR"); env && *env)
        return env;
    return (std::filesystem::path(cfg.out_dir) / "cache").string();
}

struct RunContext {
    RunConfig cfg;
    RationalMap map;
    Potential phi;
    PeriodicTable table;
    std::string cache_dir;
    std::set<int> from_cache;
};

RunContext make_context(RunConfig cfg) {
    RationalMap map(cfg.numerator, cfg.denominator);
    Potential phi = Potential::parse(cfg.potential_expr);
    JuliaSample sample = inverse_iteration_sample(
        map, cfg.sample_count, cfg.sample_depth, cfg.seed);
    SearchBudget budget;
    budget.threads = cfg.threads;
    RunContext ctx{std::move(cfg),
                   map,
                   std::move(phi),
                   PeriodicTable(map, std::move(sample), budget),
                   {},
                   {}};
    ctx.cache_dir = cache_dir_for(ctx.cfg);
    for (int n = 1; n <= ctx.cfg.n_max; ++n) {
        auto res = cache_load(ctx.cache_dir, ctx.map, n);
        if (res.skipped_records > 0)
            std::cerr << "warning: skipped " << res.skipped_records
                      << " corrupted cache record(s) for n = " << n << "\n";
        if (res.foreign_records > 0)
            std::cerr << "warning: ignored " << res.foreign_records
                      << " cache record(s) for a different map at n = " << n
                      << "\n";
        if (res.set) {
            ctx.table.put(std::move(*res.set));
            ctx.from_cache.insert(n);
        }
    }
    return ctx;
}

void store_fresh_sets(RunContext& ctx) {
    for (const int n : ctx.table.levels()) {
        if (ctx.from_cache.count(n)) continue;
        cache_store(ctx.cache_dir, ctx.map, ctx.table.at(n));
    }
}

ordered_json base_summary(const RunContext& ctx, const char* subcommand) {
    ordered_json j;
    j["subcommand"] = subcommand;
    char fp[32];
    std::snprintf(fp, sizeof fp, "%016llx",
                  static_cast<unsigned long long>(map_fingerprint(ctx.map)));
    ordered_json num = ordered_json::array();
    for (const cplx& c : ctx.map.numerator())
        num.push_back({c.real(), c.imag()});
    ordered_json den = ordered_json::array();
    for (const cplx& c : ctx.map.denominator())
        den.push_back({c.real(), c.imag()});
    j["map"] = {{"numerator", std::move(num)},
                {"denominator", std::move(den)},
                {"degree", ctx.map.degree()},
                {"fingerprint", fp}};
    j["potential"] = ctx.phi.to_string();
    j["sample"] = {{"generator", "inverse_iteration"},
                   {"count", ctx.table.sample().count},
                   {"depth", ctx.table.sample().depth},
                   {"seed", ctx.table.sample().seed}};
    return j;
}

void emit_summary(const RunContext& ctx, const ordered_json& j) {
    if (!ctx.cfg.emit_json) return;
    write_text_file(
        (std::filesystem::path(ctx.cfg.out_dir) / "summary.json").string(),
        j.dump(2) + "\n");
}

PressureEstimate run_pp(RunContext& ctx) {
    return periodic_point_pressure_c_limit(
        ctx.table, ctx.phi, ctx.cfg.alpha, ctx.cfg.c_schedule, ctx.cfg.n_min,
        ctx.cfg.n_max, ctx.cfg.stabilization_tol, ctx.cfg.window);
}

std::vector<PressureEstimate> run_sep(RunContext& ctx) {
    std::vector<PressureEstimate> out;
    for (const double eps : ctx.cfg.epsilon_schedule)
        out.push_back(separated_pressure_series(
            ctx.map, ctx.phi, ctx.table.sample(), ctx.cfg.n_min,
            ctx.cfg.n_max, eps, ctx.cfg.metric));
    return out;
}

int cmd_periodic_points(RunContext& ctx) {
    std::vector<const PeriodicSet*> sets;
    for (int n = ctx.cfg.n_min; n <= ctx.cfg.n_max; ++n)
        sets.push_back(&ctx.table.at(n));
    if (ctx.cfg.emit_csv)
        write_text_file((std::filesystem::path(ctx.cfg.out_dir) /
                         "periodic_points.csv")
                            .string(),
                        periodic_points_csv(sets));
    ordered_json j = base_summary(ctx, "periodic-points");
    ordered_json levels = ordered_json::array();
    bool any_incomplete = false;
    for (const PeriodicSet* s : sets) {
        ordered_json lj = report_json(s->report);
        lj["n"] = s->n;
        levels.push_back(std::move(lj));
        if (!s->report.complete) any_incomplete = true;
    }
    j["levels"] = std::move(levels);
    j["warnings"] = ordered_json::array();
    if (any_incomplete)
        j["warnings"].push_back("some enumerations are incomplete");
    emit_summary(ctx, j);
    store_fresh_sets(ctx);
    for (const PeriodicSet* s : sets)
        std::cout << "n = " << s->n << ": " << s->report.found << " / "
                  << s->report.expected << " points"
                  << (s->report.complete ? "" : " (incomplete)") << "\n";
    return 0;
}

int cmd_pressure_pp(RunContext& ctx) {
    const PressureEstimate est = run_pp(ctx);
    if (ctx.cfg.emit_csv)
        write_text_file(
            (std::filesystem::path(ctx.cfg.out_dir) / "pp_series.csv")
                .string(),
            pp_series_csv(est));
    ordered_json j = base_summary(ctx, "pressure-pp");
    j["pressure_pp"] = estimate_json(est);
    j["warnings"] = est.diagnostics.warnings;
    emit_summary(ctx, j);
    store_fresh_sets(ctx);
    std::cout << "periodic-point pressure = " << format_double(est.value)
              << " (window " << est.window << ", c = "
              << format_double(est.diagnostics.c) << ")\n";
    return 0;
}

int cmd_pressure_sep(RunContext& ctx) {
    const auto ests = run_sep(ctx);
    if (ctx.cfg.emit_csv)
        write_text_file(
            (std::filesystem::path(ctx.cfg.out_dir) / "sep_series.csv")
                .string(),
            sep_series_csv(ests));
    ordered_json j = base_summary(ctx, "pressure-sep");
    ordered_json arr = ordered_json::array();
    ordered_json warnings = ordered_json::array();
    for (const auto& est : ests) {
        arr.push_back(estimate_json(est));
        for (const auto& w : est.diagnostics.warnings)
            warnings.push_back("epsilon = " +
                               format_double(est.diagnostics.epsilon) + ": " +
                               w);
    }
    j["pressure_sep"] = std::move(arr);
    j["warnings"] = std::move(warnings);
    emit_summary(ctx, j);
    store_fresh_sets(ctx);
    for (const auto& est : ests)
        std::cout << "separated pressure (epsilon = "
                  << format_double(est.diagnostics.epsilon)
                  << ") = " << format_double(est.value) << "\n";
    return 0;
}

int cmd_bowen(RunContext& ctx) {
    const double c_final = ctx.cfg.c_schedule.back();
    const FilterParams params(ctx.cfg.alpha, c_final);
    const BowenResult r =
        bowen_root(ctx.table, params, ctx.cfg.n_min, ctx.cfg.n_max,
                   ctx.cfg.bracket_lo, ctx.cfg.bracket_hi,
                   BowenOptions{ctx.cfg.bowen_tol, 200, nullptr, 0.0});
    if (ctx.cfg.emit_json)
        write_text_file(
            (std::filesystem::path(ctx.cfg.out_dir) / "bowen.json").string(),
            bowen_json(r, ctx.cfg.alpha, c_final).dump(2) + "\n");
    if (ctx.cfg.emit_csv) {
        const auto path =
            (std::filesystem::path(ctx.cfg.out_dir) / "bowen_sweep.csv")
                .string();
        std::string text;
        if (!std::filesystem::exists(path)) text = bowen_sweep_csv_header();
        text += bowen_sweep_csv_row(r, ctx.cfg.alpha, c_final);
        // Append semantics: pull existing content first.
        if (std::filesystem::exists(path)) {
            std::ifstream in(path, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            text = ss.str() + text;
        }
        write_text_file(path, text);
    }
    ordered_json j = base_summary(ctx, "bowen");
    j["bowen"] = bowen_json(r, ctx.cfg.alpha, c_final);
    j["warnings"] = ordered_json::array();
    if (r.incomplete_basis)
        j["warnings"].push_back(
            "no complete enumeration in range; used largest level");
    emit_summary(ctx, j);
    store_fresh_sets(ctx);
    std::cout << "bowen root t* = " << format_double(r.t_star) << " (n = "
              << r.n_used << ", residual = " << format_double(r.residual)
              << ")\n";
    return 0;
}

int cmd_compare(RunContext& ctx) {
    const PressureEstimate pp = run_pp(ctx);
    const auto seps = run_sep(ctx);
    const PressureEstimate& sep_best = seps.back();  // smallest epsilon

    if (ctx.cfg.emit_csv) {
        const std::filesystem::path dir(ctx.cfg.out_dir);
        write_text_file((dir / "pp_series.csv").string(),
                        pp_series_csv(pp));
        write_text_file((dir / "sep_series.csv").string(),
                        sep_series_csv(seps));
        write_text_file((dir / "compare.csv").string(),
                        compare_csv(pp, sep_best));
    }

    ordered_json j = base_summary(ctx, "compare");
    j["pressure_pp"] = estimate_json(pp);
    ordered_json arr = ordered_json::array();
    for (const auto& est : seps) arr.push_back(estimate_json(est));
    j["pressure_sep"] = std::move(arr);
    j["difference"] = pp.value - sep_best.value;

    // Finite-level bound: the filtered periodic sum at level n should not
    // exceed the separated sum at the same level by more than the margin.
    const int n_check = std::min(10, ctx.cfg.n_max);
    const double margin = 0.1;
    ordered_json bound;
    const PressureSeriesEntry* ppn = nullptr;
    const PressureSeriesEntry* sepn = nullptr;
    for (const auto& e : pp.series)
        if (e.n == n_check) ppn = &e;
    for (const auto& e : sep_best.series)
        if (e.n == n_check) sepn = &e;
    if (ppn && sepn) {
        bound = {{"n", n_check},
                 {"pp_value", ppn->value},
                 {"sep_value", sepn->value},
                 {"margin", margin},
                 {"satisfied", ppn->value <= sepn->value + margin}};
    }
    j["level_bound_check"] = std::move(bound);

    ordered_json warnings = ordered_json::array();
    for (const auto& w : pp.diagnostics.warnings) warnings.push_back(w);
    for (const auto& est : seps)
        for (const auto& w : est.diagnostics.warnings)
            warnings.push_back("epsilon = " +
                               format_double(est.diagnostics.epsilon) + ": " +
                               w);
    j["warnings"] = std::move(warnings);
    emit_summary(ctx, j);
    store_fresh_sets(ctx);
    std::cout << "pp = " << format_double(pp.value)
              << ", sep = " << format_double(sep_best.value)
              << ", difference = "
              << format_double(pp.value - sep_best.value) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "pressure and dimension estimates for holomorphic maps via "
        "periodic points"};
    app.require_subcommand(1);

    CliOverrides ov;
    auto* c_pp = app.add_subcommand("periodic-points",
                                    "enumerate periodic points and report "
                                    "completeness");
    auto* c_ppr = app.add_subcommand("pressure-pp",
                                     "periodic-point pressure along the c "
                                     "schedule");
    auto* c_sep = app.add_subcommand("pressure-sep",
                                     "separated-set pressure series");
    auto* c_bow = app.add_subcommand("bowen",
                                     "solve pressure(-t log|f'|) = 0");
    auto* c_cmp = app.add_subcommand("compare",
                                     "both pressure estimates plus their "
                                     "difference");
    for (auto* cmd : {c_pp, c_ppr, c_sep, c_bow, c_cmp})
        add_common_options(cmd, ov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        RunContext ctx = make_context(load_config(ov));
        if (c_pp->parsed()) return cmd_periodic_points(ctx);
        if (c_ppr->parsed()) return cmd_pressure_pp(ctx);
        if (c_sep->parsed()) return cmd_pressure_sep(ctx);
        if (c_bow->parsed()) return cmd_bowen(ctx);
        if (c_cmp->parsed()) return cmd_compare(ctx);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
