// spadep: dependency analysis between time-series variables from the command line.
//
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spadep/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

spadep::PhaseLabel parse_phase(const std::string& text) {
    if (text == "team_a_attacking") return spadep::PhaseLabel::TeamAAttacking;
    if (text == "team_b_attacking") return spadep::PhaseLabel::TeamBAttacking;
    if (text == "transition") return spadep::PhaseLabel::Transition;
    throw spadep::Error(spadep::ErrorCode::ConfigError, "unknown phase '" + text + "'");
}

// Schema file (JSON): column names, team rosters, phase and resampling step.
spadep::CsvRunOptions load_schema(const std::filesystem::path& csv, const std::filesystem::path& schema_path) {
    spadep::CsvRunOptions opts;
    opts.path = csv;
    if (schema_path.empty()) return opts;

    std::ifstream in(schema_path);
    if (!in) throw spadep::Error(spadep::ErrorCode::ConfigError, "cannot open schema " + schema_path.string());
    nlohmann::json j;
    try {
        in >> j;
        auto& s = opts.schema;
        s.time_col = j.value("time_col", s.time_col);
        s.entity_col = j.value("entity_col", s.entity_col);
        s.x_col = j.value("x_col", s.x_col);
        s.y_col = j.value("y_col", s.y_col);
        if (j.contains("event_col")) {
            if (j["event_col"].is_null()) {
                s.event_col.reset();
            } else {
                s.event_col = j["event_col"].get<std::string>();
            }
        }
        opts.team_a = j.value("team_a", std::vector<std::string>{});
        opts.team_b = j.value("team_b", std::vector<std::string>{});
        opts.phase = parse_phase(j.value("phase", std::string("team_a_attacking")));
        opts.resample_dt = j.value("resample_dt", opts.resample_dt);
        opts.sides.half_boundary = j.value("half_boundary", opts.sides.half_boundary);
        opts.sides.team_b_defends_positive = j.value("team_b_defends_positive", opts.sides.team_b_defends_positive);
    } catch (const nlohmann::json::exception& e) {
        throw spadep::Error(spadep::ErrorCode::ConfigError, "schema " + schema_path.string() + ": " + e.what());
    }
    return opts;
}

void print_summary(const spadep::RunSummary& s) {
    for (const auto& ts : s.taus) {
        std::printf("tau=%lld\n", static_cast<long long>(ts.tau));
        for (const auto& p : ts.pairs) {
            std::printf("  %s->%s  mean delta_rowvar % .4f (incorrect %d)  mean delta_schatten % .4f (incorrect %d)\n",
                        p.from.c_str(), p.to.c_str(), p.mean_delta_rowvar, p.incorrect_rowvar,
                        p.mean_delta_schatten, p.incorrect_schatten);
        }
    }
    for (const auto& pt : s.prefix_sweep) {
        std::printf("prefix %lld: delta_rowvar(0,1) % .4f  delta_schatten(0,1) % .4f\n",
                    static_cast<long long>(pt.length), pt.mean.delta_rowvar(0, 1), pt.mean.delta_schatten(0, 1));
    }
    std::printf("realisations: %d completed, %d failed; %.2f s\n", s.completed, s.failed, s.wall_seconds);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SPA-based dependency measures between time series"};
    app.set_version_flag("--version", std::string(SPADEP_TOOL_VERSION));

    std::string mode = "logistic";
    std::string route = "spa1";
    spadep::RunConfig cfg;
    std::optional<spadep::Index> k;
    std::optional<spadep::Index> length;
    std::vector<spadep::Index> taus;
    bool diff = false;
    bool no_diff = false;
    std::string csv_path;
    std::string schema_path;
    std::string out_dir;
    std::vector<spadep::Index> prefixes;

    app.add_option("--mode", mode, "logistic | sde | ar | csv")
        ->check(CLI::IsMember({"logistic", "sde", "ar", "csv"}))
        ->capture_default_str();
    app.add_option("--k", k, "landmarks per variable (default 10; csv uses the 7 fixed court landmarks)");
    app.add_option("--tau", taus, "time shift(s), comma separated (default 1)")->delimiter(',');
    app.add_option("--t", length, "series length; SDE steps in sde mode");
    app.add_option("--realisations", cfg.realisations, "Monte-Carlo repetitions")->capture_default_str();
    app.add_option("--seed", cfg.seed, "base seed")->capture_default_str();
    auto* diff_flag = app.add_flag("--diff", diff, "analyze first differences (default on for sde)");
    app.add_flag("--no-diff", no_diff, "analyze raw values")->excludes(diff_flag);
    app.add_option("--csv", csv_path, "tracking CSV (csv mode)");
    app.add_option("--schema", schema_path, "JSON schema for the tracking CSV");
    app.add_option("--out", out_dir, "output directory for report.json and CSV tables");
    app.add_option("--prefix-sweep", prefixes, "prefix lengths for Lambda refits, comma separated")->delimiter(',');
    app.add_option("--jobs", cfg.jobs, "worker threads")->capture_default_str();
    app.add_option("--restarts", cfg.restarts, "SPA I restarts")->capture_default_str();
    app.add_option("--max-iters", cfg.max_iters, "SPA I iteration cap")->capture_default_str();
    app.add_option("--affiliations", route, "spa1 | rho")
        ->check(CLI::IsMember({"spa1", "rho"}))
        ->capture_default_str();
    app.add_option("--sde-sigma", cfg.sde_sigma_ab, "noise level of A and B in sde mode")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        cfg.mode = spadep::parse_mode(mode);
        cfg.route = spadep::parse_route(route);
        if (k) cfg.k = *k;
        if (!taus.empty()) cfg.taus = taus;
        if (diff) cfg.difference_series = true;
        if (no_diff) cfg.difference_series = false;
        cfg.length = length;
        cfg.prefix_lengths = prefixes;
        cfg.output_dir = out_dir;
        if (cfg.mode == spadep::Mode::Csv) {
            if (csv_path.empty()) throw spadep::Error(spadep::ErrorCode::ConfigError, "csv mode requires --csv");
            cfg.csv = load_schema(csv_path, schema_path);
            cfg.k = spadep::half_court_landmarks().count();
        } else if (!csv_path.empty()) {
            throw spadep::Error(spadep::ErrorCode::ConfigError, "--csv is only valid with --mode csv");
        }
        cfg.validate();
    } catch (const spadep::Error& e) {
        std::cerr << "spadep: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const auto summary = spadep::run(cfg);
        print_summary(summary);
        if (!cfg.output_dir.empty()) spadep::emit_report(cfg, summary, cfg.output_dir);
    } catch (const spadep::Error& e) {
        std::cerr << "spadep: " << e.what() << '\n';
        return e.code() == spadep::ErrorCode::ConfigError ? kExitConfig : kExitData;
    } catch (const std::exception& e) {
        std::cerr << "spadep: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
