#include "spadep/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "spadep/generators.hpp"
#include "spadep/random.hpp"

#ifndef SPADEP_VERSION
#define SPADEP_VERSION "unknown"
#endif

namespace spadep {

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kArMaxAttempts = 10;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return CounterRng::mix(seed ^ CounterRng::mix(a * 0xD1B54A32D192ED03ULL + b + 1));
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

AffiliationSeries affiliations_for(const TimeSeriesMatrix& variable, const Spa1Solution& sol, AffiliationRoute route) {
    if (route == AffiliationRoute::RhoSequence) return rho_sequence(variable, sol.landmarks);
    return sol.affiliations;
}

DependencyReport mean_report(const std::vector<DependencyReport>& reports) {
    DependencyReport mean = reports.front();
    for (std::size_t r = 1; r < reports.size(); ++r) {
        mean.m_schatten += reports[r].m_schatten;
        mean.m_rowvar += reports[r].m_rowvar;
        mean.delta_schatten += reports[r].delta_schatten;
        mean.delta_rowvar += reports[r].delta_rowvar;
    }
    const auto n = static_cast<double>(reports.size());
    mean.m_schatten /= n;
    mean.m_rowvar /= n;
    mean.delta_schatten /= n;
    mean.delta_rowvar /= n;
    return mean;
}

int expected_sign(Mode mode, const std::string& from, const std::string& to) {
    switch (mode) {
    case Mode::Logistic: return (from == "X" && to == "Y") ? 1 : (from == "Y" && to == "X") ? -1 : 0;
    case Mode::Sde: {
        // C drives B, B drives A, and both drive A: the later letter dominates.
        if (from.size() != 1 || to.size() != 1 || from == to) return 0;
        return from < to ? -1 : 1;
    }
    case Mode::Ar: return (from == "X" && to == "Y") ? -1 : (from == "Y" && to == "X") ? 1 : 0;
    case Mode::Csv: return 0;
    }
    return 0;
}

bool is_incorrect(int expected, double delta) {
    if (expected > 0) return !(delta > 0.0);
    if (expected < 0) return !(delta < 0.0);
    return false;
}

nlohmann::ordered_json matrix_json(const Matrix& m) {
    auto rows = nlohmann::ordered_json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::ordered_json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::ordered_json report_fields(const DependencyReport& r) {
    nlohmann::ordered_json j;
    j["m_schatten"] = matrix_json(r.m_schatten);
    j["m_rowvar"] = matrix_json(r.m_rowvar);
    j["delta_schatten"] = matrix_json(r.delta_schatten);
    j["delta_rowvar"] = matrix_json(r.delta_rowvar);
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

std::string_view to_string(Mode mode) noexcept {
    switch (mode) {
    case Mode::Logistic: return "logistic";
    case Mode::Sde: return "sde";
    case Mode::Ar: return "ar";
    case Mode::Csv: return "csv";
    }
    return "unknown";
}

Mode parse_mode(std::string_view text) {
    if (text == "logistic") return Mode::Logistic;
    if (text == "sde") return Mode::Sde;
    if (text == "ar") return Mode::Ar;
    if (text == "csv") return Mode::Csv;
    throw Error(ErrorCode::ConfigError, "unknown mode '" + std::string(text) + "'");
}

std::string_view to_string(AffiliationRoute route) noexcept {
    return route == AffiliationRoute::Spa1 ? "spa1" : "rho";
}

AffiliationRoute parse_route(std::string_view text) {
    if (text == "spa1") return AffiliationRoute::Spa1;
    if (text == "rho") return AffiliationRoute::RhoSequence;
    throw Error(ErrorCode::ConfigError, "unknown affiliation route '" + std::string(text) + "'");
}

SyntheticRealisation generate_realisation(const RunConfig& cfg, std::uint64_t seed) {
    SyntheticRealisation out;
    switch (cfg.mode) {
    case Mode::Logistic: {
        LogisticConfig lc;
        lc.length = cfg.series_length();
        const auto series = gen_logistic(lc);
        out.names = {"X", "Y"};
        out.variables = {series.row_block(0, 1), series.row_block(1, 1)};
        break;
    }
    case Mode::Sde: {
        SdeConfig sc;
        sc.steps = cfg.series_length();
        sc.sigma_ab = cfg.sde_sigma_ab;
        sc.seed = seed;
        auto traj = gen_sde(sc);
        out.names = {"A", "B", "C"};
        out.variables = {std::move(traj.a), std::move(traj.b), std::move(traj.c)};
        break;
    }
    case Mode::Ar: {
        ArConfig ac;
        ac.length = cfg.series_length();
        std::optional<TimeSeriesMatrix> series;
        for (int attempt = 0; attempt < kArMaxAttempts && !series; ++attempt) {
            ac.seed = derive_seed(seed, static_cast<std::uint64_t>(attempt), 7);
            try {
                series = gen_ar(ac);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DivergenceDetected) throw;
            }
        }
        if (!series) throw Error(ErrorCode::DivergenceDetected, "AR draws diverged on every attempt");
        // The zero start-up block is not part of the process.
        const auto body = series->time_window(ac.order, ac.length - ac.order);
        out.names = {"X", "Y"};
        out.variables = {body.row_block(0, ac.block_dim), body.row_block(ac.block_dim, ac.block_dim)};
        break;
    }
    case Mode::Csv: throw Error(ErrorCode::ConfigError, "csv mode has no generator");
    }
    if (cfg.differencing()) {
        for (auto& v : out.variables) v = v.differenced();
    }
    return out;
}

Index RunConfig::series_length() const {
    if (length) return *length;
    switch (mode) {
    case Mode::Logistic: return 1800;
    case Mode::Sde: return 1000;
    case Mode::Ar: return 1000;
    case Mode::Csv: return 0;
    }
    return 0;
}

void RunConfig::validate() const {
    if (k < 2) throw Error(ErrorCode::ConfigError, "K must be at least 2");
    if (taus.empty()) throw Error(ErrorCode::ConfigError, "at least one tau is required");
    for (Index t : taus) {
        if (t < 0) throw Error(ErrorCode::ConfigError, "tau must be non-negative");
    }
    if (realisations < 1) throw Error(ErrorCode::ConfigError, "realisations must be at least 1");
    if (jobs < 1) throw Error(ErrorCode::ConfigError, "jobs must be at least 1");
    if (restarts < 1 || max_iters < 1) throw Error(ErrorCode::ConfigError, "restarts and max_iters must be positive");
    if (length && *length < 2) throw Error(ErrorCode::ConfigError, "series length must be at least 2");
    if (mode == Mode::Csv) {
        if (!csv) throw Error(ErrorCode::ConfigError, "csv mode requires --csv and a schema");
        if (!prefix_lengths.empty()) throw Error(ErrorCode::ConfigError, "prefix sweep is not available in csv mode");
    } else {
        Index usable = series_length() - (differencing() ? 1 : 0);
        if (mode == Mode::Ar) usable -= ArConfig{}.order;
        for (Index p : prefix_lengths) {
            if (p < 2 || p > usable) throw Error(ErrorCode::ConfigError, "prefix length outside the series");
        }
    }
    if (!(sde_sigma_ab >= 0.0)) throw Error(ErrorCode::ConfigError, "SDE noise must be non-negative");
}

AnalysisResult analyze_variables(const std::vector<TimeSeriesMatrix>& variables, const std::vector<std::string>& names,
                                 const AnalysisOptions& options) {
    const std::size_t n = variables.size();
    if (n == 0 || names.size() != n) throw Error(ErrorCode::DimensionMismatch, "one name per variable required");
    for (const auto& v : variables) {
        if (v.length() != variables.front().length()) {
            throw Error(ErrorCode::DimensionMismatch, "variables have different lengths");
        }
    }

    std::vector<std::optional<AffiliationSeries>> gammas(n);
    AnalysisResult result;
    result.names = names;
    result.spa1_objective.assign(n, 0.0);
    parallel_for(n, options.jobs, [&](std::size_t v) {
        Spa1Config cfg;
        cfg.k = options.k;
        cfg.restarts = options.restarts;
        cfg.max_iters = options.max_iters;
        cfg.seed = derive_seed(options.seed, v, 1);
        const auto sol = fit_spa1(variables[v], cfg);
        result.spa1_objective[v] = sol.objective;
        gammas[v] = affiliations_for(variables[v], sol, options.route);
    });

    auto fit_all = [&](Index tau, Index prefix) {
        FitTable table(n, std::vector<std::optional<LambdaFit>>(n));
        parallel_for(n * n, options.jobs, [&](std::size_t idx) {
            const std::size_t i = idx / n;
            const std::size_t j = idx % n;
            if (prefix > 0) {
                table[i][j] = fit_lambda(gammas[i]->time_window(0, prefix), gammas[j]->time_window(0, prefix), tau);
            } else {
                table[i][j] = fit_lambda(*gammas[i], *gammas[j], tau);
            }
        });
        return table;
    };

    for (Index tau : options.taus) {
        const auto table = fit_all(tau, 0);
        result.reports.push_back(build_report(table, names));
        Matrix residual(static_cast<Index>(n), static_cast<Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) residual(static_cast<Index>(i), static_cast<Index>(j)) = table[i][j]->residual;
        }
        result.residuals.push_back(std::move(residual));
    }
    for (Index prefix : options.prefix_lengths) {
        result.prefix_reports.push_back(build_report(fit_all(options.taus.front(), prefix), names));
    }
    return result;
}

AnalysisResult analyze_tracking(const CsvRunOptions& csv, const std::vector<Index>& taus, int jobs) {
    const auto raw = load_csv(csv.path, csv.schema);
    std::vector<PhaseLabel> labels;
    labels.reserve(raw.size());
    for (const auto& f : raw) labels.push_back(classify_phase(f, csv.team_a, csv.team_b, csv.sides));
    const auto segments = segment_by(reflect_half_court(raw), labels, csv.phase, csv.resample_dt);

    std::set<std::string> seen;
    for (const auto& seg : segments) {
        for (const auto& f : seg.frames) {
            for (const auto& [id, pos] : f.entities) seen.insert(id);
        }
    }
    std::vector<std::string> names;
    for (const auto* team : {&csv.team_a, &csv.team_b}) {
        for (const auto& id : *team) {
            if (seen.contains(id)) names.push_back(id);
        }
    }
    if (csv.team_a.empty() && csv.team_b.empty()) names.assign(seen.begin(), seen.end());
    if (names.size() < 2) throw Error(ErrorCode::EmptySelection, "fewer than two entities in the selected phase");

    const auto landmarks = half_court_landmarks();
    auto affiliations = [&](const Matrix& block) { return solve_gamma(TimeSeriesMatrix(block), landmarks); };
    const auto per_entity = entity_segments(segments);

    const std::size_t n = names.size();
    AnalysisResult result;
    result.names = names;
    result.spa1_objective.assign(n, 0.0);
    for (Index tau : taus) {
        FitTable table(n, std::vector<std::optional<LambdaFit>>(n));
        parallel_for(n * n, jobs, [&](std::size_t idx) {
            const std::size_t i = idx / n;
            const std::size_t j = idx % n;
            std::vector<SegmentedAffiliationPair::Segment> pieces;
            if (i == j) {
                for (const auto& block : per_entity.at(names[i])) {
                    auto g = affiliations(block);
                    pieces.emplace_back(g, g);
                }
            } else {
                for (const auto& [a, b] : paired_segments(segments, names[i], names[j])) {
                    pieces.emplace_back(affiliations(a), affiliations(b));
                }
            }
            const SegmentedAffiliationPair pair(std::move(pieces), tau);
            if (pair.segments().empty()) {
                if (i == j) return;
                throw Error(ErrorCode::InsufficientData, "no shared stretch longer than tau for " + names[i] +
                                                             " and " + names[j]);
            }
            table[i][j] = fit_lambda_segmented(pair);
        });
        result.reports.push_back(build_report(table, names));
        Matrix residual = Matrix::Zero(static_cast<Index>(n), static_cast<Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (table[i][j]) residual(static_cast<Index>(i), static_cast<Index>(j)) = table[i][j]->residual;
            }
        }
        result.residuals.push_back(std::move(residual));
    }
    for (std::size_t v = 0; v < n; ++v) {
        double sq = 0.0;
        for (const auto& block : per_entity.at(names[v])) {
            sq += std::pow(representation_error(TimeSeriesMatrix(block), landmarks, affiliations(block)), 2);
        }
        result.spa1_objective[v] = std::sqrt(sq);
    }
    return result;
}

RunSummary run(const RunConfig& config) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    const auto count = static_cast<std::size_t>(config.realisations);

    std::vector<std::optional<AnalysisResult>> results(count);
    std::vector<std::string> failures(count);
    RunSummary summary;
    for (std::size_t r = 0; r < count; ++r) summary.realisation_seeds.push_back(derive_seed(config.seed, r, 0));

    const int inner_jobs = count > 1 ? 1 : config.jobs;
    parallel_for(count, config.jobs, [&](std::size_t r) {
        try {
            if (config.mode == Mode::Csv) {
                results[r] = analyze_tracking(*config.csv, config.taus, inner_jobs);
                return;
            }
            auto data = generate_realisation(config, summary.realisation_seeds[r]);
            AnalysisOptions opts;
            opts.k = config.k;
            opts.taus = config.taus;
            opts.restarts = config.restarts;
            opts.max_iters = config.max_iters;
            opts.route = config.route;
            opts.seed = summary.realisation_seeds[r];
            opts.jobs = inner_jobs;
            opts.prefix_lengths = config.prefix_lengths;
            results[r] = analyze_variables(data.variables, data.names, opts);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::IoError ||
                e.code() == ErrorCode::SchemaError || e.code() == ErrorCode::ParseError) {
                throw;
            }
            failures[r] = e.what();
        }
    });

    std::vector<const AnalysisResult*> done;
    for (std::size_t r = 0; r < count; ++r) {
        if (results[r]) {
            done.push_back(&*results[r]);
            summary.spa1_objectives.push_back(results[r]->spa1_objective);
        } else {
            ++summary.failed;
            std::cerr << "warning: realisation " << r << " failed: " << failures[r] << '\n';
        }
    }
    summary.completed = static_cast<int>(done.size());
    if (done.empty()) throw Error(ErrorCode::DegenerateInput, "every realisation failed; first: " + failures.front());

    summary.variable_names = done.front()->names;
    const auto& names = summary.variable_names;
    for (std::size_t ti = 0; ti < config.taus.size(); ++ti) {
        TauSummary ts;
        ts.tau = config.taus[ti];
        for (const auto* res : done) {
            ts.per_realisation.push_back(res->reports[ti]);
            ts.residuals.push_back(res->residuals[ti]);
        }
        ts.mean = mean_report(ts.per_realisation);
        for (std::size_t i = 0; i < names.size(); ++i) {
            for (std::size_t j = i + 1; j < names.size(); ++j) {
                PairSummary ps;
                ps.from = names[i];
                ps.to = names[j];
                ps.expected_sign = expected_sign(config.mode, ps.from, ps.to);
                for (const auto& rep : ts.per_realisation) {
                    const double ds = rep.delta_schatten(static_cast<Index>(i), static_cast<Index>(j));
                    const double dv = rep.delta_rowvar(static_cast<Index>(i), static_cast<Index>(j));
                    ps.delta_schatten.push_back(ds);
                    ps.delta_rowvar.push_back(dv);
                    ps.incorrect_schatten += is_incorrect(ps.expected_sign, ds) ? 1 : 0;
                    ps.incorrect_rowvar += is_incorrect(ps.expected_sign, dv) ? 1 : 0;
                }
                ps.mean_delta_schatten = ts.mean.delta_schatten(static_cast<Index>(i), static_cast<Index>(j));
                ps.mean_delta_rowvar = ts.mean.delta_rowvar(static_cast<Index>(i), static_cast<Index>(j));
                ts.pairs.push_back(std::move(ps));
            }
        }
        summary.taus.push_back(std::move(ts));
    }
    for (std::size_t p = 0; p < config.prefix_lengths.size(); ++p) {
        std::vector<DependencyReport> reps;
        for (const auto* res : done) reps.push_back(res->prefix_reports[p]);
        summary.prefix_sweep.push_back(PrefixPoint{config.prefix_lengths[p], mean_report(reps)});
    }

    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return summary;
}

std::string table_csv(const Matrix& table, const std::vector<std::string>& names) {
    std::ostringstream out;
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "from\\to";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (Index i = 0; i < table.rows(); ++i) {
        out << names[static_cast<std::size_t>(i)];
        for (Index j = 0; j < table.cols(); ++j) out << ',' << table(i, j);
        out << '\n';
    }
    return out.str();
}

std::string report_json(const RunConfig& config, const RunSummary& summary) {
    using json = nlohmann::ordered_json;
    json root;
    root["schema_version"] = kSchemaVersion;
    root["tool"] = "spadep";
    root["version"] = SPADEP_VERSION;
    root["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION);

    json cfg;
    cfg["mode"] = to_string(config.mode);
    cfg["k"] = config.mode == Mode::Csv ? half_court_landmarks().count() : config.k;
    cfg["tau"] = config.taus;
    cfg["difference_series"] = config.differencing();
    cfg["realisations"] = config.realisations;
    cfg["seed"] = config.seed;
    cfg["length"] = config.series_length();
    cfg["prefix_lengths"] = config.prefix_lengths;
    cfg["restarts"] = config.restarts;
    cfg["max_iters"] = config.max_iters;
    cfg["affiliations"] = to_string(config.route);
    if (config.mode == Mode::Sde) cfg["sde_sigma_ab"] = config.sde_sigma_ab;
    if (config.csv) {
        json c;
        c["path"] = config.csv->path.filename().string();
        c["time_col"] = config.csv->schema.time_col;
        c["entity_col"] = config.csv->schema.entity_col;
        c["x_col"] = config.csv->schema.x_col;
        c["y_col"] = config.csv->schema.y_col;
        c["event_col"] = config.csv->schema.event_col ? json(*config.csv->schema.event_col) : json(nullptr);
        c["team_a"] = config.csv->team_a;
        c["team_b"] = config.csv->team_b;
        c["phase"] = to_string(config.csv->phase);
        c["resample_dt"] = config.csv->resample_dt;
        cfg["csv"] = std::move(c);
    }
    root["config"] = std::move(cfg);

    root["variables"] = summary.variable_names;
    root["realisations_completed"] = summary.completed;
    root["realisations_failed"] = summary.failed;
    root["realisation_seeds"] = summary.realisation_seeds;
    root["spa1_objective"] = summary.spa1_objectives;

    json results = json::array();
    for (const auto& ts : summary.taus) {
        json t;
        t["tau"] = ts.tau;
        t["mean"] = report_fields(ts.mean);
        json pairs = json::array();
        for (const auto& p : ts.pairs) {
            json pj;
            pj["from"] = p.from;
            pj["to"] = p.to;
            pj["expected_sign"] = p.expected_sign;
            pj["mean_delta_schatten"] = p.mean_delta_schatten;
            pj["mean_delta_rowvar"] = p.mean_delta_rowvar;
            pj["incorrect_schatten"] = p.incorrect_schatten;
            pj["incorrect_rowvar"] = p.incorrect_rowvar;
            pj["delta_schatten"] = p.delta_schatten;
            pj["delta_rowvar"] = p.delta_rowvar;
            pairs.push_back(std::move(pj));
        }
        t["pairs"] = std::move(pairs);
        json reals = json::array();
        for (std::size_t r = 0; r < ts.per_realisation.size(); ++r) {
            json rj = report_fields(ts.per_realisation[r]);
            rj["residual"] = matrix_json(ts.residuals[r]);
            reals.push_back(std::move(rj));
        }
        t["realisations"] = std::move(reals);
        results.push_back(std::move(t));
    }
    root["results"] = std::move(results);

    json sweep = json::array();
    for (const auto& p : summary.prefix_sweep) {
        json pj = report_fields(p.mean);
        pj["length"] = p.length;
        sweep.push_back(std::move(pj));
    }
    root["prefix_sweep"] = std::move(sweep);
    return root.dump(2) + "\n";
}

void emit_report(const RunConfig& config, const RunSummary& summary, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

    write_file(dir / "report.json", report_json(config, summary));
    for (const auto& ts : summary.taus) {
        std::filesystem::path target = dir;
        if (summary.taus.size() > 1) {
            target = dir / ("tau_" + std::to_string(ts.tau));
            std::filesystem::create_directories(target, ec);
            if (ec) throw Error(ErrorCode::IoError, "cannot create " + target.string() + ": " + ec.message());
        }
        write_file(target / "m_schatten.csv", table_csv(ts.mean.m_schatten, summary.variable_names));
        write_file(target / "m_rowvar.csv", table_csv(ts.mean.m_rowvar, summary.variable_names));
        write_file(target / "delta_schatten.csv", table_csv(ts.mean.delta_schatten, summary.variable_names));
        write_file(target / "delta_rowvar.csv", table_csv(ts.mean.delta_rowvar, summary.variable_names));
    }
}

}  // namespace spadep
