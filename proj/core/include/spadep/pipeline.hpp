#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spadep/ingest.hpp"
#include "spadep/measures.hpp"
#include "spadep/spa.hpp"

namespace spadep {

enum class Mode { Logistic, Sde, Ar, Csv };

/// How affiliations are obtained once landmarks are known.
enum class AffiliationRoute {
    Spa1,         ///< affiliations of the landmark fit itself
    RhoSequence,  ///< gamma_t = rho(X_t, gamma_{t-1})
};

std::string_view to_string(Mode mode) noexcept;
Mode parse_mode(std::string_view text);
std::string_view to_string(AffiliationRoute route) noexcept;
AffiliationRoute parse_route(std::string_view text);

struct CsvRunOptions {
    std::filesystem::path path;
    CsvSchema schema;
    std::vector<std::string> team_a;
    std::vector<std::string> team_b;
    CourtSides sides;
    PhaseLabel phase = PhaseLabel::TeamAAttacking;
    double resample_dt = 1.0;  ///< seconds; tau values count resampled steps
};

struct RunConfig {
    Mode mode = Mode::Logistic;
    Index k = 10;
    std::vector<Index> taus = {1};
    std::optional<bool> difference_series;  ///< default: on for sde, off otherwise
    int realisations = 1;
    std::uint64_t seed = 0;
    std::optional<Index> length;  ///< series length / SDE steps; mode default when absent
    std::vector<Index> prefix_lengths;
    std::filesystem::path output_dir;
    int jobs = 1;
    int restarts = 5;
    int max_iters = 500;
    AffiliationRoute route = AffiliationRoute::Spa1;
    double sde_sigma_ab = 0.2;
    std::optional<CsvRunOptions> csv;

    [[nodiscard]] bool differencing() const { return difference_series.value_or(mode == Mode::Sde); }
    [[nodiscard]] Index series_length() const;
    /// Throws ConfigError.
    void validate() const;
};

/// Per ordered pair (from, to) with from listed before to: delta_{from,to}
/// for every completed realisation.
struct PairSummary {
    std::string from;
    std::string to;
    /// +1 when `from` is known to drive `to` more strongly, -1 for the
    /// reverse, 0 when the mode has no ground truth.
    int expected_sign = 0;
    std::vector<double> delta_schatten;
    std::vector<double> delta_rowvar;
    double mean_delta_schatten = 0.0;
    double mean_delta_rowvar = 0.0;
    int incorrect_schatten = 0;
    int incorrect_rowvar = 0;
};

struct TauSummary {
    Index tau = 0;
    std::vector<DependencyReport> per_realisation;
    std::vector<Matrix> residuals;  ///< training residual of each fit, per realisation
    DependencyReport mean;          ///< element-wise mean over realisations
    std::vector<PairSummary> pairs;
};

struct PrefixPoint {
    Index length = 0;
    DependencyReport mean;
};

struct RunSummary {
    std::vector<std::string> variable_names;
    std::vector<TauSummary> taus;
    std::vector<PrefixPoint> prefix_sweep;
    std::vector<std::uint64_t> realisation_seeds;
    std::vector<std::vector<double>> spa1_objectives;  ///< per realisation, per variable
    int completed = 0;
    int failed = 0;
    double wall_seconds = 0.0;
};

struct AnalysisOptions {
    Index k = 10;
    std::vector<Index> taus = {1};
    int restarts = 5;
    int max_iters = 500;
    AffiliationRoute route = AffiliationRoute::Spa1;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::vector<Index> prefix_lengths;
};

struct AnalysisResult {
    std::vector<std::string> names;
    std::vector<DependencyReport> reports;  ///< one per tau
    std::vector<Matrix> residuals;          ///< one per tau
    std::vector<double> spa1_objective;     ///< one per variable
    std::vector<DependencyReport> prefix_reports;  ///< first tau, one per prefix length
};

struct SyntheticRealisation {
    std::vector<std::string> names;
    std::vector<TimeSeriesMatrix> variables;
};

/// Generated (and, when configured, differenced) variables of one realisation.
/// `seed` is the realisation seed as listed in RunSummary::realisation_seeds.
/// Throws ConfigError in csv mode.
[[nodiscard]] SyntheticRealisation generate_realisation(const RunConfig& config, std::uint64_t seed);

/// Runs the dependency analysis on already-prepared variables.
[[nodiscard]] AnalysisResult analyze_variables(const std::vector<TimeSeriesMatrix>& variables,
                                               const std::vector<std::string>& names,
                                               const AnalysisOptions& options);

/// Tracking-data analysis with fixed half-court landmarks and per-segment fits.
[[nodiscard]] AnalysisResult analyze_tracking(const CsvRunOptions& csv, const std::vector<Index>& taus,
                                              int jobs = 1);

/// Full experiment: generate or load data per realisation, analyze, aggregate.
/// Failed realisations are counted and skipped.
[[nodiscard]] RunSummary run(const RunConfig& config);

/// Writes report.json and the four measure tables (CSV) into `dir`. With more
/// than one tau the tables go to dir/tau_<tau>/.
void emit_report(const RunConfig& config, const RunSummary& summary, const std::filesystem::path& dir);

/// JSON text of the report, as written by emit_report.
[[nodiscard]] std::string report_json(const RunConfig& config, const RunSummary& summary);

/// CSV text of a square table with variable names as header row and column.
[[nodiscard]] std::string table_csv(const Matrix& table, const std::vector<std::string>& names);

}  // namespace spadep
