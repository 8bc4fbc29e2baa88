#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spadep/generators.hpp"
#include "spadep/types.hpp"

namespace spadep {

/// Positions reported for players off the court; such rows are discarded.
inline constexpr Point2 kBenchSentinel = {-48.5, -27.5};

struct TrackingFrame {
    double time = 0.0;  ///< seconds
    std::map<std::string, Point2> entities;  ///< id -> (x, y) in ft
    int event_id = 0;
};

enum class PhaseLabel { TeamAAttacking, TeamBAttacking, Transition };

std::string_view to_string(PhaseLabel label) noexcept;

struct CsvSchema {
    std::string time_col = "time";
    std::string entity_col = "entity";
    std::string x_col = "x";
    std::string y_col = "y";
    std::optional<std::string> event_col = "event";
};

/// Reads a tracking CSV (header row, '.' decimal point, any row order) into
/// frames sorted by time. Without an event column every frame is event 0.
/// Throws SchemaError for missing columns, ParseError(row) for bad numbers,
/// IoError when the file cannot be opened.
[[nodiscard]] std::vector<TrackingFrame> load_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Replaces every x by |x|.
[[nodiscard]] std::vector<TrackingFrame> reflect_half_court(std::vector<TrackingFrame> frames);

struct CourtSides {
    double half_boundary = 0.0;
    /// Team B defends the half x > half_boundary (so team A attacks there).
    bool team_b_defends_positive = true;
};

/// TeamAAttacking when at least 9 of the 10 listed on-court players stand in
/// team B's half, TeamBAttacking for the mirror case, Transition otherwise
/// (including frames without exactly 10 listed players present). Apply to
/// unreflected coordinates.
[[nodiscard]] PhaseLabel classify_phase(const TrackingFrame& frame, const std::vector<std::string>& team_a,
                                        const std::vector<std::string>& team_b, const CourtSides& sides = {});

/// A maximal run of frames with one phase label and one event id, resampled.
struct PlaySegment {
    int event_id = 0;
    std::vector<TrackingFrame> frames;
};

/// Maximal runs of consecutive frames labelled `phase` with constant event id,
/// each resampled every `resample_dt` seconds by nearest-frame selection
/// (resample_dt <= 0 keeps every frame). Throws EmptySelection if nothing is
/// selected.
[[nodiscard]] std::vector<PlaySegment> segment_by(const std::vector<TrackingFrame>& frames,
                                                  const std::vector<PhaseLabel>& labels, PhaseLabel phase,
                                                  double resample_dt);

/// Per entity: 2 x T_k position blocks for every contiguous stretch in which
/// the entity is present within a segment.
[[nodiscard]] std::map<std::string, std::vector<Matrix>> entity_segments(const std::vector<PlaySegment>& segments);

/// Aligned 2 x T_k blocks for two entities over stretches where both are present.
[[nodiscard]] std::vector<std::pair<Matrix, Matrix>> paired_segments(const std::vector<PlaySegment>& segments,
                                                                     const std::string& first,
                                                                     const std::string& second);

/// Fixed half-court landmarks (ft), 2 x 7.
[[nodiscard]] LandmarkSet half_court_landmarks();

/// Pearson correlation between X_{t-tau} components (rows) and Y_t components
/// (columns). Throws DegenerateInput naming a constant row.
[[nodiscard]] Matrix pearson_lagged(const TimeSeriesMatrix& x, const TimeSeriesMatrix& y, Index tau);

}  // namespace spadep
