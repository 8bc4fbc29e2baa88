#include "spadep/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

namespace spadep {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Splits one CSV record; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_record(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back(trim(field));
            field.clear();
        } else {
            field += ch;
        }
    }
    fields.emplace_back(trim(field));
    return fields;
}

double parse_number(std::string_view text, std::size_t row, const std::string& column) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw ParseError(row, "column '" + column + "' is not a finite number: '" + std::string(text) + "'");
    }
    return value;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::SchemaError, "missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

bool is_bench(double x, double y) { return x == kBenchSentinel[0] && y == kBenchSentinel[1]; }

}  // namespace

std::string_view to_string(PhaseLabel label) noexcept {
    switch (label) {
    case PhaseLabel::TeamAAttacking: return "team_a_attacking";
    case PhaseLabel::TeamBAttacking: return "team_b_attacking";
    case PhaseLabel::Transition: return "transition";
    }
    return "unknown";
}

std::vector<TrackingFrame> load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::SchemaError, "missing header row in " + path.string());
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = split_record(line);

    const std::size_t time_idx = column_index(header, schema.time_col);
    const std::size_t entity_idx = column_index(header, schema.entity_col);
    const std::size_t x_idx = column_index(header, schema.x_col);
    const std::size_t y_idx = column_index(header, schema.y_col);
    std::optional<std::size_t> event_idx;
    if (schema.event_col) event_idx = column_index(header, *schema.event_col);

    // Keyed by the exact time value; rows sharing a time form one frame.
    std::map<double, TrackingFrame> by_time;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_record(line);
        if (fields.size() != header.size()) {
            throw ParseError(row, "expected " + std::to_string(header.size()) + " fields, found " +
                                      std::to_string(fields.size()));
        }
        const double time = parse_number(fields[time_idx], row, schema.time_col);
        const double x = parse_number(fields[x_idx], row, schema.x_col);
        const double y = parse_number(fields[y_idx], row, schema.y_col);
        int event = 0;
        if (event_idx) {
            const double ev = parse_number(fields[*event_idx], row, *schema.event_col);
            if (ev < 0.0 || ev != std::floor(ev)) throw ParseError(row, "event id must be a non-negative integer");
            event = static_cast<int>(ev);
        }

        auto [it, inserted] = by_time.try_emplace(time);
        if (inserted) {
            it->second.time = time;
            it->second.event_id = event;
        }
        if (!is_bench(x, y)) it->second.entities[fields[entity_idx]] = {x, y};
    }

    std::vector<TrackingFrame> frames;
    frames.reserve(by_time.size());
    for (auto& [t, frame] : by_time) frames.push_back(std::move(frame));
    return frames;
}

std::vector<TrackingFrame> reflect_half_court(std::vector<TrackingFrame> frames) {
    for (auto& frame : frames) {
        for (auto& [id, pos] : frame.entities) pos[0] = std::abs(pos[0]);
    }
    return frames;
}

PhaseLabel classify_phase(const TrackingFrame& frame, const std::vector<std::string>& team_a,
                          const std::vector<std::string>& team_b, const CourtSides& sides) {
    constexpr int kOnCourt = 10;
    constexpr int kThreshold = 9;
    int present = 0;
    int in_b_half = 0;  // half defended by team B
    int in_a_half = 0;
    auto count = [&](const std::vector<std::string>& ids) {
        for (const auto& id : ids) {
            const auto it = frame.entities.find(id);
            if (it == frame.entities.end()) continue;
            ++present;
            const double x = it->second[0];
            const bool positive = x > sides.half_boundary;
            const bool negative = x < sides.half_boundary;
            if (sides.team_b_defends_positive ? positive : negative) ++in_b_half;
            if (sides.team_b_defends_positive ? negative : positive) ++in_a_half;
        }
    };
    count(team_a);
    count(team_b);
    if (present != kOnCourt) return PhaseLabel::Transition;
    if (in_b_half >= kThreshold) return PhaseLabel::TeamAAttacking;
    if (in_a_half >= kThreshold) return PhaseLabel::TeamBAttacking;
    return PhaseLabel::Transition;
}

namespace {

std::vector<TrackingFrame> resample(std::vector<TrackingFrame> run, double dt) {
    if (dt <= 0.0 || run.size() < 2) return run;
    std::vector<TrackingFrame> out;
    const double start = run.front().time;
    const double end = run.back().time;
    // Half a nanosecond of slack keeps the final frame when times are decimal literals.
    const double slack = 5e-10;
    std::size_t cursor = 0;
    for (Index k = 0;; ++k) {
        const double target = start + static_cast<double>(k) * dt;
        if (target > end + slack) break;
        while (cursor + 1 < run.size() &&
               std::abs(run[cursor + 1].time - target) < std::abs(run[cursor].time - target)) {
            ++cursor;
        }
        out.push_back(run[cursor]);
    }
    return out;
}

}  // namespace

std::vector<PlaySegment> segment_by(const std::vector<TrackingFrame>& frames, const std::vector<PhaseLabel>& labels,
                                    PhaseLabel phase, double resample_dt) {
    if (frames.size() != labels.size()) throw Error(ErrorCode::DimensionMismatch, "one label per frame required");
    std::vector<PlaySegment> segments;
    std::vector<TrackingFrame> run;
    auto flush = [&] {
        if (run.empty()) return;
        const int event = run.front().event_id;
        segments.push_back(PlaySegment{event, resample(std::move(run), resample_dt)});
        run.clear();
    };
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (labels[i] != phase) {
            flush();
            continue;
        }
        if (!run.empty() && run.front().event_id != frames[i].event_id) flush();
        run.push_back(frames[i]);
    }
    flush();
    if (segments.empty()) {
        throw Error(ErrorCode::EmptySelection, "no frame labelled " + std::string(to_string(phase)));
    }
    return segments;
}

namespace {

Matrix positions_block(const std::vector<Point2>& pts) {
    Matrix m(2, static_cast<Index>(pts.size()));
    for (std::size_t t = 0; t < pts.size(); ++t) {
        m(0, static_cast<Index>(t)) = pts[t][0];
        m(1, static_cast<Index>(t)) = pts[t][1];
    }
    return m;
}

}  // namespace

std::map<std::string, std::vector<Matrix>> entity_segments(const std::vector<PlaySegment>& segments) {
    std::map<std::string, std::vector<Matrix>> out;
    for (const auto& seg : segments) {
        std::set<std::string> ids;
        for (const auto& f : seg.frames) {
            for (const auto& [id, pos] : f.entities) ids.insert(id);
        }
        for (const auto& id : ids) {
            std::vector<Point2> stretch;
            for (const auto& f : seg.frames) {
                const auto it = f.entities.find(id);
                if (it != f.entities.end()) {
                    stretch.push_back(it->second);
                } else if (!stretch.empty()) {
                    out[id].push_back(positions_block(stretch));
                    stretch.clear();
                }
            }
            if (!stretch.empty()) out[id].push_back(positions_block(stretch));
        }
    }
    return out;
}

std::vector<std::pair<Matrix, Matrix>> paired_segments(const std::vector<PlaySegment>& segments,
                                                       const std::string& first, const std::string& second) {
    std::vector<std::pair<Matrix, Matrix>> out;
    for (const auto& seg : segments) {
        std::vector<Point2> a;
        std::vector<Point2> b;
        auto flush = [&] {
            if (!a.empty()) out.emplace_back(positions_block(a), positions_block(b));
            a.clear();
            b.clear();
        };
        for (const auto& f : seg.frames) {
            const auto ia = f.entities.find(first);
            const auto ib = f.entities.find(second);
            if (ia == f.entities.end() || ib == f.entities.end()) {
                flush();
                continue;
            }
            a.push_back(ia->second);
            b.push_back(ib->second);
        }
        flush();
    }
    return out;
}

LandmarkSet half_court_landmarks() {
    Matrix sigma(2, 7);
    sigma << 48.5, 48.5, 0.0, 0.0, 20.0, 20.0, 40.0,
             -27.5, 27.5, -27.5, 27.5, 15.0, -15.0, 0.0;
    return LandmarkSet(std::move(sigma));
}

Matrix pearson_lagged(const TimeSeriesMatrix& x, const TimeSeriesMatrix& y, Index tau) {
    if (tau < 0) throw Error(ErrorCode::InvalidInput, "negative time shift");
    if (x.length() != y.length()) throw Error(ErrorCode::DimensionMismatch, "series lengths differ");
    const Index pairs = x.length() - tau;
    if (pairs < 3) throw Error(ErrorCode::InsufficientData, "need at least three lagged pairs");

    const Matrix xs = x.data().leftCols(pairs);
    const Matrix ys = y.data().rightCols(pairs);
    const Matrix xc = xs.colwise() - xs.rowwise().mean();
    const Matrix yc = ys.colwise() - ys.rowwise().mean();
    const double divisor = static_cast<double>(pairs - 1);
    const Vector x_sd = (xc.rowwise().squaredNorm() / divisor).cwiseSqrt();
    const Vector y_sd = (yc.rowwise().squaredNorm() / divisor).cwiseSqrt();

    auto check = [](const Vector& sd, const TimeSeriesMatrix& s, const char* which) {
        for (Index i = 0; i < sd.size(); ++i) {
            if (sd[i] == 0.0) {
                const std::string name = s.labels().empty() ? std::to_string(i) : s.labels()[static_cast<std::size_t>(i)];
                throw Error(ErrorCode::DegenerateInput, std::string(which) + " row " + name + " has zero variance");
            }
        }
    };
    check(x_sd, x, "source");
    check(y_sd, y, "target");

    Matrix corr = (xc * yc.transpose()) / divisor;
    corr = x_sd.cwiseInverse().asDiagonal() * corr * y_sd.cwiseInverse().asDiagonal();
    return corr.cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace spadep
