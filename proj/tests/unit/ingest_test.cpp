#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "spadep/ingest.hpp"

using namespace spadep;
namespace fs = std::filesystem;

namespace {

const fs::path kSample = fs::path(SPADEP_FIXTURE_DIR) / "tracking_sample.csv";

fs::path write_temp(const std::string& name, const std::string& text) {
    const fs::path dir = fs::temp_directory_path() / "spadep_ingest_test";
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream(path) << text;
    return path;
}

const std::vector<std::string> kTeamA = {"a1", "a2", "a3", "a4", "a5"};
const std::vector<std::string> kTeamB = {"b1", "b2", "b3", "b4", "b5"};

TrackingFrame frame_with(const std::vector<double>& a_x, const std::vector<double>& b_x) {
    TrackingFrame f;
    for (std::size_t i = 0; i < a_x.size(); ++i) f.entities[kTeamA[i]] = {a_x[i], 0.0};
    for (std::size_t i = 0; i < b_x.size(); ++i) f.entities[kTeamB[i]] = {b_x[i], 0.0};
    return f;
}

std::vector<TrackingFrame> timeline(std::size_t n, double dt, int event = 0) {
    std::vector<TrackingFrame> frames(n);
    for (std::size_t i = 0; i < n; ++i) {
        frames[i].time = static_cast<double>(i) * dt;
        frames[i].event_id = event;
        frames[i].entities["p"] = {static_cast<double>(i), 1.0};
    }
    return frames;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("rows sharing a time form one frame") {
    const auto path = write_temp("two.csv", "time,entity,x,y,event\n0.5,p,1,2,3\n0.5,q,-4,5.5,3\n");
    const auto frames = load_csv(path, CsvSchema{});
    REQUIRE(frames.size() == 1);
    CHECK(frames[0].time == 0.5);
    CHECK(frames[0].event_id == 3);
    CHECK(frames[0].entities.size() == 2);
    CHECK(frames[0].entities.at("q") == Point2{-4.0, 5.5});
}

TEST_CASE("bench coordinates remove the entity from the frame") {
    const auto path = write_temp("bench.csv", "time,entity,x,y,event\n0,p,1,2,0\n0,q,-48.5,-27.5,0\n");
    const auto frames = load_csv(path, CsvSchema{});
    REQUIRE(frames.size() == 1);
    CHECK(frames[0].entities.count("q") == 0);
    CHECK(frames[0].entities.count("p") == 1);
}

TEST_CASE("frames come out sorted by time whatever the row order") {
    const auto path = write_temp("order.csv", "entity,time,x,y\np,2.0,0,0\np,0.0,0,0\np,1.0,0,0\n");
    CsvSchema schema;
    schema.event_col = std::nullopt;
    const auto frames = load_csv(path, schema);
    REQUIRE(frames.size() == 3);
    CHECK(frames[0].time == 0.0);
    CHECK(frames[2].time == 2.0);
    CHECK(frames[1].event_id == 0);
}

TEST_CASE("parse and schema errors") {
    SUBCASE("non-numeric x reports the row") {
        const auto path = write_temp("bad.csv", "time,entity,x,y,event\n0,p,1,2,0\n0,q,abc,2,0\n");
        try {
            (void)load_csv(path, CsvSchema{});
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.row() == 2);
            CHECK(e.code() == ErrorCode::ParseError);
        }
    }
    SUBCASE("missing column") {
        const auto path = write_temp("nocol.csv", "time,entity,x,event\n0,p,1,0\n");
        try {
            (void)load_csv(path, CsvSchema{});
            FAIL("expected SchemaError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SchemaError);
        }
    }
    SUBCASE("missing file") {
        try {
            (void)load_csv("/nonexistent/tracking.csv", CsvSchema{});
            FAIL("expected IoError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::IoError);
        }
    }
    SUBCASE("fractional event id") {
        const auto path = write_temp("ev.csv", "time,entity,x,y,event\n0,p,1,2,1.5\n");
        CHECK_THROWS_AS((void)load_csv(path, CsvSchema{}), ParseError);
    }
}

TEST_CASE("custom column names and quoted fields") {
    const auto path = write_temp("custom.csv", "t,\"player id\",px,py\n1.0,\"Smith, J\",3,4\n");
    CsvSchema schema{"t", "player id", "px", "py", std::nullopt};
    const auto frames = load_csv(path, schema);
    REQUIRE(frames.size() == 1);
    CHECK(frames[0].entities.count("Smith, J") == 1);
}

TEST_CASE("reflection") {
    std::vector<TrackingFrame> frames(1);
    frames[0].entities["p"] = {-30.0, 2.0};
    frames[0].entities["q"] = {30.0, -2.0};
    const auto once = reflect_half_court(frames);
    CHECK(once[0].entities.at("p") == Point2{30.0, 2.0});
    CHECK(once[0].entities.at("q") == Point2{30.0, -2.0});
    const auto twice = reflect_half_court(once);
    CHECK(twice[0].entities == once[0].entities);
}

TEST_CASE("phase classification") {
    const std::vector<double> right(5, 10.0);
    const std::vector<double> left(5, -10.0);
    CHECK(classify_phase(frame_with(right, right), kTeamA, kTeamB) == PhaseLabel::TeamAAttacking);
    CHECK(classify_phase(frame_with(left, left), kTeamA, kTeamB) == PhaseLabel::TeamBAttacking);
    CHECK(classify_phase(frame_with(left, right), kTeamA, kTeamB) == PhaseLabel::Transition);

    std::vector<double> nine_right = right;
    nine_right[0] = -10.0;
    CHECK(classify_phase(frame_with(nine_right, right), kTeamA, kTeamB) == PhaseLabel::TeamAAttacking);
    std::vector<double> eight_right = nine_right;
    eight_right[1] = -10.0;
    CHECK(classify_phase(frame_with(eight_right, right), kTeamA, kTeamB) == PhaseLabel::Transition);

    CourtSides flipped;
    flipped.team_b_defends_positive = false;
    CHECK(classify_phase(frame_with(right, right), kTeamA, kTeamB, flipped) == PhaseLabel::TeamBAttacking);

    // nine players listed on court
    CHECK(classify_phase(frame_with(right, {10, 10, 10, 10}), kTeamA, kTeamB) == PhaseLabel::Transition);
}

TEST_CASE("segmentation") {
    using P = PhaseLabel;
    const P a = P::TeamAAttacking;
    const P b = P::TeamBAttacking;

    SUBCASE("runs of the chosen label") {
        const auto frames = timeline(6, 0.04);
        const auto segs = segment_by(frames, {a, a, b, a, a, a}, a, 0.0);
        REQUIRE(segs.size() == 2);
        CHECK(segs[0].frames.size() == 2);
        CHECK(segs[1].frames.size() == 3);
    }
    SUBCASE("event change splits a run") {
        auto frames = timeline(6, 0.04, 1);
        for (std::size_t i = 3; i < 6; ++i) frames[i].event_id = 2;
        const auto segs = segment_by(frames, std::vector<P>(6, a), a, 0.0);
        REQUIRE(segs.size() == 2);
        CHECK(segs[0].event_id == 1);
        CHECK(segs[1].event_id == 2);
        CHECK(segs[1].frames.size() == 3);
    }
    SUBCASE("resampling at the native step keeps every frame") {
        const auto frames = timeline(25, 0.04);
        const auto segs = segment_by(frames, std::vector<P>(25, a), a, 0.04);
        REQUIRE(segs.size() == 1);
        REQUIRE(segs[0].frames.size() == 25);
        for (std::size_t i = 0; i < 25; ++i) CHECK(segs[0].frames[i].time == frames[i].time);
    }
    SUBCASE("coarser resampling picks the nearest frames") {
        const auto frames = timeline(51, 0.04);
        const auto segs = segment_by(frames, std::vector<P>(51, a), a, 1.0);
        REQUIRE(segs[0].frames.size() == 3);
        CHECK(segs[0].frames[1].time == doctest::Approx(1.0));
        CHECK(segs[0].frames[2].time == doctest::Approx(2.0));
    }
    SUBCASE("nothing selected") {
        const auto frames = timeline(3, 0.04);
        try {
            (void)segment_by(frames, {b, b, b}, a, 0.0);
            FAIL("expected EmptySelection");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EmptySelection);
        }
    }
}

TEST_CASE("entity and paired stretches split where an entity is missing") {
    PlaySegment seg;
    for (int i = 0; i < 5; ++i) {
        TrackingFrame f;
        f.time = i;
        f.entities["p"] = {static_cast<double>(i), 0.0};
        if (i != 2) f.entities["q"] = {0.0, static_cast<double>(i)};
        seg.frames.push_back(f);
    }
    const auto per_entity = entity_segments({seg});
    CHECK(per_entity.at("p").size() == 1);
    CHECK(per_entity.at("p")[0].cols() == 5);
    REQUIRE(per_entity.at("q").size() == 2);
    CHECK(per_entity.at("q")[1](1, 0) == 3.0);

    const auto paired = paired_segments({seg}, "p", "q");
    REQUIRE(paired.size() == 2);
    CHECK(paired[0].first.cols() == 2);
    CHECK(paired[1].second.cols() == 2);
    CHECK(paired[1].first(0, 1) == 4.0);
}

TEST_CASE("half-court landmarks") {
    const auto l = half_court_landmarks();
    CHECK(l.dim() == 2);
    CHECK(l.count() == 7);
    CHECK(l.sigma().row(0).minCoeff() >= 0.0);
}

TEST_CASE("lagged Pearson correlation") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> normal;
    Matrix x(2, 500);
    for (Index t = 0; t < 500; ++t) x.col(t) << normal(rng), normal(rng);
    Matrix y = Matrix::Zero(2, 500);
    const Index tau = 3;
    y.rightCols(500 - tau) = x.leftCols(500 - tau);
    const auto c = pearson_lagged(TimeSeriesMatrix(x), TimeSeriesMatrix(y), tau);
    CHECK(std::abs(c(0, 0) - 1.0) <= 1e-12);
    CHECK(std::abs(c(1, 1) - 1.0) <= 1e-12);
    CHECK(std::abs(c(0, 1)) < 0.2);

    const auto n = pearson_lagged(TimeSeriesMatrix(x), TimeSeriesMatrix(Matrix(-y)), tau);
    CHECK(std::abs(n(0, 0) + 1.0) <= 1e-12);

    Matrix a(3, 10'000), b(2, 10'000);
    for (Index t = 0; t < 10'000; ++t) {
        a.col(t) << normal(rng), normal(rng), normal(rng);
        b.col(t) << normal(rng), normal(rng);
    }
    const auto ind = pearson_lagged(TimeSeriesMatrix(a), TimeSeriesMatrix(b), 1);
    CHECK(ind.cwiseAbs().maxCoeff() < 0.05);

    Matrix flat = x;
    flat.row(1).setConstant(2.0);
    try {
        (void)pearson_lagged(TimeSeriesMatrix(flat, {"u", "v"}), TimeSeriesMatrix(y), tau);
        FAIL("expected DegenerateInput");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateInput);
        CHECK(std::string(e.what()).find('v') != std::string::npos);
    }
}

TEST_CASE("fixture loads into the expected phases") {
    const auto frames = load_csv(kSample, CsvSchema{});
    CHECK(frames.size() == 200);
    for (const auto& f : frames) CHECK(f.entities.count("a6") == 0);
    std::vector<PhaseLabel> labels;
    for (const auto& f : frames) labels.push_back(classify_phase(f, kTeamA, kTeamB));
    const auto attack_a = segment_by(reflect_half_court(frames), labels, PhaseLabel::TeamAAttacking, 1.0);
    REQUIRE(attack_a.size() == 2);
    CHECK(attack_a[0].event_id == 1);
    CHECK(attack_a[1].event_id == 2);
    const auto attack_b = segment_by(frames, labels, PhaseLabel::TeamBAttacking, 0.0);
    REQUIRE(attack_b.size() == 1);
    CHECK(attack_b[0].frames.size() == 25);
}

}
