#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spadep/pipeline.hpp"

using namespace spadep;
namespace fs = std::filesystem;

namespace {

RunConfig small_logistic() {
    RunConfig cfg;
    cfg.mode = Mode::Logistic;
    cfg.k = 3;
    cfg.length = 200;
    cfg.restarts = 1;
    cfg.max_iters = 40;
    cfg.seed = 5;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_table(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        rows.push_back(fields);
    }
    return rows;
}

ErrorCode config_error_of(const RunConfig& cfg) {
    try {
        cfg.validate();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("config accepted");
    return ErrorCode::InvalidInput;
}

CsvRunOptions fixture_options() {
    CsvRunOptions csv;
    csv.path = fs::path(SPADEP_FIXTURE_DIR) / "tracking_sample.csv";
    csv.team_a = {"a1", "a2", "a3", "a4", "a5"};
    csv.team_b = {"b1", "b2", "b3", "b4", "b5"};
    csv.resample_dt = 0.4;
    return csv;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("mode and route names round trip") {
    for (Mode m : {Mode::Logistic, Mode::Sde, Mode::Ar, Mode::Csv}) CHECK(parse_mode(to_string(m)) == m);
    for (auto r : {AffiliationRoute::Spa1, AffiliationRoute::RhoSequence}) CHECK(parse_route(to_string(r)) == r);
    CHECK_THROWS_AS((void)parse_mode("granger"), Error);
    CHECK_THROWS_AS((void)parse_route("nearest"), Error);
}

TEST_CASE("configuration validation") {
    CHECK_NOTHROW(small_logistic().validate());
    auto cfg = small_logistic();
    cfg.k = 1;
    CHECK(config_error_of(cfg) == ErrorCode::ConfigError);
    cfg = small_logistic();
    cfg.taus = {};
    CHECK(config_error_of(cfg) == ErrorCode::ConfigError);
    cfg = small_logistic();
    cfg.taus = {-1};
    CHECK(config_error_of(cfg) == ErrorCode::ConfigError);
    cfg = small_logistic();
    cfg.realisations = 0;
    CHECK(config_error_of(cfg) == ErrorCode::ConfigError);
    cfg = small_logistic();
    cfg.prefix_lengths = {201};
    CHECK(config_error_of(cfg) == ErrorCode::ConfigError);
    cfg = small_logistic();
    cfg.mode = Mode::Csv;
    CHECK(config_error_of(cfg) == ErrorCode::ConfigError);
    cfg = small_logistic();
    cfg.mode = Mode::Ar;
    cfg.length = std::nullopt;
    cfg.prefix_lengths = {998};
    CHECK(config_error_of(cfg) == ErrorCode::ConfigError);
}

TEST_CASE("mode defaults") {
    RunConfig cfg;
    CHECK(cfg.series_length() == 1800);
    CHECK_FALSE(cfg.differencing());
    cfg.mode = Mode::Sde;
    CHECK(cfg.series_length() == 1000);
    CHECK(cfg.differencing());
    cfg.difference_series = false;
    CHECK_FALSE(cfg.differencing());
}

TEST_CASE("generated realisations have the documented shapes") {
    RunConfig cfg;
    cfg.mode = Mode::Sde;
    cfg.length = 100;
    const auto sde = generate_realisation(cfg, 1);
    CHECK(sde.names == std::vector<std::string>{"A", "B", "C"});
    CHECK(sde.variables[2].length() == 99);
    CHECK(sde.variables[0].dim() == 2);

    cfg.mode = Mode::Ar;
    const auto ar = generate_realisation(cfg, 1);
    CHECK(ar.variables[0].dim() == 4);
    CHECK(ar.variables[1].dim() == 4);
    CHECK(ar.variables[0].length() == 97);

    cfg.mode = Mode::Csv;
    CHECK_THROWS_AS((void)generate_realisation(cfg, 1), Error);
}

TEST_CASE("a fixed seed reproduces the report") {
    const auto cfg = small_logistic();
    const auto a = report_json(cfg, run(cfg));
    const auto b = report_json(cfg, run(cfg));
    CHECK(a == b);

    auto parallel = cfg;
    parallel.jobs = 2;
    CHECK(report_json(parallel, run(parallel)) == a);
}

TEST_CASE("realisations differ and are counted") {
    auto cfg = small_logistic();
    cfg.mode = Mode::Sde;
    cfg.length = 120;
    cfg.realisations = 3;
    const auto s = run(cfg);
    CHECK(s.completed == 3);
    CHECK(s.failed == 0);
    REQUIRE(s.taus.size() == 1);
    CHECK(s.taus[0].pairs.size() == 3);
    CHECK(s.taus[0].pairs[0].delta_rowvar.size() == 3);
    CHECK(s.taus[0].pairs[0].expected_sign == -1);
    CHECK(s.realisation_seeds[0] != s.realisation_seeds[1]);
    CHECK(s.taus[0].per_realisation[0].delta_rowvar != s.taus[0].per_realisation[1].delta_rowvar);
}

TEST_CASE("logistic run points from X to Y") {
    RunConfig cfg;
    cfg.seed = 1;
    const auto s = run(cfg);
    REQUIRE(s.taus[0].pairs.size() == 1);
    const auto& p = s.taus[0].pairs[0];
    CHECK(p.from == "X");
    CHECK(p.to == "Y");
    CHECK(p.delta_rowvar[0] > 0.0);
    CHECK(p.delta_schatten[0] > 0.0);
}

TEST_CASE("prefix sweep reports one table per length") {
    auto cfg = small_logistic();
    cfg.prefix_lengths = {50, 120};
    const auto s = run(cfg);
    REQUIRE(s.prefix_sweep.size() == 2);
    CHECK(s.prefix_sweep[1].length == 120);
    CHECK(s.prefix_sweep[0].mean.m_rowvar.rows() == 2);
}

TEST_CASE("emitted tables") {
    const fs::path dir = fs::temp_directory_path() / "spadep_pipeline_test";
    fs::remove_all(dir);
    auto cfg = small_logistic();
    cfg.taus = {1, 2};
    const auto s = run(cfg);
    emit_report(cfg, s, dir);
    CHECK(fs::exists(dir / "report.json"));

    const auto rows = read_table(dir / "tau_2" / "delta_rowvar.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"from\\to", "X", "Y"});
    CHECK(rows[1][0] == "X");
    CHECK(std::stod(rows[1][2]) == -std::stod(rows[2][1]));
    CHECK(std::stod(rows[1][1]) == 0.0);
    CHECK(read_table(dir / "tau_1" / "m_schatten.csv").size() == 3);

    const auto first = slurp(dir / "report.json");
    emit_report(cfg, s, dir);
    CHECK(slurp(dir / "report.json") == first);

    const fs::path blocker = dir / "blocker";
    std::ofstream(blocker) << "x";
    try {
        emit_report(cfg, s, blocker / "out");
        FAIL("expected IoError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
    }
}

TEST_CASE("table_csv keeps full precision") {
    Matrix m(2, 2);
    m << 0.0, 0.1,
         -0.1, 0.0;
    const auto text = table_csv(m, {"p", "q"});
    CHECK(text.find("0.10000000000000001") != std::string::npos);
}

TEST_CASE("tracking analysis on the fixture") {
    const auto csv = fixture_options();
    const auto r = analyze_tracking(csv, {1});
    REQUIRE(r.names.size() == 10);
    CHECK(r.names.front() == "a1");
    CHECK(r.names.back() == "b5");
    REQUIRE(r.reports.size() == 1);
    const auto& rep = r.reports[0];
    CHECK(rep.delta_rowvar == -rep.delta_rowvar.transpose());
    CHECK((rep.m_schatten.array() >= 0.0).all());
    for (Index i = 0; i < 10; ++i)
        for (Index j = 0; j < 10; ++j)
            if (i != j) CHECK(rep.m_schatten(i, j) >= 1.0 - 1e-9);

    auto no_teams = csv;
    no_teams.team_a = {"a1", "zz"};
    no_teams.team_b = {};
    try {
        (void)analyze_tracking(no_teams, {1});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK((e.code() == ErrorCode::EmptySelection || e.code() == ErrorCode::InsufficientData));
    }
}

TEST_CASE("csv mode through run") {
    RunConfig cfg;
    cfg.mode = Mode::Csv;
    cfg.k = 7;
    cfg.csv = fixture_options();
    const auto s = run(cfg);
    CHECK(s.completed == 1);
    CHECK(s.variable_names.size() == 10);
    CHECK(s.taus[0].pairs.size() == 45);
    CHECK(s.taus[0].pairs[0].expected_sign == 0);

    cfg.csv->path = "/nonexistent.csv";
    try {
        (void)run(cfg);
        FAIL("expected IoError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
    }
}

}
