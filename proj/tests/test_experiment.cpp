#include "catch_amalgamated.hpp"

#include "sigflow/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace sigflow;
namespace fs = std::filesystem;

namespace {

Json small_chain(const char* method) {
    return Json{{"model", "inverter_chain"}, {"method", method}, {"N", 6}, {"t_end", 3.0},
                {"h", 0.05}, {"delta_T", 2.0}, {"vt_n", 0.75}, {"vt_p", 0.75}};
}

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("sigflow_" + tag + "_" + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    [[nodiscard]] const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string summary_text(const ExperimentResult& r) {
    std::ostringstream os;
    write_summary_csv(os, r, false);
    return os.str();
}

}  // namespace

// =============================================================================
// Configuration
// =============================================================================

TEST_CASE("Experiment documents parse into defaults, sweeps and a table", "[experiment][config]") {
    const Json doc = {
        {"name", "demo"},
        {"defaults", small_chain("rk4")},
        {"sweep", {{{"key", "method"}, {"values", {"rk4", "sfrk4"}}},
                   {{"key", "delta_T"}, {"values", {0, 5, 10}}}}},
        {"reference", "rk4"},
        {"table", {{"rows", "method"}, {"cols", "delta_T"}, {"value", "f_evals"}}},
    };
    const auto cfg = parse_experiment(doc);
    CHECK(cfg.name == "demo");
    REQUIRE(cfg.sweeps.size() == 2);
    CHECK(cfg.reference == "rk4");
    REQUIRE(cfg.table);
    CHECK(cfg.table->value == "f_evals");

    const auto grid = expand_grid(cfg);
    REQUIRE(grid.size() == 6);
    // first sweep slowest
    CHECK(grid[0].params["method"] == "rk4");
    CHECK(grid[0].params["delta_T"] == 0);
    CHECK(grid[1].params["delta_T"] == 5);
    CHECK(grid[2].params["delta_T"] == 10);
    CHECK(grid[3].params["method"] == "sfrk4");
    CHECK(grid[3].params["delta_T"] == 0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(grid[k].index == k);
        CHECK(grid[k].params["N"] == 6);
    }
}

TEST_CASE("Experiment without sweeps has a single cell", "[experiment][config]") {
    const auto cfg = parse_experiment(Json{{"defaults", small_chain("rk4")}});
    CHECK(expand_grid(cfg).size() == 1);
}

TEST_CASE("Malformed documents raise ConfigError", "[experiment][config]") {
    CHECK_THROWS_AS(parse_experiment(Json{{"defaults", {{"bogus", 1}}}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment(Json{{"sweep", {{{"key", "colour"}, {"values", {1}}}}}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment(Json{{"sweep", {{{"key", "h"}, {"values", Json::array()}}}}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment(Json{{"sweep", {{{"key", "h"}, {"values", {0.1}}},
                                                     {{"key", "h"}, {"values", {0.2}}}}}}),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment(Json{{"reference", "sfrk4"}}), ConfigError);
    CHECK_THROWS_AS(parse_cell_params(Json{{"method", "euler-ish"}}, 0), ConfigError);
    CHECK_THROWS_AS(parse_cell_params(Json{{"N", -3}}, 0), ConfigError);
    CHECK_THROWS_AS(parse_cell_params(Json{{"h", "small"}}, 0), ConfigError);
    CHECK_THROWS_AS(load_experiment("/nonexistent/sigflow.json"), ConfigError);
}

TEST_CASE("Automatic period follows the pulse", "[experiment][config]") {
    const auto p = parse_cell_params(Json{{"method", "sfprk4"}, {"delta_T", 12.0}, {"h", 0.01},
                                          {"period_steps", "auto"}},
                                     0);
    CHECK(p.integration.period_steps == 1400);
}

TEST_CASE("Repro configs all parse", "[experiment][config]") {
    for (const auto& entry : fs::directory_iterator(SIGFLOW_REPRO_DIR)) {
        if (entry.path().extension() != ".json") continue;
        INFO(entry.path().string());
        const auto cfg = load_experiment(entry.path());
        for (const auto& cell : expand_grid(cfg)) CHECK_NOTHROW(parse_cell_params(cell.params, 0));
    }
}

// =============================================================================
// Running and output
// =============================================================================

TEST_CASE("Empty interval performs no work", "[experiment][run]") {
    auto d = small_chain("sfrk4");
    d["t_end"] = 0.0;
    const auto r = run_experiment(parse_experiment(Json{{"defaults", d}}), {});
    REQUIRE(r.all_ok());
    CHECK(r.cells[0].report.steps == 0);
    CHECK(r.cells[0].report.counters.f_internal_component_evals == 0);
    CHECK(r.cells[0].report.counters.device_evals() == 0);
}

TEST_CASE("Trajectory CSV has a header and round-trips doubles", "[experiment][output]") {
    Trajectory tr;
    tr.t = {0.0, 0.1};
    tr.x = {{1.0 / 3.0, -2.0}, {0.1 + 0.2, 5.0}};
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x_1,x_2");
    std::getline(in, line);
    std::getline(in, line);
    std::istringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    REQUIRE(values.size() == 3);
    CHECK(values[0] == 0.1);
    CHECK(values[1] == 0.1 + 0.2);
    CHECK(values[2] == 5.0);
}

TEST_CASE("Activity CSV names its mode", "[experiment][output]") {
    ActivityTrace trace;
    trace.mode = ActivityMode::Latency;
    trace.t = {0.0, 0.5, 1.0};
    const ActivityState a{ActivityKind::Active}, s{ActivityKind::Semi}, i{ActivityKind::Inactive, 1};
    trace.rows = {{a, s}, {i, a}, {a, a}};
    std::ostringstream os;
    write_activity_csv(os, trace, 2);
    const std::string text = os.str();
    CHECK(text.starts_with("# mode=latency"));
    CHECK(text.find("\nt,x_1,x_2\n0,0,1\n1,0,0\n") != std::string::npos);

    trace.mode = ActivityMode::Periodicity;
    std::ostringstream ps;
    write_activity_csv(ps, trace);
    CHECK(ps.str().starts_with("# mode=periodicity"));
    CHECK(ps.str().find("0.5,2,0") != std::string::npos);
}

TEST_CASE("Run writes reports, trajectories, activity and summaries", "[experiment][run][output]") {
    TempDir dir("outputs");
    auto d = small_chain("rk4");
    d["write_trajectory"] = true;
    d["write_activity"] = true;
    const auto cfg = parse_experiment(Json{{"name", "io"}, {"defaults", d},
                                           {"sweep", {{{"key", "method"}, {"values", {"rk4", "sfrk4", "tr"}}}}},
                                           {"reference", "rk4"},
                                           {"table", {{"rows", "method"}, {"cols", ""}, {"value", "transistor_evals"}}}});
    const auto r = run_experiment(cfg, {.out_dir = dir.path()});
    REQUIRE(r.all_ok());

    for (const char* f : {"io_cell000.report.json", "io_cell001.trajectory.csv", "io_cell002.activity.csv",
                          "io_summary.csv", "io_summary.json", "io_table.md"}) {
        INFO(f);
        CHECK(fs::exists(dir.path() / f));
    }
    const Json report = Json::parse(slurp(dir.path() / "io_cell001.report.json"));
    for (const char* k : {"f_internal_component_evals", "transistor_evals", "newton_iterations",
                          "lu_factorizations", "lu_dim_histogram"}) {
        INFO(k);
        CHECK(report["counters"].contains(k));
    }
    CHECK(report["status"] == "ok");
    CHECK(report["timings"].contains("wall_seconds"));
    CHECK(report["deviation"].contains("max"));
    CHECK(report["counters"]["transistor_evals"].get<std::uint64_t>() ==
          2 * report["counters"]["f_internal_component_evals"].get<std::uint64_t>());

    const Json tr_report = Json::parse(slurp(dir.path() / "io_cell002.report.json"));
    CHECK(tr_report["counters"]["newton_iterations"].get<std::uint64_t>() > 0);
    CHECK_FALSE(tr_report["counters"]["lu_dim_histogram"].empty());

    const std::string traj = slurp(dir.path() / "io_cell000.trajectory.csv");
    CHECK(traj.starts_with("t,x_1,x_2,x_3,x_4,x_5,x_6,x_7,x_8,x_9\n"));
    CHECK(slurp(dir.path() / "io_cell002.activity.csv").starts_with("# mode=latency"));

    // a reference compared with itself deviates by nothing
    REQUIRE(r.cells[0].deviation);
    CHECK(r.cells[0].deviation->maximum == 0.0);

    const std::string table = slurp(dir.path() / "io_table.md");
    CHECK(table.find("sfrk4") != std::string::npos);
    CHECK(table.find("|") != std::string::npos);
}

TEST_CASE("A failing cell is recorded and the others still run", "[experiment][run]") {
    TempDir dir("failure");
    const auto cfg = parse_experiment(Json{{"name", "mixed"}, {"defaults", small_chain("rk4")},
                                           {"sweep", {{{"key", "h"}, {"values", {0.05, 0.0, 0.1}}}}}});
    const auto r = run_experiment(cfg, {.out_dir = dir.path(), .jobs = 2});
    CHECK_FALSE(r.all_ok());
    REQUIRE(r.cells.size() == 3);
    CHECK(r.cells[0].ok);
    CHECK_FALSE(r.cells[1].ok);
    CHECK_FALSE(r.cells[1].error.empty());
    CHECK(r.cells[2].ok);
    const Json failed = Json::parse(slurp(dir.path() / "mixed_cell001.report.json"));
    CHECK(failed["status"] == "failed");
    CHECK(failed.contains("error"));
    CHECK(slurp(dir.path() / "mixed_summary.csv").find(",failed,") != std::string::npos);
}

TEST_CASE("Summaries are reproducible across runs and job counts", "[experiment][run][determinism]") {
    const auto cfg = parse_experiment(Json{
        {"name", "det"},
        {"defaults", small_chain("rk4")},
        {"sweep", {{{"key", "method"}, {"values", {"rk4", "sfrk4", "sfprk4", "tr", "sftr"}}},
                   {{"key", "delta_T"}, {"values", {0.0, 2.0}}}}},
        {"reference", "rk4"},
    });
    const auto a = run_experiment(cfg, {.jobs = 1, .keep_trajectories = true});
    const auto b = run_experiment(cfg, {.jobs = 4, .keep_trajectories = true});
    REQUIRE(a.all_ok());
    CHECK(summary_text(a) == summary_text(b));
    for (std::size_t k = 0; k < a.cells.size(); ++k) {
        CHECK(a.cells[k].trajectory.x == b.cells[k].trajectory.x);
    }
}

TEST_CASE("Random networks are reproducible from their seed", "[experiment][run]") {
    const Json base{{"model", "random_network"}, {"method", "rk4"}, {"nodes", 10}, {"t_end", 1.0}, {"h", 0.1}};
    auto run = [](Json d, std::uint64_t seed) {
        return run_experiment(parse_experiment(Json{{"defaults", d}}), {.seed = seed, .keep_trajectories = true});
    };
    auto with_seed = base;
    with_seed["seed"] = 17;
    const auto a = run(with_seed, 0);
    const auto b = run(with_seed, 99);
    REQUIRE(a.all_ok());
    CHECK(a.cells[0].trajectory.x == b.cells[0].trajectory.x);
    const auto c = run(base, 3);
    const auto e = run(base, 4);
    CHECK(c.cells[0].trajectory.x != e.cells[0].trajectory.x);
}

TEST_CASE("Pivot table layout", "[experiment][output]") {
    const auto cfg = parse_experiment(Json{
        {"name", "pivot"},
        {"defaults", small_chain("rk4")},
        {"sweep", {{{"key", "method"}, {"values", {"rk4", "sfrk4"}}}, {{"key", "delta_T"}, {"values", {0.0, 2.0}}}}},
    });
    const auto r = run_experiment(cfg, {});
    std::ostringstream os;
    write_pivot_table(os, r, {.rows = "method", .cols = "delta_T", .value = "f_evals"});
    std::istringstream in(os.str());
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) lines.push_back(line);
    }
    REQUIRE(lines.size() == 4);
    CHECK(lines[0].find("0") != std::string::npos);
    CHECK(lines[0].find("2") != std::string::npos);
    CHECK(lines[2].starts_with("| rk4"));
    CHECK(lines[3].starts_with("| sfrk4"));
    CHECK_THROWS_AS(metric(r.cells[0], "colour"), ConfigError);
}
