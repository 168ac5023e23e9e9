// Config file parsing, precedence, hashing, and the experiment runner's
// artifact pipeline.

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nest/config.hpp"
#include "nest/experiment.hpp"

using namespace nest;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("nest_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<MetricsRow> synthetic_rows(int n, double goal, double home) {
    std::vector<MetricsRow> rows;
    for (int i = 0; i < n; ++i) {
        MetricsRow r;
        r.step = i;
        r.healthy = 70.0;
        r.infected = 30.0;
        r.deceased = 0.0;
        r.vaccinated = 10.0;
        r.home = home;
        r.quarantine = 2.0;
        r.raw_infections = 5;
        r.infections = 5.0;
        r.goal = goal;
        rows.push_back(r);
    }
    return rows;
}

} // namespace

TEST_CASE("ini parsing: sections, comments, whitespace, errors") {
    const IniFile ini = IniFile::parse(
        "# leading comment\n"
        "[world]\n"
        "population = 50   ; trailing comment\n"
        "  p_interact=0.5\n"
        "\n"
        "[learning]\n"
        "train_steps = 1000\n");
    REQUIRE(ini.find("world", "population"));
    CHECK(*ini.find("world", "population") == "50");
    CHECK(*ini.find("world", "p_interact") == "0.5");
    CHECK(*ini.find("learning", "train_steps") == "1000");
    CHECK(ini.find("world", "missing") == nullptr);
    CHECK(ini.find("nope", "population") == nullptr);

    CHECK_THROWS_AS(IniFile::parse("[world\nkey = 1\n"), ConfigError);
    CHECK_THROWS_AS(IniFile::parse("[world]\nno equals sign\n"), ConfigError);
    CHECK_THROWS_AS(IniFile::parse("[world]\n= 1\n"), ConfigError);
    CHECK_THROWS_AS(IniFile::load("/nonexistent/path.ini"), IoError);
}

TEST_CASE("config hash is stable under key and section reordering") {
    const IniFile a = IniFile::parse("[world]\npopulation = 50\np_interact = 0.5\n"
                                     "[learning]\nepsilon = 0.1\n");
    const IniFile b = IniFile::parse("[learning]\nepsilon = 0.1\n"
                                     "[world]\np_interact = 0.5\npopulation = 50\n");
    CHECK(config_hash(a) == config_hash(b));
    const IniFile c = IniFile::parse("[world]\npopulation = 51\np_interact = 0.5\n"
                                     "[learning]\nepsilon = 0.1\n");
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("experiment config: defaults, file overrides, validation") {
    SUBCASE("defaults") {
        const ExperimentConfig cfg = make_experiment_config(IniFile{});
        CHECK(cfg.n_seeds == 20);
        CHECK(cfg.societies == std::vector<std::string>{"nest"});
        CHECK(cfg.rolling_window == 50);
        CHECK(cfg.convergence_window == 500);
        CHECK(cfg.sim.world.population == 100);
        CHECK(cfg.sim.world.episode_steps == 2000);
        CHECK(cfg.sim.learn.train_steps == 100000);
    }
    SUBCASE("every section applies its overrides") {
        const IniFile ini = IniFile::parse(
            "[experiment]\nsocieties = penalty, tell\nseeds = 3\nbase_seed = 11\n"
            "rolling_window = 10\nconvergence_window = 25\njobs = 2\n"
            "[world]\npopulation = 40\nepisode_steps = 100\nquarantine_duration = 5\n"
            "fixed_goal = rest\n"
            "[disease]\ninfection_prob = 0.6\nrecover_mild = 0.04\n"
            "[observation]\nmild = 0.25, 0.65, 0.10\n"
            "[learning]\nepsilon = 0.2\ntrain_steps = 500\nshaping_enabled = false\n");
        const ExperimentConfig cfg = make_experiment_config(ini);
        CHECK(cfg.societies == std::vector<std::string>{"penalty", "tell"});
        CHECK(cfg.n_seeds == 3);
        CHECK(cfg.base_seed == 11);
        CHECK(cfg.jobs == 2);
        CHECK(cfg.sim.world.population == 40);
        CHECK(cfg.sim.world.quarantine_duration == 5);
        CHECK(cfg.sim.world.fixed_goal == GoalKind::Rest);
        CHECK(cfg.sim.disease.infection_prob == doctest::Approx(0.6));
        CHECK(cfg.sim.disease.recover_mild == doctest::Approx(0.04));
        CHECK(cfg.sim.observation.rows[2][1] == doctest::Approx(0.65));
        CHECK(cfg.sim.learn.epsilon == doctest::Approx(0.2));
        CHECK_FALSE(cfg.sim.learn.shaping_enabled);
    }
    SUBCASE("society preset plus [society] overrides") {
        const IniFile ini = IniFile::parse("[society]\nkappa = 0.4\nmixture_hint = 0.28\n"
                                           "mixture_none = 0.52\n");
        ExperimentConfig cfg = make_experiment_config(ini);
        const SimConfig sim = society_sim_config(cfg, "nest");
        CHECK(sim.society.kappa == doctest::Approx(0.4));
        CHECK(sim.society.mixture[3] == doctest::Approx(0.28));
        // Broken override mixtures are rejected.
        cfg.source = IniFile::parse("[society]\nmixture_hint = 0.5\n");
        CHECK_THROWS_AS(society_sim_config(cfg, "nest"), SocietyError);
    }
    SUBCASE("invalid values are rejected with ConfigError") {
        CHECK_THROWS_AS(make_experiment_config(IniFile::parse("[experiment]\nseeds = 0\n")),
                        ConfigError);
        CHECK_THROWS_AS(
            make_experiment_config(IniFile::parse("[experiment]\nsocieties = utopia\n")),
            SocietyError);
        CHECK_THROWS_AS(
            make_experiment_config(IniFile::parse("[world]\npopulation = lots\n")),
            ConfigError);
        CHECK_THROWS_AS(
            make_experiment_config(IniFile::parse("[learning]\nshaping_enabled = maybe\n")),
            ConfigError);
    }
}

TEST_CASE("metrics csv round-trips with the exact header") {
    TempDir tmp;
    const auto rows = synthetic_rows(5, 0.25, 0.8);
    const std::string path = (tmp.path / "run_1.csv").string();
    write_metrics_csv(path, rows);
    const std::string text = read_file(path);
    CHECK(text.starts_with("steps,healthy,infected,deceased,vaccinated,isolation,"
                           "forced_quarantine,total_number_infections,desire_satisfaction\n"));
    const auto back = read_metrics_csv(path);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].step == rows[i].step);
        CHECK(back[i].healthy == doctest::Approx(rows[i].healthy));
        CHECK(back[i].home == doctest::Approx(rows[i].home));
        CHECK(back[i].goal == doctest::Approx(rows[i].goal));
        CHECK(back[i].raw_infections == rows[i].raw_infections);
    }
    // A header mismatch is detected.
    std::ofstream bad(tmp.path / "bad.csv");
    bad << "wrong,header\n";
    bad.close();
    CHECK_THROWS_AS(read_metrics_csv((tmp.path / "bad.csv").string()), IoError);
}

TEST_CASE("q-table snapshot round-trips exactly") {
    TempDir tmp;
    StateActionTable table;
    for (int i = 0; i < kEntryCount; ++i) table.values[i] = std::sin(i) * 3.25;
    const std::string path = (tmp.path / "q.txt").string();
    write_qtable(path, table);
    const StateActionTable back = read_qtable(path);
    for (int i = 0; i < kEntryCount; ++i) CHECK(back.values[i] == table.values[i]);
}

TEST_CASE("run_experiment writes the declared artifacts deterministically") {
    TempDir tmp;
    IniFile ini = IniFile::parse(
        "[experiment]\nsocieties = nest\nseeds = 1\nbase_seed = 1\n"
        "[world]\npopulation = 20\nepisode_steps = 10\n"
        "[learning]\ntrain_steps = 30\n");
    ini.sections["experiment"]["out_dir"] = (tmp.path / "out_a").string();
    const auto manifests = run_experiment(make_experiment_config(ini));
    REQUIRE(manifests.size() == 1);
    CHECK(manifests[0].society == "nest");
    CHECK(manifests[0].seed == 1);

    const auto rows = read_metrics_csv(manifests[0].csv_path);
    CHECK(rows.size() == 10); // one CSV with exactly episode_steps rows
    CHECK(fs::exists(manifests[0].qtable_path));
    CHECK(fs::exists(tmp.path / "out_a" / "manifest.json"));

    // Same config run again: byte-identical CSVs and snapshots.
    ini.sections["experiment"]["out_dir"] = (tmp.path / "out_b").string();
    const auto again = run_experiment(make_experiment_config(ini));
    CHECK(read_file(manifests[0].csv_path) == read_file(again[0].csv_path));
    CHECK(read_file(manifests[0].qtable_path) == read_file(again[0].qtable_path));
}

TEST_CASE("converged values average the final window") {
    auto rows = synthetic_rows(10, 0.2, 1.0);
    for (int i = 5; i < 10; ++i) rows[i].goal = 0.4;
    CHECK(converged_values(rows, 5)[7] == doctest::Approx(0.4));
    CHECK(converged_values(rows, 10)[7] == doctest::Approx(0.3));
    CHECK(converged_values(rows, 100)[7] == doctest::Approx(0.3)); // clamps to length
    CHECK_THROWS_AS(converged_values({}, 5), MismatchedRuns);
}

TEST_CASE("compare: self comparison, planted effects, mismatched runs") {
    SUBCASE("a society compared with itself has delta 0 on every metric") {
        SocietyRuns s;
        s.name = "x";
        s.per_run = {{70, 30, 0, 10, 0.9, 2, 5, 0.2}, {68, 32, 1, 12, 0.8, 3, 6, 0.3},
                     {72, 28, 2, 11, 0.85, 2, 4, 0.25}};
        const ComparisonReport report = compare(s, {s});
        for (const ComparisonRow& row : report.rows) {
            REQUIRE(row.controls.size() == 1);
            REQUIRE(row.controls[0].delta.has_value());
            CHECK(*row.controls[0].delta == doctest::Approx(0.0));
            CHECK(row.controls[0].descriptor == "negligible");
            REQUIRE(row.controls[0].p.has_value());
            CHECK(*row.controls[0].p == doctest::Approx(1.0));
        }
    }
    SUBCASE("planted means reproduce the hand formula to 1e-9") {
        // Control goal values {0.1, 0.2, 0.3}: mean 0.2, sd 0.1. Experimental
        // {0.5, 0.6, 0.7}: mean 0.6. Delta = (0.6 - 0.2) / 0.1 = 4.
        auto runs_for = [](std::initializer_list<double> goals, const char* name) {
            SocietyRuns s;
            s.name = name;
            for (double g : goals) {
                std::array<double, 8> run{};
                run[7] = g;
                s.per_run.push_back(run);
            }
            return s;
        };
        const ComparisonReport report = compare(runs_for({0.5, 0.6, 0.7}, "e"),
                                                {runs_for({0.1, 0.2, 0.3}, "c")});
        const ComparisonCell& cell = report.rows[7].controls[0];
        CHECK(report.rows[7].experimental_mean == doctest::Approx(0.6).epsilon(1e-9));
        CHECK(cell.mean == doctest::Approx(0.2).epsilon(1e-9));
        REQUIRE(cell.delta.has_value());
        CHECK(*cell.delta == doctest::Approx(4.0).epsilon(1e-9));
        CHECK(cell.descriptor == "large");
    }
    SUBCASE("unequal run counts are rejected") {
        SocietyRuns a, b;
        a.name = "a";
        b.name = "b";
        a.per_run = {{}, {}};
        b.per_run = {{}};
        CHECK_THROWS_AS(compare(a, {b}), MismatchedRuns);
        CHECK_THROWS_AS(compare(a, {}), MismatchedRuns);
    }
}

TEST_CASE("comparison renders as csv and an aligned table") {
    SocietyRuns e, c;
    e.name = "nest";
    c.name = "primitive";
    e.per_run = {{70, 30, 0, 10, 0.9, 2, 5, 0.31}, {68, 32, 0, 12, 0.95, 3, 6, 0.29}};
    c.per_run = {{50, 40, 10, 10, 0.5, 0, 9, 0.20}, {55, 35, 10, 12, 0.6, 0, 8, 0.18}};
    const ComparisonReport report = compare(e, {c});
    const std::string csv = comparison_csv(report);
    CHECK(csv.starts_with(
        "metric,nest_mean,primitive_mean,primitive_p,primitive_delta,primitive_effect\n"));
    CHECK(csv.find("M_Goal,") != std::string::npos);
    const std::string table = comparison_table(report);
    CHECK(table.find("Metric") != std::string::npos);
    CHECK(table.find("M_Quarantine") != std::string::npos);
    // Degenerate cells (zero control variance on M_Quarantine) render as "-".
    CHECK(table.find("-") != std::string::npos);
}

TEST_CASE("load_society_runs reads run files in sorted order") {
    TempDir tmp;
    const fs::path dir = tmp.path / "soc";
    fs::create_directories(dir);
    write_metrics_csv((dir / "run_2.csv").string(), synthetic_rows(4, 0.4, 1.0));
    write_metrics_csv((dir / "run_1.csv").string(), synthetic_rows(4, 0.2, 1.0));
    const SocietyRuns runs = load_society_runs(dir.string(), 4);
    CHECK(runs.name == "soc");
    REQUIRE(runs.per_run.size() == 2);
    CHECK(runs.per_run[0][7] == doctest::Approx(0.2));
    CHECK(runs.per_run[1][7] == doctest::Approx(0.4));
    CHECK_THROWS_AS(load_society_runs((tmp.path / "empty").string(), 4), IoError);
}
