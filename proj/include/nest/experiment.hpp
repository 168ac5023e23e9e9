// Batch execution: training + evaluation runs per (society, seed), CSV and
// Q-table artifacts, run manifests, and the cross-society comparison report.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nest/config.hpp"
#include "nest/metrics.hpp"
#include "nest/norm_parser.hpp"
#include "nest/stats.hpp"
#include "nest/world.hpp"

namespace nest {

inline constexpr std::string_view kCsvHeader =
    "steps,healthy,infected,deceased,vaccinated,isolation,forced_quarantine,"
    "total_number_infections,desire_satisfaction";

inline constexpr std::string_view kCodeVersion = "1.0.0";

struct MismatchedRuns : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string format_csv_row(const MetricsRow& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%ld,%.6f,%.6f,%.6f,%.6f,%.6f,%ld,%ld,%.6f",
                  r.step, r.healthy, r.infected, r.deceased, r.vaccinated, r.home,
                  static_cast<long>(r.quarantine), r.raw_infections, r.goal);
    return buf;
}

inline void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write metrics csv", path);
    out << kCsvHeader << '\n';
    for (const MetricsRow& r : rows) out << format_csv_row(r) << '\n';
    if (!out) throw IoError("failed writing metrics csv", path);
}

inline std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read metrics csv", path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty metrics csv", path);
    if (line.ends_with('\r')) line.pop_back();
    if (line != kCsvHeader) throw IoError("unexpected csv header", path);
    std::vector<MetricsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        MetricsRow r;
        double quarantine = 0.0, infections = 0.0;
        if (std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &r.step,
                        &r.healthy, &r.infected, &r.deceased, &r.vaccinated, &r.home,
                        &quarantine, &infections, &r.goal) != 9)
            throw IoError("malformed csv row", path);
        r.quarantine = quarantine;
        r.raw_infections = static_cast<long>(infections);
        r.infections = infections;
        rows.push_back(r);
    }
    return rows;
}

// Flat text Q-table snapshot: one (state, action, value) per line, suitable
// for inspection and warm starts.
inline void write_qtable(const std::string& path, const StateActionTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write q-table", path);
    out << "symptom vaccinated quarantined goal location action value\n";
    for (int si = 0; si < kStateCount; ++si) {
        StateKey s;
        int i = si;
        s.loc = static_cast<LocCategory>(i % kActionCount); i /= kActionCount;
        s.goal = static_cast<GoalKind>(i % kGoalCount);     i /= kGoalCount;
        s.quarantined = (i % 2) != 0;                       i /= 2;
        s.vaccinated = (i % 2) != 0;                        i /= 2;
        s.symptom = static_cast<Symptom>(i);
        for (int ai = 0; ai < kActionCount; ++ai) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%s %d %d %s %s %s %.17g\n",
                          std::string(to_string(s.symptom)).c_str(), s.vaccinated ? 1 : 0,
                          s.quarantined ? 1 : 0, std::string(to_string(s.goal)).c_str(),
                          std::string(to_string(s.loc)).c_str(),
                          std::string(to_string(static_cast<ActionKind>(ai))).c_str(),
                          table.values[si * kActionCount + ai]);
            out << buf;
        }
    }
    if (!out) throw IoError("failed writing q-table", path);
}

// Reads a snapshot written by write_qtable, for inspection and warm starts.
inline StateActionTable read_qtable(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read q-table", path);
    std::string header;
    std::getline(in, header);
    StateActionTable table;
    std::string symptom, goal, loc, action;
    int vaccinated = 0, quarantined = 0;
    double value = 0.0;
    int count = 0;
    while (in >> symptom >> vaccinated >> quarantined >> goal >> loc >> action >> value) {
        StateKey s;
        if (symptom == "MILD") s.symptom = Symptom::Mild;
        else if (symptom == "CRITICAL") s.symptom = Symptom::Critical;
        else if (symptom != "HEALTHY") throw IoError("bad q-table symptom " + symptom, path);
        s.vaccinated = vaccinated != 0;
        s.quarantined = quarantined != 0;
        s.goal = goal_from_string(goal);
        if (loc == "HOME") s.loc = LocCategory::Home;
        else if (loc == "PARK") s.loc = LocCategory::Park;
        else if (loc == "CAFE") s.loc = LocCategory::Cafe;
        else if (loc == "CLINIC") s.loc = LocCategory::Clinic;
        else throw IoError("bad q-table location " + loc, path);
        ActionKind a;
        if (action == "STAY_HOME") a = ActionKind::StayHome;
        else if (action == "VISIT_PARK") a = ActionKind::VisitPark;
        else if (action == "VISIT_CAFE") a = ActionKind::VisitCafe;
        else if (action == "VISIT_CLINIC") a = ActionKind::VisitClinic;
        else throw IoError("bad q-table action " + action, path);
        table.at(s, a) = value;
        ++count;
    }
    if (count != kEntryCount) throw IoError("q-table entry count mismatch", path);
    return table;
}

struct RunManifest {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string society;
    std::string code_version{kCodeVersion};
    std::string started_at;
    std::string finished_at;
    std::string csv_path;
    std::string qtable_path;
};

inline std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json manifest_json(const RunManifest& m) {
    return nlohmann::json{{"config_hash", m.config_hash},
                          {"seed", m.seed},
                          {"society", m.society},
                          {"code_version", m.code_version},
                          {"started_at", m.started_at},
                          {"finished_at", m.finished_at},
                          {"csv_path", m.csv_path},
                          {"qtable_path", m.qtable_path}};
}

struct RunResult {
    std::vector<MetricsRow> rows;
    QTable q;
    PotentialTable phi;
};

// Trains for train_steps total (episodes reset every episode_steps; learned
// tables persist), then records one evaluation episode.
inline RunResult run_single(const SimConfig& cfg, std::uint64_t seed) {
    Simulation sim(cfg, seed);
    const int episode_steps = cfg.world.episode_steps;
    for (long t = 0; t < cfg.learn.train_steps; ++t) {
        if (sim.episode_step() >= episode_steps) sim.reset_world();
        sim.step();
    }
    sim.reset_world();
    RunResult result;
    result.rows.reserve(episode_steps);
    for (int t = 0; t < episode_steps; ++t) result.rows.push_back(sim.step().metrics);
    result.q = sim.q_table();
    result.phi = sim.potential_table();
    return result;
}

// Runs every (society, seed) pair, in parallel up to `jobs` threads, writing
// per-run CSVs and Q-table snapshots plus one manifest for the batch.
inline std::vector<RunManifest> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;

    std::vector<Norm> norms;
    if (!cfg.norms_file.empty()) {
        std::ifstream in(cfg.norms_file);
        if (!in) throw IoError("cannot open norms file", cfg.norms_file);
        std::ostringstream buf;
        buf << in.rdbuf();
        norms = parse_norm_file(buf.str());
    }

    struct Task {
        std::string society;
        std::uint64_t seed;
        SimConfig sim;
        RunManifest manifest;
    };
    std::vector<Task> tasks;
    const std::uint64_t hash = config_hash(cfg.source);
    for (const std::string& society : cfg.societies) {
        const fs::path dir = fs::path(cfg.out_dir) / society;
        fs::create_directories(dir);
        SimConfig sim = society_sim_config(cfg, society);
        sim.norms = norms;
        for (int i = 0; i < cfg.n_seeds; ++i) {
            Task task;
            task.society = society;
            task.seed = cfg.base_seed + static_cast<std::uint64_t>(i);
            task.sim = sim;
            task.manifest.config_hash = hash;
            task.manifest.seed = task.seed;
            task.manifest.society = society;
            task.manifest.csv_path =
                (dir / ("run_" + std::to_string(task.seed) + ".csv")).string();
            task.manifest.qtable_path =
                (dir / ("qtable_" + std::to_string(task.seed) + ".txt")).string();
            tasks.push_back(std::move(task));
        }
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(tasks.size());
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            Task& task = tasks[i];
            try {
                task.manifest.started_at = iso_timestamp();
                const RunResult result = run_single(task.sim, task.seed);
                write_metrics_csv(task.manifest.csv_path, result.rows);
                write_qtable(task.manifest.qtable_path, result.q);
                task.manifest.finished_at = iso_timestamp();
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const int n_threads = std::min<int>(cfg.jobs, static_cast<int>(tasks.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    for (const std::string& e : errors)
        if (!e.empty()) throw std::runtime_error("run failed: " + e);

    std::vector<RunManifest> manifests;
    nlohmann::json batch = nlohmann::json::array();
    for (const Task& task : tasks) {
        manifests.push_back(task.manifest);
        batch.push_back(manifest_json(task.manifest));
    }
    std::ofstream mout(fs::path(cfg.out_dir) / "manifest.json", std::ios::binary);
    if (!mout) throw IoError("cannot write manifest", cfg.out_dir + "/manifest.json");
    mout << batch.dump(2) << '\n';
    return manifests;
}

// --- comparison -------------------------------------------------------------

inline constexpr std::array<std::string_view, 8> kMetricNames = {
    "M_Healthy",   "M_Infected",   "M_Deceased", "M_Vaccinated",
    "M_Home",      "M_Quarantine", "M_Infections", "M_Goal"};

namespace detail {

inline double metric_column(const MetricsRow& r, int metric) {
    switch (metric) {
    case 0: return r.healthy;
    case 1: return r.infected;
    case 2: return r.deceased;
    case 3: return r.vaccinated;
    case 4: return r.home;
    case 5: return r.quarantine;
    case 6: return static_cast<double>(r.raw_infections);
    case 7: return r.goal;
    }
    return 0.0;
}

} // namespace detail

// Per run, the "value upon convergence" of each metric: the mean over the
// final `window` evaluation rows.
inline std::array<double, 8> converged_values(const std::vector<MetricsRow>& rows,
                                              int window) {
    if (rows.empty()) throw MismatchedRuns("run has no rows");
    const std::size_t n = rows.size();
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(window), n);
    std::array<double, 8> out{};
    for (std::size_t i = n - w; i < n; ++i)
        for (int m = 0; m < 8; ++m) out[m] += detail::metric_column(rows[i], m);
    for (int m = 0; m < 8; ++m) out[m] /= static_cast<double>(w);
    return out;
}

struct SocietyRuns {
    std::string name;
    std::vector<std::array<double, 8>> per_run; // converged value per metric
};

// Loads every run_*.csv in a directory (sorted by filename) and reduces each
// to its converged metric values.
inline SocietyRuns load_society_runs(const std::string& dir, int convergence_window) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("not a run directory", dir);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.starts_with("run_") && name.ends_with(".csv"))
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no run_*.csv files in directory", dir);
    SocietyRuns runs;
    runs.name = fs::path(dir).filename().string();
    for (const std::string& f : files)
        runs.per_run.push_back(converged_values(read_metrics_csv(f), convergence_window));
    return runs;
}

struct ComparisonCell {
    double mean = 0.0;
    std::optional<double> p;     // vs experimental; empty when degenerate
    std::optional<double> delta; // Glass' delta vs experimental
    std::string descriptor;      // Cohen bin, or "-" when delta is empty
};

struct ComparisonRow {
    std::string metric;
    double experimental_mean = 0.0;
    std::vector<ComparisonCell> controls;
};

struct ComparisonReport {
    std::string experimental;
    std::vector<std::string> controls;
    std::vector<ComparisonRow> rows;
};

inline ComparisonReport compare(const SocietyRuns& experimental,
                                const std::vector<SocietyRuns>& controls) {
    if (controls.empty()) throw MismatchedRuns("need at least one control society");
    for (const SocietyRuns& c : controls)
        if (c.per_run.size() != experimental.per_run.size())
            throw MismatchedRuns("societies have different numbers of completed runs");
    ComparisonReport report;
    report.experimental = experimental.name;
    for (const SocietyRuns& c : controls) report.controls.push_back(c.name);

    auto column = [](const SocietyRuns& s, int m) {
        std::vector<double> xs;
        xs.reserve(s.per_run.size());
        for (const auto& run : s.per_run) xs.push_back(run[m]);
        return xs;
    };
    for (int m = 0; m < 8; ++m) {
        ComparisonRow row;
        row.metric = kMetricNames[m];
        const std::vector<double> exp_xs = column(experimental, m);
        row.experimental_mean = sample_mean(exp_xs);
        for (const SocietyRuns& c : controls) {
            const std::vector<double> ctl_xs = column(c, m);
            ComparisonCell cell;
            cell.mean = sample_mean(ctl_xs);
            try {
                cell.p = welch_t_test(exp_xs, ctl_xs).p;
            } catch (const DegenerateSample&) {
            }
            try {
                cell.delta = glass_delta(exp_xs, ctl_xs);
                cell.descriptor = cohen_descriptor(*cell.delta);
            } catch (const StatsError&) {
                cell.descriptor = "-";
            }
            row.controls.push_back(std::move(cell));
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

namespace detail {

inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt(*v) : std::string("-");
}

} // namespace detail

inline std::string comparison_csv(const ComparisonReport& report) {
    std::string out = "metric," + report.experimental + "_mean";
    for (const std::string& c : report.controls)
        out += "," + c + "_mean," + c + "_p," + c + "_delta," + c + "_effect";
    out += "\n";
    for (const ComparisonRow& row : report.rows) {
        out += row.metric + "," + detail::fmt(row.experimental_mean);
        for (const ComparisonCell& cell : row.controls) {
            out += "," + detail::fmt(cell.mean) + "," + detail::fmt_opt(cell.p) + "," +
                   detail::fmt_opt(cell.delta) + "," +
                   (cell.descriptor.empty() ? "-" : cell.descriptor);
        }
        out += "\n";
    }
    return out;
}

// Aligned plain-text table: metrics as rows, experimental society first, each
// control annotated with p, delta, and the Cohen descriptor.
inline std::string comparison_table(const ComparisonReport& report) {
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> header = {"Metric", report.experimental};
    for (const std::string& c : report.controls) {
        header.push_back(c);
        header.push_back("p");
        header.push_back("delta");
        header.push_back("effect");
    }
    grid.push_back(header);
    for (const ComparisonRow& row : report.rows) {
        std::vector<std::string> line = {row.metric, detail::fmt(row.experimental_mean)};
        for (const ComparisonCell& cell : row.controls) {
            line.push_back(detail::fmt(cell.mean));
            line.push_back(detail::fmt_opt(cell.p));
            line.push_back(detail::fmt_opt(cell.delta));
            line.push_back(cell.descriptor.empty() ? "-" : cell.descriptor);
        }
        grid.push_back(line);
    }
    std::vector<std::size_t> widths(grid[0].size(), 0);
    for (const auto& line : grid)
        for (std::size_t i = 0; i < line.size(); ++i)
            widths[i] = std::max(widths[i], line[i].size());
    std::string out;
    for (const auto& line : grid) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            out += line[i];
            if (i + 1 < line.size())
                out += std::string(widths[i] - line[i].size() + 2, ' ');
        }
        out += '\n';
    }
    return out;
}

} // namespace nest
