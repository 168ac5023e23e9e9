// Experiment runner CLI: `simulate` trains and records runs per society;
// `compare` builds the cross-society statistics report.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nest/config.hpp"
#include "nest/experiment.hpp"

namespace {

int run_simulate(const std::string& config_file, const std::vector<std::string>& societies,
                 int seeds, long base_seed, int steps, long train_steps, int population,
                 const std::string& out_dir, int jobs, const std::string& norms_file) {
    nest::IniFile ini;
    if (!config_file.empty()) ini = nest::IniFile::load(config_file);
    // Flags override file values by rewriting the parsed sections, keeping
    // the config hash authoritative over the effective settings.
    if (!societies.empty()) {
        std::string joined;
        for (const std::string& s : societies) joined += (joined.empty() ? "" : ",") + s;
        ini.sections["experiment"]["societies"] = joined;
    }
    if (seeds > 0) ini.sections["experiment"]["seeds"] = std::to_string(seeds);
    if (base_seed >= 0) ini.sections["experiment"]["base_seed"] = std::to_string(base_seed);
    if (!out_dir.empty()) ini.sections["experiment"]["out_dir"] = out_dir;
    if (jobs > 0) ini.sections["experiment"]["jobs"] = std::to_string(jobs);
    if (!norms_file.empty()) ini.sections["experiment"]["norms_file"] = norms_file;
    if (steps > 0) ini.sections["world"]["episode_steps"] = std::to_string(steps);
    if (population > 0) ini.sections["world"]["population"] = std::to_string(population);
    if (train_steps >= 0) ini.sections["learning"]["train_steps"] = std::to_string(train_steps);

    const nest::ExperimentConfig cfg = nest::make_experiment_config(ini);
    const auto manifests = nest::run_experiment(cfg);
    std::printf("completed %zu runs into %s (config hash %016llx)\n", manifests.size(),
                cfg.out_dir.c_str(),
                static_cast<unsigned long long>(nest::config_hash(cfg.source)));
    return 0;
}

int run_compare(const std::string& experimental_dir,
                const std::vector<std::string>& control_dirs, const std::string& out_file,
                int convergence_window) {
    const nest::SocietyRuns experimental =
        nest::load_society_runs(experimental_dir, convergence_window);
    std::vector<nest::SocietyRuns> controls;
    for (const std::string& dir : control_dirs)
        controls.push_back(nest::load_society_runs(dir, convergence_window));
    const nest::ComparisonReport report = nest::compare(experimental, controls);
    const std::string csv = nest::comparison_csv(report);
    const std::string table = nest::comparison_table(report);
    if (!out_file.empty()) {
        std::ofstream out(out_file, std::ios::binary);
        if (!out) throw nest::IoError("cannot write comparison report", out_file);
        out << csv;
        std::ofstream tout(out_file + ".txt", std::ios::binary);
        if (!tout) throw nest::IoError("cannot write comparison table", out_file + ".txt");
        tout << table;
    }
    std::cout << table;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Norm-emergence simulator experiment runner"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Train and record runs");
    std::vector<std::string> societies;
    int seeds = -1, steps = -1, population = -1, jobs = -1;
    long base_seed = -1, train_steps = -1;
    std::string out_dir, config_file, norms_file;
    simulate->add_option("--society", societies, "Society preset(s)")
        ->check(CLI::IsMember({"primitive", "penalty", "tell", "emote", "nest"}));
    simulate->add_option("--seeds", seeds, "Number of seeds");
    simulate->add_option("--base-seed", base_seed, "First seed of the batch");
    simulate->add_option("--steps", steps, "Evaluation episode length");
    simulate->add_option("--train-steps", train_steps, "Total training steps");
    simulate->add_option("--population", population, "Number of agents");
    simulate->add_option("--out", out_dir, "Output directory");
    simulate->add_option("--jobs", jobs, "Parallel runs");
    simulate->add_option("--config", config_file, "Config file (flags override)")
        ->check(CLI::ExistingFile);
    simulate->add_option("--norms", norms_file, "Norms listing file")
        ->check(CLI::ExistingFile);

    // compare
    auto* compare = app.add_subcommand("compare", "Compare recorded run sets");
    std::string experimental_dir, out_file;
    std::vector<std::string> control_dirs;
    int convergence_window = 500;
    compare->add_option("--experimental", experimental_dir, "Experimental run directory")
        ->required();
    compare->add_option("--controls", control_dirs, "Control run directories")->required();
    compare->add_option("--out", out_file, "Report CSV path (a .txt table is also written)");
    compare->add_option("--convergence-window", convergence_window,
                        "Final rows averaged per run");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return run_simulate(config_file, societies, seeds, base_seed, steps, train_steps,
                                population, out_dir, jobs, norms_file);
        return run_compare(experimental_dir, control_dirs, out_file, convergence_window);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
