// Experiment configuration: sectioned key-value file parsing, defaults,
// override precedence, and a stable configuration hash.

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nest/domain.hpp"
#include "nest/society.hpp"
#include "nest/world.hpp"

namespace nest {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what, const std::string& path_)
        : std::runtime_error(what + ": " + path_), path(path_) {}
    std::string path;
};

// Flat sectioned key-value text: [section] headers, key = value lines,
// '#' or ';' comments, blank lines ignored.
struct IniFile {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static IniFile parse(std::string_view text) {
        IniFile ini;
        std::string section;
        std::size_t line_no = 0;
        std::istringstream in{std::string(text)};
        for (std::string line; std::getline(in, line);) {
            ++line_no;
            const auto comment = line.find_first_of("#;");
            if (comment != std::string::npos) line.erase(comment);
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            const auto last = line.find_last_not_of(" \t\r");
            line = line.substr(first, last - first + 1);
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError("unterminated section header at line " +
                                      std::to_string(line_no));
                section = line.substr(1, line.size() - 2);
                ini.sections[section];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("expected key = value at line " + std::to_string(line_no));
            auto strip = [](std::string s) {
                const auto b = s.find_first_not_of(" \t");
                if (b == std::string::npos) return std::string();
                const auto e = s.find_last_not_of(" \t");
                return s.substr(b, e - b + 1);
            };
            const std::string key = strip(line.substr(0, eq));
            if (key.empty())
                throw ConfigError("empty key at line " + std::to_string(line_no));
            ini.sections[section][key] = strip(line.substr(eq + 1));
        }
        return ini;
    }

    static IniFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file", path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    const std::string* find(const std::string& section, const std::string& key) const {
        const auto s = sections.find(section);
        if (s == sections.end()) return nullptr;
        const auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        return &k->second;
    }

    // Canonical dump: sections and keys in sorted order, one key = value per
    // line. Two files differing only in ordering dump identically.
    std::string canonical() const {
        std::string out;
        for (const auto& [section, keys] : sections) {
            out += "[" + section + "]\n";
            for (const auto& [key, value] : keys) out += key + " = " + value + "\n";
        }
        return out;
    }
};

namespace detail {

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + what + ": '" + s + "'");
    }
}

inline long parse_long(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + what + ": '" + s + "'");
    }
}

inline bool parse_bool(const std::string& s, const std::string& what) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("bad boolean value for " + what + ": '" + s + "'");
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t");
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

} // namespace detail

// FNV-1a 64-bit over the canonical dump; stable under key reordering.
inline std::uint64_t config_hash(const IniFile& ini) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : ini.canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Everything a batch needs: which societies, how many seeds, scale knobs, and
// per-section overrides of the simulation parameters.
struct ExperimentConfig {
    std::vector<std::string> societies = {"nest"};
    int n_seeds = 20;
    std::uint64_t base_seed = 1;
    std::string out_dir = "out";
    int rolling_window = 50;
    int convergence_window = 500;
    int jobs = 1;
    std::string norms_file; // empty selects the built-in norms
    SimConfig sim;          // sim.society is replaced per selected society
    IniFile source;         // canonical record of the file + flag overrides

    void validate() const {
        if (n_seeds < 1) throw ConfigError("seeds must be >= 1");
        if (rolling_window < 1) throw ConfigError("rolling window must be >= 1");
        if (convergence_window < 1) throw ConfigError("convergence window must be >= 1");
        if (jobs < 1) throw ConfigError("jobs must be >= 1");
        if (societies.empty()) throw ConfigError("at least one society required");
        for (const std::string& s : societies) SocietyProfile::by_name(s); // throws
        sim.world.validate();
        sim.disease.validate();
        sim.observation.validate();
        sim.learn.validate();
    }
};

namespace detail {

inline void apply_world(const IniFile& ini, WorldConfig& w) {
    if (const auto* v = ini.find("world", "population"))
        w.population = static_cast<int>(parse_long(*v, "world.population"));
    if (const auto* v = ini.find("world", "initial_infected_fraction"))
        w.initial_infected_fraction = parse_double(*v, "world.initial_infected_fraction");
    if (const auto* v = ini.find("world", "episode_steps"))
        w.episode_steps = static_cast<int>(parse_long(*v, "world.episode_steps"));
    if (const auto* v = ini.find("world", "quarantine_duration"))
        w.quarantine_duration = static_cast<int>(parse_long(*v, "world.quarantine_duration"));
    if (const auto* v = ini.find("world", "p_interact"))
        w.p_interact = parse_double(*v, "world.p_interact");
    if (const auto* v = ini.find("world", "fixed_goal")) {
        if (v->empty() || *v == "none") w.fixed_goal.reset();
        else w.fixed_goal = goal_from_string(*v);
    }
}

inline void apply_disease(const IniFile& ini, DiseaseParams& d) {
    struct Key { const char* name; double* field; };
    const Key keys[] = {
        {"infection_prob", &d.infection_prob},
        {"vaccine_multiplier", &d.vaccine_multiplier},
        {"home_divisor", &d.home_divisor},
        {"progress_asym_to_mild", &d.progress_asym_to_mild},
        {"progress_mild_to_critical", &d.progress_mild_to_critical},
        {"progress_critical_to_deceased", &d.progress_critical_to_deceased},
        {"recover_asym", &d.recover_asym},
        {"recover_mild", &d.recover_mild},
        {"recover_critical", &d.recover_critical},
    };
    for (const Key& k : keys)
        if (const auto* v = ini.find("disease", k.name))
            *k.field = parse_double(*v, std::string("disease.") + k.name);
}

inline void apply_observation(const IniFile& ini, ObservationModel& m) {
    const char* rows[] = {"healthy", "asymptomatic", "mild", "critical"};
    for (int r = 0; r < 4; ++r) {
        const auto* v = ini.find("observation", rows[r]);
        if (!v) continue;
        const auto parts = split_list(*v);
        if (parts.size() != 3)
            throw ConfigError(std::string("observation.") + rows[r] +
                              " needs 3 comma-separated probabilities");
        for (int c = 0; c < 3; ++c)
            m.rows[r][c] = parse_double(parts[c], std::string("observation.") + rows[r]);
    }
}

inline void apply_society(const IniFile& ini, SocietyProfile& s) {
    const char* kinds[] = {"mixture_sanction", "mixture_tell", "mixture_emote",
                           "mixture_hint", "mixture_none"};
    for (int k = 0; k < kCommKindCount; ++k)
        if (const auto* v = ini.find("society", kinds[k]))
            s.mixture[k] = parse_double(*v, std::string("society.") + kinds[k]);
    if (const auto* v = ini.find("society", "weight_immediate"))
        s.weight_immediate = parse_double(*v, "society.weight_immediate");
    if (const auto* v = ini.find("society", "weight_potential"))
        s.weight_potential = parse_double(*v, "society.weight_potential");
    if (const auto* v = ini.find("society", "kappa"))
        s.kappa = parse_double(*v, "society.kappa");
}

inline void apply_learning(const IniFile& ini, LearnParams& lp) {
    if (const auto* v = ini.find("learning", "learning_rate"))
        lp.learning_rate = parse_double(*v, "learning.learning_rate");
    if (const auto* v = ini.find("learning", "discount"))
        lp.discount = parse_double(*v, "learning.discount");
    if (const auto* v = ini.find("learning", "epsilon"))
        lp.epsilon = parse_double(*v, "learning.epsilon");
    if (const auto* v = ini.find("learning", "kappa_tell"))
        lp.kappa_tell = parse_double(*v, "learning.kappa_tell");
    if (const auto* v = ini.find("learning", "kappa_hint"))
        lp.kappa_hint = parse_double(*v, "learning.kappa_hint");
    if (const auto* v = ini.find("learning", "train_steps"))
        lp.train_steps = parse_long(*v, "learning.train_steps");
    if (const auto* v = ini.find("learning", "shaping_enabled"))
        lp.shaping_enabled = parse_bool(*v, "learning.shaping_enabled");
    if (const auto* v = ini.find("learning", "potential_updates_enabled"))
        lp.potential_updates_enabled = parse_bool(*v, "learning.potential_updates_enabled");
}

} // namespace detail

// Builds the effective config from a parsed file over the defaults. CLI flag
// overrides are applied by writing them into `ini` beforehand, preserving the
// flags > file > defaults precedence and keeping the hash authoritative.
inline ExperimentConfig make_experiment_config(const IniFile& ini) {
    ExperimentConfig cfg;
    if (const auto* v = ini.find("experiment", "societies"))
        cfg.societies = detail::split_list(*v);
    if (const auto* v = ini.find("experiment", "seeds"))
        cfg.n_seeds = static_cast<int>(detail::parse_long(*v, "experiment.seeds"));
    if (const auto* v = ini.find("experiment", "base_seed"))
        cfg.base_seed =
            static_cast<std::uint64_t>(detail::parse_long(*v, "experiment.base_seed"));
    if (const auto* v = ini.find("experiment", "out_dir")) cfg.out_dir = *v;
    if (const auto* v = ini.find("experiment", "rolling_window"))
        cfg.rolling_window =
            static_cast<int>(detail::parse_long(*v, "experiment.rolling_window"));
    if (const auto* v = ini.find("experiment", "convergence_window"))
        cfg.convergence_window =
            static_cast<int>(detail::parse_long(*v, "experiment.convergence_window"));
    if (const auto* v = ini.find("experiment", "jobs"))
        cfg.jobs = static_cast<int>(detail::parse_long(*v, "experiment.jobs"));
    if (const auto* v = ini.find("experiment", "norms_file")) cfg.norms_file = *v;

    detail::apply_world(ini, cfg.sim.world);
    detail::apply_disease(ini, cfg.sim.disease);
    detail::apply_observation(ini, cfg.sim.observation);
    detail::apply_learning(ini, cfg.sim.learn);
    cfg.source = ini;
    cfg.validate();
    return cfg;
}

// Resolves the simulation config for one society, with [society] file
// overrides applied on top of the named preset.
inline SimConfig society_sim_config(const ExperimentConfig& cfg, const std::string& society) {
    SimConfig sim = cfg.sim;
    sim.society = SocietyProfile::by_name(society);
    detail::apply_society(cfg.source, sim.society);
    sim.society.validate();
    return sim;
}

} // namespace nest
