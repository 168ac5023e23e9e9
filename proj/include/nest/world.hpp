// The pandemic environment: places, goals, movement, pairwise contacts,
// quarantine, and the per-step orchestration loop.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nest/disease.hpp"
#include "nest/domain.hpp"
#include "nest/learning.hpp"
#include "nest/metrics.hpp"
#include "nest/norm.hpp"
#include "nest/norm_parser.hpp"
#include "nest/rng.hpp"
#include "nest/society.hpp"

namespace nest {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WorldConfig {
    int population = 100;
    double initial_infected_fraction = 0.30;
    int episode_steps = 2000;
    int quarantine_duration = 3;
    double p_interact = 1.0;
    std::optional<GoalKind> fixed_goal;

    void validate() const {
        if (population < 2) throw ConfigError("population must be >= 2");
        if (!(initial_infected_fraction >= 0.0 && initial_infected_fraction <= 1.0))
            throw ConfigError("initial infected fraction must be in [0,1]");
        if (episode_steps < 1) throw ConfigError("episode steps must be >= 1");
        if (quarantine_duration < 0) throw ConfigError("quarantine duration must be >= 0");
        if (!(p_interact >= 0.0 && p_interact <= 1.0))
            throw ConfigError("interaction probability must be in [0,1]");
    }
};

struct Agent {
    int id = 0;
    HealthState health = HealthState::Healthy;
    bool vaccinated = false;
    LocCategory location = LocCategory::Home;
    GoalKind goal = GoalKind::Rest;
    int quarantine_remaining = 0;
    long infections_caught = 0;
    long goals_satisfied = 0;

    bool alive() const { return health != HealthState::Deceased; }
};

// Uniform draw over the four goals; an already-vaccinated agent redraws
// among the remaining three.
inline GoalKind assign_goal(Rng& rng, bool vaccinated,
                            std::optional<GoalKind> fixed = std::nullopt) {
    if (fixed) return *fixed;
    if (vaccinated) return static_cast<GoalKind>(rng.below(3));
    return static_cast<GoalKind>(rng.below(4));
}

struct StepReport {
    long step = 0;
    bool episode_done = false;
    int new_infections = 0;
    int deaths = 0;
    int sanctions = 0;
    int communications = 0;
    int contacts = 0;
    int quarantine_in_public = 0; // post-movement invariant counter
    MetricsRow metrics;
};

struct SimConfig {
    WorldConfig world;
    DiseaseParams disease;
    ObservationModel observation;
    SocietyProfile society = SocietyProfile::nest();
    LearnParams learn;
    std::vector<Norm> norms; // empty selects the built-in norms

    void validate() const {
        world.validate();
        disease.validate();
        observation.validate();
        society.validate();
        learn.validate();
    }
};

// One simulation run: single-owner mutable state. Whole runs with distinct
// seeds are independent; the shared Q and potential tables persist across
// episode resets within a run.
class Simulation {
public:
    Simulation(SimConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
        cfg_.validate();
        if (cfg_.norms.empty()) cfg_.norms = builtin_norms();
        for (const Norm& n : cfg_.norms)
            if (n.norm_type == NormType::Prohibition) triggering_norms_.push_back(n);
        reset_world();
    }

    // Starts a fresh episode: agents at home, initial infections re-seeded,
    // goals redrawn. Learned tables persist.
    void reset_world() {
        const int n = cfg_.world.population;
        agents_.assign(n, Agent{});
        for (int i = 0; i < n; ++i) {
            agents_[i].id = i;
            agents_[i].goal = assign_goal(rng_.goals, false, cfg_.world.fixed_goal);
        }
        // Initial infections chosen uniformly without replacement.
        const int infected = static_cast<int>(
            std::lround(n * cfg_.world.initial_infected_fraction));
        std::vector<int> ids(n);
        for (int i = 0; i < n; ++i) ids[i] = i;
        for (int i = 0; i < infected; ++i) {
            const auto j = i + static_cast<int>(rng_.init.below(n - i));
            std::swap(ids[i], ids[j]);
            agents_[ids[i]].health = HealthState::Asymptomatic;
        }
        episode_step_ = 0;
        cumulative_infections_ = 0;
    }

    StepReport step() {
        StepReport report;
        report.step = episode_step_;
        if (episode_step_ >= cfg_.world.episode_steps) {
            report.episode_done = true;
            return report;
        }

        const int n = static_cast<int>(agents_.size());
        struct Acted {
            bool acted = false;
            StateKey state;
            ActionKind action = ActionKind::StayHome;
            GoalKind goal = GoalKind::Rest;
        };
        std::vector<Acted> acted(n);
        std::vector<AgentStepEvents> events(n);

        // Phase 1: goal already drawn; observe state and select an action.
        for (Agent& agent : agents_) {
            if (!agent.alive()) continue;
            Acted& rec = acted[agent.id];
            rec.acted = true;
            rec.goal = agent.goal;
            rec.state = state_key(agent);
            events[agent.id].acted = true;
            if (agent.quarantine_remaining > 0) {
                rec.action = ActionKind::StayHome;
                --agent.quarantine_remaining;
            } else {
                rec.action = select_action(q_, rec.state, cfg_.learn.epsilon,
                                           rng_.exploration);
            }
        }

        // Phase 2: movement; visiting the clinic vaccinates.
        for (Agent& agent : agents_) {
            if (!agent.alive()) continue;
            agent.location = destination(acted[agent.id].action);
            if (agent.location == LocCategory::Clinic) agent.vaccinated = true;
            if (agent.quarantine_remaining > 0 && is_public_place(agent.location))
                ++report.quarantine_in_public;
        }

        // Phase 3: contacts, observations, infection attempts. Health is
        // snapshotted so agents infected this step neither transmit nor
        // progress within the step.
        std::vector<HealthState> snapshot(n);
        for (int i = 0; i < n; ++i) snapshot[i] = agents_[i].health;

        struct Contact {
            int a, b;
            Symptom a_sees_b, b_sees_a;
        };
        std::vector<Contact> contacts;
        for (LocCategory place :
             {LocCategory::Park, LocCategory::Cafe, LocCategory::Clinic}) {
            std::vector<int> here;
            for (const Agent& agent : agents_)
                if (agent.alive() && agent.location == place) here.push_back(agent.id);
            for (std::size_t i = 0; i < here.size(); ++i) {
                for (std::size_t j = i + 1; j < here.size(); ++j) {
                    if (cfg_.world.p_interact < 1.0 &&
                        !rng_.contacts.bernoulli(cfg_.world.p_interact))
                        continue;
                    Contact c{here[i], here[j], Symptom::Healthy, Symptom::Healthy};
                    c.a_sees_b = observe_health(rng_.observation, snapshot[c.b],
                                                cfg_.observation);
                    c.b_sees_a = observe_health(rng_.observation, snapshot[c.a],
                                                cfg_.observation);
                    infect_if_exposed(c.a, c.b, snapshot, report);
                    infect_if_exposed(c.b, c.a, snapshot, report);
                    contacts.push_back(c);
                }
            }
        }
        report.contacts = static_cast<int>(contacts.size());

        // Phase 4: norm evaluation per contact with perceived health;
        // communications generated per society profile and delivered.
        if (cfg_.society.has_active_channels()) {
            for (const Contact& c : contacts) {
                communicate(c.a, c.b, c.a_sees_b, snapshot, events, report);
                communicate(c.b, c.a, c.b_sees_a, snapshot, events, report);
            }
        }

        // Phase 5: disease progression for everyone alive and not newly
        // infected this step.
        for (Agent& agent : agents_) {
            if (!agent.alive() || agent.health == HealthState::Healthy) continue;
            if (snapshot[agent.id] == HealthState::Healthy) continue; // infected this step
            agent.health = progress(rng_.disease, agent.health, agent.vaccinated,
                                    agent.location == LocCategory::Home, cfg_.disease);
            if (agent.health == HealthState::Deceased) {
                events[agent.id].died = true;
                ++report.deaths;
            }
        }

        // Phase 6: next goals, reward assembly, and learning updates, in
        // agent-id order for determinism.
        std::vector<GoalKind> next_goal(n, GoalKind::Rest);
        for (const Agent& agent : agents_) {
            if (!agent.alive()) continue;
            next_goal[agent.id] =
                assign_goal(rng_.goals, agent.vaccinated, cfg_.world.fixed_goal);
        }
        int goals_hit = 0;
        const bool shaping_on =
            cfg_.learn.shaping_enabled && cfg_.society.has_potential_channel();
        for (int i = 0; i < n; ++i) {
            if (!acted[i].acted) continue;
            Agent& agent = agents_[i];
            AgentStepEvents& ev = events[i];
            ev.goal_achieved = goal_satisfied(acted[i].goal, acted[i].action);
            if (ev.goal_achieved) {
                ++agent.goals_satisfied;
                ++goals_hit;
            }
            std::optional<StateKey> s_next;
            if (agent.alive()) {
                s_next = StateKey{own_symptom(agent.health), agent.vaccinated,
                                  agent.quarantine_remaining > 0, next_goal[i],
                                  agent.location};
            }
            if (shaping_on) {
                const ActionKind a_next =
                    s_next ? greedy_action(q_, *s_next) : ActionKind::StayHome;
                ev.shaping = shaping_reward(phi_, acted[i].state, acted[i].action, s_next,
                                            a_next, cfg_.learn.discount,
                                            cfg_.society.kappa);
            }
            const double reward = assemble_reward(ev).total();
            q_update(q_, acted[i].state, acted[i].action, reward, s_next, cfg_.learn);
            if (agent.alive()) agent.goal = next_goal[i];
        }

        // Phase 7: metrics.
        report.metrics = compute_metrics(episode_step_, goals_hit);
        ++episode_step_;
        return report;
    }

    MetricsRow compute_metrics(long step, int goals_hit) const {
        const auto n0 = static_cast<double>(agents_.size());
        int healthy = 0, infected = 0, deceased = 0, vaccinated = 0;
        int infected_home = 0, quarantined = 0;
        for (const Agent& agent : agents_) {
            if (agent.health == HealthState::Healthy) ++healthy;
            else if (agent.health == HealthState::Deceased) ++deceased;
            else {
                ++infected;
                if (agent.location == LocCategory::Home) ++infected_home;
            }
            if (agent.vaccinated) ++vaccinated;
            if (agent.alive() && agent.quarantine_remaining > 0) ++quarantined;
        }
        MetricsRow row;
        row.step = step;
        row.healthy = 100.0 * healthy / n0;
        row.infected = 100.0 * infected / n0;
        row.deceased = 100.0 * deceased / n0;
        row.vaccinated = 100.0 * vaccinated / n0;
        row.raw_infections = cumulative_infections_;
        row.infections = static_cast<double>(cumulative_infections_) / n0;
        row.home = infected == 0 ? 1.0
                                 : static_cast<double>(infected_home) / infected;
        row.quarantine = quarantined;
        const int alive = healthy + infected;
        row.goal = alive == 0 ? 0.0 : static_cast<double>(goals_hit) / alive;
        return row;
    }

    static StateKey state_key(const Agent& agent) {
        return StateKey{own_symptom(agent.health), agent.vaccinated,
                        agent.quarantine_remaining > 0, agent.goal, agent.location};
    }

    const std::vector<Agent>& agents() const { return agents_; }
    std::vector<Agent>& mutable_agents() { return agents_; }
    const QTable& q_table() const { return q_; }
    QTable& mutable_q_table() { return q_; }
    const PotentialTable& potential_table() const { return phi_; }
    const SimConfig& config() const { return cfg_; }
    long cumulative_infections() const { return cumulative_infections_; }
    long episode_step() const { return episode_step_; }

private:
    void infect_if_exposed(int target, int source, const std::vector<HealthState>& snapshot,
                           StepReport& report) {
        if (snapshot[target] != HealthState::Healthy || !is_infectious(snapshot[source]))
            return;
        Agent& t = agents_[target];
        if (t.health != HealthState::Healthy) return; // already infected this step
        if (try_infect(rng_.disease, t.vaccinated, cfg_.disease)) {
            t.health = HealthState::Asymptomatic;
            ++t.infections_caught;
            ++cumulative_infections_;
            ++report.new_infections;
        }
    }

    // One ordered (observer, actor) evaluation; at most one communication
    // per pair per step.
    void communicate(int observer, int actor, Symptom perceived,
                     const std::vector<HealthState>& snapshot,
                     std::vector<AgentStepEvents>& events, StepReport& report) {
        if (is_symptomatic(snapshot[observer])) return; // symptomatic agents don't police
        Agent& actor_agent = agents_[actor];
        const AttributeView view{perceived, snapshot[actor], actor_agent.location,
                                 actor_agent.vaccinated};
        for (const Norm& norm : triggering_norms_) {
            const NormOutcome outcome = evaluate_norm(norm, view);
            if (outcome == NormOutcome::Inactive) continue;
            const bool open =
                outcome == NormOutcome::Violated
                    ? gate_by_severity(rng_.communication, perceived, true)
                    : gate_satisfaction(rng_.communication, true);
            if (!open) continue;
            const CommKind kind = select_comm_kind(rng_.communication, cfg_.society);
            CommEvent event = build_event(kind, observer, actor, view, outcome);
            deliver(event, events, report);
            ++report.communications;
            break;
        }
    }

    void deliver(const CommEvent& event, std::vector<AgentStepEvents>& events,
                 StepReport& report) {
        Agent& actor = agents_[event.receiver];
        AgentStepEvents& actor_ev = events[event.receiver];
        if (event.kind == CommKind::Sanction) {
            if (event.valence == Valence::Disapproving) {
                ++actor_ev.sanctions;
                ++report.sanctions;
                actor.quarantine_remaining = std::max(actor.quarantine_remaining,
                                                      cfg_.world.quarantine_duration);
            }
        } else {
            actor_ev.self_emotion += interpret(event, ReceiverRole::Actor).intrinsic;
        }
        if (event.info && cfg_.learn.potential_updates_enabled)
            update_potential(phi_, *event.info);
        // Co-located agents witness the communication and learn vicariously.
        for (const Agent& other : agents_) {
            if (!other.alive() || other.location != actor.location) continue;
            if (other.id == event.sender || other.id == event.receiver) continue;
            events[other.id].witness_extrinsic +=
                interpret(event, ReceiverRole::Witness).extrinsic;
        }
    }

    SimConfig cfg_;
    PhaseRngs rng_;
    std::vector<Agent> agents_;
    std::vector<Norm> triggering_norms_;
    QTable q_;
    PotentialTable phi_;
    long episode_step_ = 0;
    long cumulative_infections_ = 0;
};

} // namespace nest
