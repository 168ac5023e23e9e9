// Shared tabular Q-learning with epsilon-greedy selection and potential-based
// reward shaping populated from normative information.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "nest/domain.hpp"
#include "nest/norm.hpp"
#include "nest/rng.hpp"

namespace nest {

// Discretized agent state: 3 symptom levels x vaccinated x quarantined x
// 4 goals x 4 locations = 192 states.
struct StateKey {
    Symptom symptom = Symptom::Healthy;
    bool vaccinated = false;
    bool quarantined = false;
    GoalKind goal = GoalKind::Rest;
    LocCategory loc = LocCategory::Home;

    int index() const {
        int i = static_cast<int>(symptom);
        i = i * 2 + (vaccinated ? 1 : 0);
        i = i * 2 + (quarantined ? 1 : 0);
        i = i * kGoalCount + static_cast<int>(goal);
        i = i * kActionCount + static_cast<int>(loc);
        return i;
    }

    bool operator==(const StateKey&) const = default;
};

constexpr int kStateCount = kSymptomCount * 2 * 2 * kGoalCount * kActionCount; // 192
constexpr int kEntryCount = kStateCount * kActionCount;                        // 768

// Flat state-action table; missing entries read as 0 by construction.
struct StateActionTable {
    std::array<double, kEntryCount> values{};

    double& at(const StateKey& s, ActionKind a) {
        return values[s.index() * kActionCount + static_cast<int>(a)];
    }
    double at(const StateKey& s, ActionKind a) const {
        return values[s.index() * kActionCount + static_cast<int>(a)];
    }
    double max_over_actions(const StateKey& s) const {
        const int base = s.index() * kActionCount;
        double best = values[base];
        for (int a = 1; a < kActionCount; ++a)
            if (values[base + a] > best) best = values[base + a];
        return best;
    }
};

using QTable = StateActionTable;
using PotentialTable = StateActionTable;

struct LearnParams {
    double learning_rate = 0.001;
    double discount = 0.9;
    double kappa_hint = 0.3;
    double kappa_tell = 0.5;
    double epsilon = 0.1;
    long train_steps = 100000;
    bool shaping_enabled = true;
    bool potential_updates_enabled = true;

    void validate() const {
        if (!(learning_rate > 0.0 && learning_rate <= 1.0) && learning_rate != 0.0)
            throw std::invalid_argument("learning rate must be in [0,1]");
        if (!(discount >= 0.0 && discount < 1.0))
            throw std::invalid_argument("discount must be in [0,1)");
        if (!(epsilon >= 0.0 && epsilon <= 1.0))
            throw std::invalid_argument("epsilon must be in [0,1]");
        if (!(kappa_hint >= 0.0 && kappa_hint <= 1.0) ||
            !(kappa_tell >= 0.0 && kappa_tell <= 1.0))
            throw std::invalid_argument("kappa must be in [0,1]");
    }
};

// One-step Q-learning update; s_next empty means a terminal transition.
// Returns the new Q(s,a).
inline double q_update(QTable& q, const StateKey& s, ActionKind a, double reward,
                       const std::optional<StateKey>& s_next, const LearnParams& lp) {
    if (!std::isfinite(reward)) throw std::invalid_argument("non-finite reward");
    const double target =
        reward + (s_next ? lp.discount * q.max_over_actions(*s_next) : 0.0);
    double& value = q.at(s, a);
    value += lp.learning_rate * (target - value);
    return value;
}

// Shaping reward F = gamma * Phi(s',a') * kappa - Phi(s,a). kappa scales the
// look-ahead term only; the potential entries themselves stay at full
// sanction magnitude. s_next empty (terminal) contributes zero look-ahead.
inline double shaping_reward(const PotentialTable& phi, const StateKey& s, ActionKind a,
                             const std::optional<StateKey>& s_next, ActionKind a_next,
                             double gamma, double kappa) {
    const double ahead = s_next ? phi.at(*s_next, a_next) : 0.0;
    return gamma * ahead * kappa - phi.at(s, a);
}

// Greedy action with deterministic lowest-index tie-break; used for the
// look-ahead action in shaping.
inline ActionKind greedy_action(const QTable& q, const StateKey& s) {
    const int base = s.index() * kActionCount;
    int best = 0;
    for (int a = 1; a < kActionCount; ++a)
        if (q.values[base + a] > q.values[base + best]) best = a;
    return static_cast<ActionKind>(best);
}

// Epsilon-greedy selection; greedy ties are broken uniformly at random.
inline ActionKind select_action(const QTable& q, const StateKey& s, double epsilon,
                                Rng& rng) {
    if (epsilon > 0.0 && rng.bernoulli(epsilon))
        return static_cast<ActionKind>(rng.below(kActionCount));
    const int base = s.index() * kActionCount;
    double best = q.values[base];
    for (int a = 1; a < kActionCount; ++a)
        if (q.values[base + a] > best) best = q.values[base + a];
    std::array<int, kActionCount> ties{};
    int n_ties = 0;
    for (int a = 0; a < kActionCount; ++a)
        if (q.values[base + a] == best) ties[n_ties++] = a;
    if (n_ties == 1) return static_cast<ActionKind>(ties[0]);
    return static_cast<ActionKind>(ties[rng.below(n_ties)]);
}

namespace detail {

// Whether a discretized (state, action) pair realizes a condition. Health
// conditions match the state's symptom level (asymptomatic is felt as
// healthy); location conditions match the action's destination, since the
// action determines where the described outcome would occur.
inline bool pair_matches(const Condition& c, const StateKey& s, ActionKind a) {
    switch (c.attr) {
    case Attr::ObsHealth:
        return c.admits(static_cast<int>(s.symptom));
    case Attr::ActualHealth: {
        const Symptom sym = s.symptom;
        if (c.admits(static_cast<int>(HealthState::Healthy)) && sym == Symptom::Healthy)
            return true;
        if (c.admits(static_cast<int>(HealthState::Asymptomatic)) && sym == Symptom::Healthy)
            return true;
        if (c.admits(static_cast<int>(HealthState::Mild)) && sym == Symptom::Mild)
            return true;
        if (c.admits(static_cast<int>(HealthState::Critical)) && sym == Symptom::Critical)
            return true;
        return false;
    }
    case Attr::Loc:
        return c.admits(static_cast<int>(destination(a)));
    case Attr::Vaccinated:
        return c.admits(s.vaccinated ? 0 : 1);
    }
    return false;
}

} // namespace detail

// Writes the anticipated sanction value into every (state, action) pair whose
// realized view matches the conditional's antecedent: -1 for PUNISHMENT, +1
// for REWARD. kappa is not folded in here; it applies at shaping time.
inline void update_potential(PotentialTable& phi, const NormativeInfo& info) {
    const double value = info.consequent == InfoConsequent::Punishment ? -1.0 : 1.0;
    for (int si = 0; si < kStateCount; ++si) {
        StateKey s;
        int i = si;
        s.loc = static_cast<LocCategory>(i % kActionCount); i /= kActionCount;
        s.goal = static_cast<GoalKind>(i % kGoalCount);     i /= kGoalCount;
        s.quarantined = (i % 2) != 0;                       i /= 2;
        s.vaccinated = (i % 2) != 0;                        i /= 2;
        s.symptom = static_cast<Symptom>(i);
        for (int ai = 0; ai < kActionCount; ++ai) {
            const auto a = static_cast<ActionKind>(ai);
            bool all = true;
            for (const Condition& c : info.antecedent)
                if (!detail::pair_matches(c, s, a)) { all = false; break; }
            if (all) phi.at(s, a) = value;
        }
    }
}

// Per-step reward breakdown, itemized into the extrinsic / intrinsic /
// shaping categories of the reward function.
struct RewardContribution {
    double extrinsic = 0.0;
    double intrinsic = 0.0;
    double shaping = 0.0;

    double total() const { return extrinsic + intrinsic + shaping; }

    RewardContribution& operator+=(const RewardContribution& o) {
        extrinsic += o.extrinsic;
        intrinsic += o.intrinsic;
        shaping += o.shaping;
        return *this;
    }
};

// Everything that happened to one agent during a step, for reward assembly.
struct AgentStepEvents {
    bool died = false;
    int sanctions = 0;
    bool goal_achieved = false;
    bool acted = false;             // took an action this step (was alive)
    double self_emotion = 0.0;      // guilt/pleasure from emotes and hints
    double witness_extrinsic = 0.0; // vicarious rewards for witnessed events
    double shaping = 0.0;
};

inline RewardContribution assemble_reward(const AgentStepEvents& ev) {
    RewardContribution r;
    if (ev.died) r.extrinsic += -2.0;
    r.extrinsic += -1.0 * ev.sanctions;
    r.extrinsic += ev.witness_extrinsic;
    if (ev.acted) r.intrinsic += ev.goal_achieved ? 1.0 : -1.0;
    r.intrinsic += ev.self_emotion;
    r.shaping = ev.shaping;
    return r;
}

} // namespace nest
