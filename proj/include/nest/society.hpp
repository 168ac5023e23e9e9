// The five society profiles and the social communication channel: severity
// gating, kind selection, event construction, and reward interpretation.

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nest/domain.hpp"
#include "nest/learning.hpp"
#include "nest/norm.hpp"
#include "nest/rng.hpp"

namespace nest {

enum class CommKind : std::uint8_t { Sanction = 0, Tell = 1, Emote = 2, Hint = 3, None = 4 };

constexpr int kCommKindCount = 5;

inline std::string_view to_string(CommKind k) {
    constexpr std::array<std::string_view, 5> names = {"sanction", "tell", "emote", "hint",
                                                       "none"};
    return names[static_cast<std::size_t>(k)];
}

struct SocietyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoActiveChannels : SocietyError {
    NoActiveChannels() : SocietyError("society has no active communication channels") {}
};

struct SocietyProfile {
    std::string name;
    // Probability per CommKind, in enum order; the None mass models steps on
    // which the severity gate stays closed.
    std::array<double, kCommKindCount> mixture{};
    double weight_immediate = 0.0;
    double weight_potential = 0.0;
    double kappa = 0.0; // probability of a sanction implied by advice

    bool has_active_channels() const {
        for (int k = 0; k < kCommKindCount - 1; ++k)
            if (mixture[k] > 0.0) return true;
        return false;
    }

    bool has_emotional_channel() const {
        return mixture[static_cast<int>(CommKind::Emote)] > 0.0 ||
               mixture[static_cast<int>(CommKind::Hint)] > 0.0;
    }

    bool has_potential_channel() const {
        return mixture[static_cast<int>(CommKind::Tell)] > 0.0 ||
               mixture[static_cast<int>(CommKind::Hint)] > 0.0;
    }

    void validate() const {
        double sum = 0.0;
        for (double p : mixture) {
            if (!(p >= 0.0 && p <= 1.0))
                throw SocietyError("mixture probability out of [0,1]");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-9) throw SocietyError("mixture does not sum to 1");
        if (!(kappa >= 0.0 && kappa <= 1.0)) throw SocietyError("kappa out of [0,1]");
    }

    static SocietyProfile primitive() {
        return {"primitive", {0.0, 0.0, 0.0, 0.0, 1.0}, 0.0, 0.0, 0.0};
    }
    static SocietyProfile penalty() {
        return {"penalty", {0.38, 0.0, 0.0, 0.0, 0.62}, 1.0, 0.0, 0.0};
    }
    static SocietyProfile tell() {
        return {"tell", {0.20, 0.18, 0.0, 0.0, 0.62}, 1.0, 0.5, 0.5};
    }
    static SocietyProfile emote() {
        return {"emote", {0.20, 0.0, 0.18, 0.0, 0.62}, 1.5, 0.0, 0.0};
    }
    static SocietyProfile nest() {
        return {"nest", {0.20, 0.0, 0.0, 0.18, 0.62}, 1.5, 0.3, 0.3};
    }

    static SocietyProfile by_name(std::string_view name) {
        if (name == "primitive") return primitive();
        if (name == "penalty") return penalty();
        if (name == "tell") return tell();
        if (name == "emote") return emote();
        if (name == "nest") return nest();
        throw SocietyError("unknown society: " + std::string(name));
    }
};

// Whether an observer reacts at all to a perceived norm outcome: 50% for
// mild symptoms in public, 80% for critical. Satisfaction-triggered
// communication is gated at the mild rate uniformly.
inline bool gate_by_severity(Rng& rng, Symptom perceived, bool in_public) {
    if (!in_public) return false;
    switch (perceived) {
    case Symptom::Mild:     return rng.bernoulli(0.5);
    case Symptom::Critical: return rng.bernoulli(0.8);
    default:                return false;
    }
}

inline bool gate_satisfaction(Rng& rng, bool in_public) {
    return in_public && rng.bernoulli(0.5);
}

// Which kind of communication to send, drawn from the profile mixture
// renormalized over the active kinds (the None mass models the gate).
inline CommKind select_comm_kind(Rng& rng, const SocietyProfile& profile) {
    double active = 0.0;
    for (int k = 0; k < kCommKindCount - 1; ++k) active += profile.mixture[k];
    if (active <= 0.0) throw NoActiveChannels();
    double u = rng.uniform() * active;
    for (int k = 0; k < kCommKindCount - 1; ++k) {
        u -= profile.mixture[k];
        if (u < 0.0) return static_cast<CommKind>(k);
    }
    return CommKind::Sanction;
}

enum class Valence : std::uint8_t { Approving, Disapproving };

enum class ReceiverRole : std::uint8_t { Actor, Witness };

struct CommEvent {
    int sender = -1;
    int receiver = -1;
    CommKind kind = CommKind::None;
    Valence valence = Valence::Disapproving;
    double sanction_magnitude = 0.0;       // Sanction only
    std::optional<NormativeInfo> info;     // Tell and Hint only
    std::vector<int> witnesses;
};

namespace detail {

// Singleton conditions capturing the realized view at the moment of the norm
// outcome, as stated in a tell or inferred from a hint.
inline std::vector<Condition> realized_conditions(const AttributeView& view) {
    std::vector<Condition> conds;
    if (view.obs_health)
        conds.push_back({Attr::ObsHealth,
                         static_cast<std::uint8_t>(1u << static_cast<int>(*view.obs_health))});
    if (view.loc)
        conds.push_back({Attr::Loc,
                         static_cast<std::uint8_t>(1u << static_cast<int>(*view.loc))});
    return conds;
}

} // namespace detail

// Builds the delivered event for a witnessed norm outcome. Disapproving
// variants follow violations; approving variants follow satisfactions with
// REWARD in place of PUNISHMENT.
inline CommEvent build_event(CommKind kind, int sender, int receiver,
                             const AttributeView& perceived_view, NormOutcome outcome) {
    if (kind == CommKind::None) throw SocietyError("build_event on CommKind::None");
    CommEvent event;
    event.sender = sender;
    event.receiver = receiver;
    event.kind = kind;
    event.valence =
        outcome == NormOutcome::Violated ? Valence::Disapproving : Valence::Approving;
    if (kind == CommKind::Sanction) {
        event.sanction_magnitude = outcome == NormOutcome::Violated ? -1.0 : 1.0;
    } else if (kind == CommKind::Tell || kind == CommKind::Hint) {
        NormativeInfo info;
        info.sender = "Observer_Agent";
        info.receiver = "Actor_Agent";
        info.info_type = kind == CommKind::Tell ? InfoType::Message : InfoType::Hint;
        info.antecedent = detail::realized_conditions(perceived_view);
        info.consequent = outcome == NormOutcome::Violated ? InfoConsequent::Punishment
                                                           : InfoConsequent::Reward;
        event.info = std::move(info);
    }
    return event;
}

// Immediate reward content of an event for one receiver. Potential-table
// updates and the quarantine trigger are applied by the step loop; this
// covers the numeric contributions only.
inline RewardContribution interpret(const CommEvent& event, ReceiverRole role) {
    RewardContribution r;
    if (event.kind == CommKind::None) return r;
    const double sign = event.valence == Valence::Disapproving ? -1.0 : 1.0;
    if (role == ReceiverRole::Witness) {
        r.extrinsic += sign * 0.5; // Table of norm rewards, "other" rows
        return r;
    }
    switch (event.kind) {
    case CommKind::Sanction:
        r.extrinsic += event.sanction_magnitude;
        break;
    case CommKind::Emote:
    case CommKind::Hint:
        r.intrinsic += sign * 0.5; // guilt or pleasure
        break;
    default:
        break;
    }
    return r;
}

} // namespace nest
