// Norms and normative-information conditionals: types and evaluation.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nest/domain.hpp"

namespace nest {

enum class NormType : std::uint8_t { Commitment, Prohibition };

enum class NormOutcome : std::uint8_t { Inactive, Satisfied, Violated };

enum class InfoType : std::uint8_t { Message, Hint };

enum class InfoConsequent : std::uint8_t { Punishment, Reward };

// Attributes a condition may constrain, each with a finite value domain:
//   obs_health    : HEALTHY, MILD, CRITICAL
//   actual_health : HEALTHY, ASYMPTOMATIC, MILD, CRITICAL, DECEASED
//   loc           : HOME, PARK, CAFE, CLINIC
//   vaccinated    : TRUE, FALSE
enum class Attr : std::uint8_t { ObsHealth = 0, ActualHealth = 1, Loc = 2, Vaccinated = 3 };

constexpr int kAttrCount = 4;

inline int attr_domain_size(Attr a) {
    switch (a) {
    case Attr::ObsHealth:    return 3;
    case Attr::ActualHealth: return 5;
    case Attr::Loc:          return 4;
    case Attr::Vaccinated:   return 2;
    }
    return 0;
}

inline std::string_view attr_name(Attr a) {
    switch (a) {
    case Attr::ObsHealth:    return "obs_health";
    case Attr::ActualHealth: return "actual_health";
    case Attr::Loc:          return "loc";
    case Attr::Vaccinated:   return "vaccinated";
    }
    return "";
}

inline std::string_view attr_value_name(Attr a, int idx) {
    static constexpr std::string_view obs[] = {"HEALTHY", "MILD", "CRITICAL"};
    static constexpr std::string_view actual[] = {"HEALTHY", "ASYMPTOMATIC", "MILD",
                                                  "CRITICAL", "DECEASED"};
    static constexpr std::string_view loc[] = {"HOME", "PARK", "CAFE", "CLINIC"};
    static constexpr std::string_view vac[] = {"TRUE", "FALSE"};
    switch (a) {
    case Attr::ObsHealth:    return obs[idx];
    case Attr::ActualHealth: return actual[idx];
    case Attr::Loc:          return loc[idx];
    case Attr::Vaccinated:   return vac[idx];
    }
    return "";
}

// Value lookup is exact-case; returns nullopt for values outside the domain.
inline std::optional<int> attr_value_index(Attr a, std::string_view value) {
    for (int i = 0; i < attr_domain_size(a); ++i)
        if (attr_value_name(a, i) == value) return i;
    return std::nullopt;
}

// A constraint on one attribute: the attribute's value must lie in the
// allowed set (bitmask over domain indices).
struct Condition {
    Attr attr;
    std::uint8_t allowed = 0;

    bool admits(int value_index) const { return (allowed >> value_index) & 1u; }

    bool operator==(const Condition&) const = default;
};

struct Norm {
    NormType norm_type;
    std::string subject;
    std::string object;
    std::vector<Condition> antecedent;
    std::vector<Condition> consequent;

    bool operator==(const Norm&) const = default;
};

struct NormativeInfo {
    std::string sender;
    std::string receiver;
    InfoType info_type;
    std::vector<Condition> antecedent;
    InfoConsequent consequent;

    bool operator==(const NormativeInfo&) const = default;
};

// One agent's attribute assignment as seen by an evaluator. Health attributes
// use the observer's perceived value where a norm names obs_health.
struct AttributeView {
    std::optional<Symptom> obs_health;
    std::optional<HealthState> actual_health;
    std::optional<LocCategory> loc;
    std::optional<bool> vaccinated;

    std::optional<int> value_of(Attr a) const {
        switch (a) {
        case Attr::ObsHealth:
            if (obs_health) return static_cast<int>(*obs_health);
            return std::nullopt;
        case Attr::ActualHealth:
            if (actual_health) return static_cast<int>(*actual_health);
            return std::nullopt;
        case Attr::Loc:
            if (loc) return static_cast<int>(*loc);
            return std::nullopt;
        case Attr::Vaccinated:
            if (vaccinated) return *vaccinated ? 0 : 1; // domain order {TRUE, FALSE}
            return std::nullopt;
        }
        return std::nullopt;
    }
};

struct MissingAttribute : std::runtime_error {
    explicit MissingAttribute(Attr a)
        : std::runtime_error("view lacks attribute: " + std::string(attr_name(a))),
          attr(a) {}
    Attr attr;
};

// Conjunction over the condition set.
inline bool conditions_hold(const std::vector<Condition>& conds, const AttributeView& view) {
    for (const Condition& c : conds) {
        std::optional<int> v = view.value_of(c.attr);
        if (!v) throw MissingAttribute(c.attr);
        if (!c.admits(*v)) return false;
    }
    return true;
}

// Per-step evaluation: a prohibition counts each step with antecedent true
// and consequent false as a satisfaction event.
inline NormOutcome evaluate_norm(const Norm& norm, const AttributeView& view) {
    if (!conditions_hold(norm.antecedent, view)) return NormOutcome::Inactive;
    const bool consequent = conditions_hold(norm.consequent, view);
    if (norm.norm_type == NormType::Prohibition)
        return consequent ? NormOutcome::Violated : NormOutcome::Satisfied;
    return consequent ? NormOutcome::Satisfied : NormOutcome::Violated;
}

} // namespace nest
