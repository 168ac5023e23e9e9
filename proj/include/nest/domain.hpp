// Shared enumerations for the pandemic environment.

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nest {

enum class HealthState : std::uint8_t { Healthy, Asymptomatic, Mild, Critical, Deceased };

// Perceived symptom level, as seen through the noisy observation channel.
enum class Symptom : std::uint8_t { Healthy = 0, Mild = 1, Critical = 2 };

enum class GoalKind : std::uint8_t { Rest, Hike, Shop, BeVaccinated };

enum class ActionKind : std::uint8_t { StayHome, VisitPark, VisitCafe, VisitClinic };

// Location category; Home always means the agent's own home.
enum class LocCategory : std::uint8_t { Home = 0, Park = 1, Cafe = 2, Clinic = 3 };

constexpr int kGoalCount = 4;
constexpr int kActionCount = 4;
constexpr int kSymptomCount = 3;

constexpr LocCategory destination(ActionKind a) {
    switch (a) {
    case ActionKind::StayHome:    return LocCategory::Home;
    case ActionKind::VisitPark:   return LocCategory::Park;
    case ActionKind::VisitCafe:   return LocCategory::Cafe;
    case ActionKind::VisitClinic: return LocCategory::Clinic;
    }
    return LocCategory::Home;
}

constexpr bool is_public_place(LocCategory loc) { return loc != LocCategory::Home; }

constexpr bool is_infectious(HealthState h) {
    return h == HealthState::Asymptomatic || h == HealthState::Mild ||
           h == HealthState::Critical;
}

constexpr bool is_symptomatic(HealthState h) {
    return h == HealthState::Mild || h == HealthState::Critical;
}

// The symptom level an agent feels in itself. Asymptomatic carriers feel
// healthy; the Table 1 noise applies only to observing others.
constexpr Symptom own_symptom(HealthState h) {
    switch (h) {
    case HealthState::Mild:     return Symptom::Mild;
    case HealthState::Critical: return Symptom::Critical;
    default:                    return Symptom::Healthy;
    }
}

constexpr bool goal_satisfied(GoalKind goal, ActionKind action) {
    switch (goal) {
    case GoalKind::Rest:         return action == ActionKind::StayHome;
    case GoalKind::Hike:         return action == ActionKind::VisitPark;
    case GoalKind::Shop:         return action == ActionKind::VisitCafe;
    case GoalKind::BeVaccinated: return action == ActionKind::VisitClinic;
    }
    return false;
}

inline std::string_view to_string(HealthState h) {
    constexpr std::array<std::string_view, 5> names = {
        "HEALTHY", "ASYMPTOMATIC", "MILD", "CRITICAL", "DECEASED"};
    return names[static_cast<std::size_t>(h)];
}

inline std::string_view to_string(Symptom s) {
    constexpr std::array<std::string_view, 3> names = {"HEALTHY", "MILD", "CRITICAL"};
    return names[static_cast<std::size_t>(s)];
}

inline std::string_view to_string(GoalKind g) {
    constexpr std::array<std::string_view, 4> names = {"REST", "HIKE", "SHOP",
                                                       "BE_VACCINATED"};
    return names[static_cast<std::size_t>(g)];
}

inline std::string_view to_string(ActionKind a) {
    constexpr std::array<std::string_view, 4> names = {"STAY_HOME", "VISIT_PARK",
                                                       "VISIT_CAFE", "VISIT_CLINIC"};
    return names[static_cast<std::size_t>(a)];
}

inline std::string_view to_string(LocCategory l) {
    constexpr std::array<std::string_view, 4> names = {"HOME", "PARK", "CAFE", "CLINIC"};
    return names[static_cast<std::size_t>(l)];
}

inline GoalKind goal_from_string(std::string_view s) {
    if (s == "REST" || s == "rest") return GoalKind::Rest;
    if (s == "HIKE" || s == "hike") return GoalKind::Hike;
    if (s == "SHOP" || s == "shop") return GoalKind::Shop;
    if (s == "BE_VACCINATED" || s == "be_vaccinated") return GoalKind::BeVaccinated;
    throw std::invalid_argument("unknown goal: " + std::string(s));
}

} // namespace nest
