// Stochastic health-state machine with vaccination and home-rest modifiers,
// and the noisy channel through which agents observe each other's health.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "nest/domain.hpp"
#include "nest/rng.hpp"

namespace nest {

struct DiseaseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DiseaseParams {
    double infection_prob = 0.8;
    double vaccine_multiplier = 0.5; // alpha, applied when vaccinated
    double home_divisor = 2.0;       // beta, applied when at home

    // Base per-step probabilities before alpha/beta modifiers.
    double progress_asym_to_mild = 0.1;
    double progress_mild_to_critical = 0.01;
    double progress_critical_to_deceased = 0.01;
    double recover_asym = 0.1;
    double recover_mild = 0.05;
    double recover_critical = 0.01;

    void validate() const {
        const double probs[] = {infection_prob,
                                progress_asym_to_mild,
                                progress_mild_to_critical,
                                progress_critical_to_deceased,
                                recover_asym,
                                recover_mild,
                                recover_critical};
        for (double p : probs)
            if (!(p >= 0.0 && p <= 1.0))
                throw DiseaseError("disease probability out of [0,1]");
        if (!(vaccine_multiplier > 0.0 && vaccine_multiplier <= 1.0))
            throw DiseaseError("vaccine multiplier must be in (0,1]");
        if (!(home_divisor >= 1.0)) throw DiseaseError("home divisor must be >= 1");
    }

    double progress_base(HealthState from) const {
        switch (from) {
        case HealthState::Asymptomatic: return progress_asym_to_mild;
        case HealthState::Mild:         return progress_mild_to_critical;
        case HealthState::Critical:     return progress_critical_to_deceased;
        default:                        return 0.0;
        }
    }

    double recover_base(HealthState from) const {
        switch (from) {
        case HealthState::Asymptomatic: return recover_asym;
        case HealthState::Mild:         return recover_mild;
        case HealthState::Critical:     return recover_critical;
        default:                        return 0.0;
        }
    }

    // Vaccination slows infection and progression; home rest slows
    // progression and speeds recovery. Recovery is unaffected by vaccination.
    double effective_progress(HealthState from, bool vaccinated, bool at_home) const {
        return progress_base(from) * (vaccinated ? vaccine_multiplier : 1.0) /
               (at_home ? home_divisor : 1.0);
    }

    double effective_recover(HealthState from, bool at_home) const {
        double p = recover_base(from) * (at_home ? home_divisor : 1.0);
        return p > 1.0 ? 1.0 : p;
    }
};

constexpr HealthState next_phase(HealthState from) {
    switch (from) {
    case HealthState::Asymptomatic: return HealthState::Mild;
    case HealthState::Mild:         return HealthState::Critical;
    case HealthState::Critical:     return HealthState::Deceased;
    default:                        return from;
    }
}

// Infection attempt on a healthy agent co-located with an infectious one.
// Returns true when the target becomes Asymptomatic.
inline bool try_infect(Rng& rng, bool target_vaccinated, const DiseaseParams& params) {
    const double p =
        params.infection_prob * (target_vaccinated ? params.vaccine_multiplier : 1.0);
    return rng.bernoulli(p);
}

// One step of the state machine. Progression is sampled first; recovery is
// drawn from the residual, so the two are mutually exclusive within a step.
// Recovery returns the agent to Healthy (re-infectable).
inline HealthState progress(Rng& rng, HealthState state, bool vaccinated, bool at_home,
                            const DiseaseParams& params) {
    if (state == HealthState::Deceased)
        throw DiseaseError("progress called on Deceased agent");
    if (state == HealthState::Healthy) return HealthState::Healthy;
    if (rng.bernoulli(params.effective_progress(state, vaccinated, at_home)))
        return next_phase(state);
    if (rng.bernoulli(params.effective_recover(state, at_home)))
        return HealthState::Healthy;
    return state;
}

// Imperfect observation of another's health state: rows map the actual
// (non-deceased) state to a distribution over perceived symptom levels.
struct ObservationModel {
    // Row order: Healthy, Asymptomatic, Mild, Critical.
    // Column order: perceived Healthy, Mild, Critical.
    std::array<std::array<double, 3>, 4> rows = {{
        {0.8, 0.1, 0.1},
        {0.5, 0.5, 0.0},
        {0.3, 0.6, 0.1},
        {0.1, 0.3, 0.6},
    }};

    void validate() const {
        for (const auto& row : rows) {
            double sum = 0.0;
            for (double p : row) {
                if (!(p >= 0.0 && p <= 1.0))
                    throw DiseaseError("observation probability out of [0,1]");
                sum += p;
            }
            if (std::fabs(sum - 1.0) > 1e-9)
                throw DiseaseError("observation row does not sum to 1");
        }
    }

    const std::array<double, 3>& row(HealthState actual) const {
        if (actual == HealthState::Deceased)
            throw DiseaseError("observe_health called on Deceased agent");
        return rows[static_cast<std::size_t>(actual)];
    }
};

inline Symptom observe_health(Rng& rng, HealthState actual, const ObservationModel& model) {
    const auto& row = model.row(actual);
    const double u = rng.uniform();
    if (u < row[0]) return Symptom::Healthy;
    if (u < row[0] + row[1]) return Symptom::Mild;
    return Symptom::Critical;
}

} // namespace nest
