// Disease state machine, modifiers, and the noisy observation channel.

#include <doctest.h>

#include <array>
#include <cmath>

#include "nest/disease.hpp"
#include "nest/rng.hpp"

using namespace nest;

namespace {

constexpr int kSamples = 100000;

double infect_rate(double infection_prob, bool vaccinated) {
    DiseaseParams p;
    p.infection_prob = infection_prob;
    Rng rng(42);
    int hits = 0;
    for (int i = 0; i < kSamples; ++i)
        if (try_infect(rng, vaccinated, p)) ++hits;
    return static_cast<double>(hits) / kSamples;
}

} // namespace

TEST_CASE("default parameters validate; bad parameters throw") {
    DiseaseParams p;
    CHECK_NOTHROW(p.validate());
    SUBCASE("probability out of range") {
        p.infection_prob = 1.5;
        CHECK_THROWS_AS(p.validate(), DiseaseError);
    }
    SUBCASE("alpha must be in (0,1]") {
        p.vaccine_multiplier = 0.0;
        CHECK_THROWS_AS(p.validate(), DiseaseError);
    }
    SUBCASE("beta must be >= 1") {
        p.home_divisor = 0.5;
        CHECK_THROWS_AS(p.validate(), DiseaseError);
    }
}

TEST_CASE("infection probabilities: 0.8 base, 0.4 vaccinated, 0 degenerate") {
    CHECK(std::fabs(infect_rate(0.8, false) - 0.8) < 0.01);
    CHECK(std::fabs(infect_rate(0.8, true) - 0.4) < 0.01);
    CHECK(infect_rate(0.0, false) == 0.0);
    CHECK(infect_rate(0.0, true) == 0.0);
}

TEST_CASE("effective probabilities follow base * alpha / beta and base * beta") {
    DiseaseParams p;
    CHECK(p.effective_progress(HealthState::Mild, false, false) == doctest::Approx(0.01));
    CHECK(p.effective_progress(HealthState::Mild, true, false) == doctest::Approx(0.005));
    CHECK(p.effective_progress(HealthState::Mild, false, true) == doctest::Approx(0.005));
    CHECK(p.effective_progress(HealthState::Mild, true, true) == doctest::Approx(0.0025));
    CHECK(p.effective_recover(HealthState::Mild, false) == doctest::Approx(0.05));
    CHECK(p.effective_recover(HealthState::Mild, true) == doctest::Approx(0.10));
    // Recovery caps at 1.
    p.recover_asym = 0.9;
    CHECK(p.effective_recover(HealthState::Asymptomatic, true) == doctest::Approx(1.0));
}

TEST_CASE("monotone hazard: protective modifiers never increase progression") {
    const DiseaseParams p;
    for (HealthState s :
         {HealthState::Asymptomatic, HealthState::Mild, HealthState::Critical}) {
        const double worst = p.effective_progress(s, false, false);
        for (bool vacc : {false, true})
            for (bool home : {false, true})
                CHECK(p.effective_progress(s, vacc, home) <= worst);
        // Progress + recover + stay partitions the step.
        for (bool vacc : {false, true}) {
            for (bool home : {false, true}) {
                const double stay = 1.0 - p.effective_progress(s, vacc, home) -
                                    (1.0 - p.effective_progress(s, vacc, home)) *
                                        p.effective_recover(s, home);
                CHECK(stay >= 0.0);
                CHECK(stay <= 1.0);
            }
        }
    }
}

TEST_CASE("progress: Healthy is a no-op, Deceased throws, zero bases freeze") {
    Rng rng(1);
    DiseaseParams p;
    CHECK(progress(rng, HealthState::Healthy, false, false, p) == HealthState::Healthy);
    CHECK_THROWS_AS(progress(rng, HealthState::Deceased, false, false, p), DiseaseError);

    DiseaseParams frozen;
    frozen.progress_asym_to_mild = frozen.progress_mild_to_critical =
        frozen.progress_critical_to_deceased = 0.0;
    frozen.recover_asym = frozen.recover_mild = frozen.recover_critical = 0.0;
    for (HealthState s :
         {HealthState::Asymptomatic, HealthState::Mild, HealthState::Critical})
        for (int i = 0; i < 100; ++i) CHECK(progress(rng, s, false, false, frozen) == s);
}

TEST_CASE("Monte Carlo: Mild at home progresses to Critical at 0.005 +- 0.001") {
    Rng rng(7);
    const DiseaseParams p;
    int critical = 0;
    for (int i = 0; i < kSamples; ++i)
        if (progress(rng, HealthState::Mild, false, true, p) == HealthState::Critical)
            ++critical;
    CHECK(std::fabs(critical / static_cast<double>(kSamples) - 0.005) < 0.001);
}

TEST_CASE("Monte Carlo: progression and recovery split per the residual rule") {
    // From Asymptomatic, unvaccinated, not at home: progress 0.1, recover
    // (1 - 0.1) * 0.1 = 0.09, stay 0.81.
    Rng rng(11);
    const DiseaseParams p;
    std::array<int, 3> counts{}; // mild, healthy, stayed
    for (int i = 0; i < kSamples; ++i) {
        switch (progress(rng, HealthState::Asymptomatic, false, false, p)) {
        case HealthState::Mild:         ++counts[0]; break;
        case HealthState::Healthy:      ++counts[1]; break;
        case HealthState::Asymptomatic: ++counts[2]; break;
        default: FAIL("unexpected state");
        }
    }
    CHECK(std::fabs(counts[0] / static_cast<double>(kSamples) - 0.10) < 0.01);
    CHECK(std::fabs(counts[1] / static_cast<double>(kSamples) - 0.09) < 0.01);
    CHECK(std::fabs(counts[2] / static_cast<double>(kSamples) - 0.81) < 0.01);
}

TEST_CASE("observation model validates rows and rejects Deceased") {
    ObservationModel m;
    CHECK_NOTHROW(m.validate());
    Rng rng(3);
    CHECK_THROWS_AS(observe_health(rng, HealthState::Deceased, m), DiseaseError);
    m.rows[0] = {0.5, 0.4, 0.2}; // sums to 1.1
    CHECK_THROWS_AS(m.validate(), DiseaseError);
}

TEST_CASE("observation frequencies match the noise table") {
    const ObservationModel m;
    const std::array<std::array<double, 3>, 4> expected = {{
        {0.8, 0.1, 0.1},
        {0.5, 0.5, 0.0},
        {0.3, 0.6, 0.1},
        {0.1, 0.3, 0.6},
    }};
    Rng rng(5);
    for (int row = 0; row < 4; ++row) {
        const auto actual = static_cast<HealthState>(row);
        std::array<int, 3> counts{};
        for (int i = 0; i < kSamples; ++i)
            ++counts[static_cast<int>(observe_health(rng, actual, m))];
        for (int col = 0; col < 3; ++col) {
            const double freq = counts[col] / static_cast<double>(kSamples);
            CHECK(std::fabs(freq - expected[row][col]) < 0.01);
        }
    }
    // Asymptomatic is never perceived Critical (probability exactly 0).
    Rng rng2(6);
    for (int i = 0; i < kSamples; ++i)
        CHECK(observe_health(rng2, HealthState::Asymptomatic, m) != Symptom::Critical);
}

TEST_CASE("degenerate observation row is deterministic") {
    ObservationModel m;
    m.rows[2] = {1.0, 0.0, 0.0};
    Rng rng(9);
    for (int i = 0; i < 1000; ++i)
        CHECK(observe_health(rng, HealthState::Mild, m) == Symptom::Healthy);
}

TEST_CASE("seeded determinism: same seed, same trajectory") {
    const DiseaseParams p;
    Rng a(123), b(123);
    HealthState sa = HealthState::Asymptomatic, sb = HealthState::Asymptomatic;
    for (int i = 0; i < 1000 && sa != HealthState::Deceased; ++i) {
        sa = sa == HealthState::Healthy ? HealthState::Healthy
                                        : progress(a, sa, false, false, p);
        sb = sb == HealthState::Healthy ? HealthState::Healthy
                                        : progress(b, sb, false, false, p);
        CHECK(sa == sb);
        if (sa == HealthState::Healthy) break;
    }
}
