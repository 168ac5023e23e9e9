// Seeded random number generation with independent per-phase streams.

#pragma once

#include <cstdint>
#include <random>

namespace nest {

// Deterministic engine wrapper. All sampling in the simulator goes through
// these helpers so output bytes depend only on (seed, call sequence) and not
// on standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))) {}

    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// One stream per simulation phase, fanned out from a single base seed.
// Adding draws to one phase never perturbs the others.
struct PhaseRngs {
    Rng init;
    Rng goals;
    Rng contacts;
    Rng observation;
    Rng disease;
    Rng communication;
    Rng exploration;

    explicit PhaseRngs(std::uint64_t seed)
        : init(seed, 1),
          goals(seed, 2),
          contacts(seed, 3),
          observation(seed, 4),
          disease(seed, 5),
          communication(seed, 6),
          exploration(seed, 7) {}
};

} // namespace nest
