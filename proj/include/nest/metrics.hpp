// Per-step metrics, rolling aggregation, and norm-emergence detection.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace nest {

struct MetricsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One simulation step's metrics. Percentages are of the initial population;
// home is the fraction of infected agents at home (1.0 by convention when
// nobody is infected); goal is the mean per-step goal satisfaction with
// deceased agents counting as unsatisfied.
struct MetricsRow {
    long step = 0;
    double healthy = 0.0;
    double infected = 0.0;
    double deceased = 0.0;
    double vaccinated = 0.0;
    double infections = 0.0; // cumulative infections / initial population
    double home = 1.0;
    double quarantine = 0.0; // count currently force-quarantined
    double goal = 0.0;
    long raw_infections = 0;
};

// Trailing mean over min(window, index+1) points; output length equals input.
inline std::vector<double> rolling_average(std::span<const double> series, int window) {
    if (window < 1) throw MetricsError("WindowZero: rolling window must be >= 1");
    std::vector<double> out(series.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        sum += series[i];
        if (i >= static_cast<std::size_t>(window)) sum -= series[i - window];
        const auto n = static_cast<double>(
            i + 1 < static_cast<std::size_t>(window) ? i + 1 : window);
        out[i] = sum / n;
    }
    return out;
}

// First index where the (already rolled) behavior fraction reaches the
// threshold; no hysteresis.
inline std::optional<std::size_t> norm_emerged(std::span<const double> series,
                                               double threshold) {
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series[i] >= threshold) return i;
    return std::nullopt;
}

} // namespace nest
