// Welch's t-test and Glass' delta effect size with Cohen descriptors.

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string_view>

namespace nest {

struct StatsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateSample : StatsError {
    using StatsError::StatsError;
};

struct ZeroControlVariance : StatsError {
    ZeroControlVariance() : StatsError("control sample has zero variance") {}
};

inline double sample_mean(std::span<const double> xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

// Unbiased (n-1) sample variance.
inline double sample_variance(std::span<const double> xs) {
    const double m = sample_mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

namespace detail {

// Regularized incomplete beta function I_x(a, b) via the Lentz continued
// fraction expansion.
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

} // namespace detail

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

// Unequal-variance two-sided t-test. Requires >= 2 points per sample and
// nonzero variance in at least one of them.
inline WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw DegenerateSample("samples need at least 2 points each");
    const double va = sample_variance(a);
    const double vb = sample_variance(b);
    if (va == 0.0 && vb == 0.0)
        throw DegenerateSample("both samples have zero variance");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double se_a = va / na;
    const double se_b = vb / nb;
    WelchResult res;
    res.t = (sample_mean(a) - sample_mean(b)) / std::sqrt(se_a + se_b);
    res.df = (se_a + se_b) * (se_a + se_b) /
             (se_a * se_a / (na - 1.0) + se_b * se_b / (nb - 1.0));
    // Two-sided p for Student's t via the incomplete beta identity.
    res.p = res.t == 0.0
                ? 1.0
                : detail::incomplete_beta(res.df / 2.0, 0.5,
                                          res.df / (res.df + res.t * res.t));
    return res;
}

inline double t_test_independent(std::span<const double> a, std::span<const double> b) {
    return welch_t_test(a, b).p;
}

// (mean(experimental) - mean(control)) / sd(control).
inline double glass_delta(std::span<const double> experimental,
                          std::span<const double> control) {
    if (control.size() < 2) throw ZeroControlVariance();
    const double var_c = sample_variance(control);
    if (var_c == 0.0) throw ZeroControlVariance();
    return (sample_mean(experimental) - sample_mean(control)) / std::sqrt(var_c);
}

// Cohen's interpretation bins over the effect size magnitude.
inline std::string_view cohen_descriptor(double delta) {
    const double mag = std::fabs(delta);
    if (mag < 0.2) return "negligible";
    if (mag < 0.5) return "small";
    if (mag < 0.8) return "medium";
    return "large";
}

} // namespace nest
