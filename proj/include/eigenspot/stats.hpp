#ifndef EIGENSPOT_STATS_HPP
#define EIGENSPOT_STATS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "eigenspot/errors.hpp"

namespace eigenspot {

enum class Tail { two_tailed, left_tailed, right_tailed };

inline const char* to_string(Tail t) {
    switch (t) {
        case Tail::two_tailed: return "two";
        case Tail::left_tailed: return "left";
        case Tail::right_tailed: return "right";
    }
    return "two";
}

namespace detail {

struct Moments {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation, n-1 denominator
};

inline Moments sample_moments(const std::vector<double>& x) {
    Moments m;
    for (double v : x) m.mean += v;
    m.mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - m.mean) * (v - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
    return m;
}

// Deviation vectors built from unit singular vectors (or exactly equal
// ratios) can carry pure floating-point noise; anything this far below the
// data scale is treated as zero variance.
inline bool is_degenerate(const std::vector<double>& x, const Moments& m) {
    double amax = 1.0;
    for (double v : x) amax = std::max(amax, std::abs(v));
    return m.sd <= 1e-12 * amax;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Regularized incomplete beta I_x(a, b), continued fraction (modified Lentz).
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

inline double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

// Two-tailed Student-t p-value with nu degrees of freedom.
inline double student_t_two_tailed(double t, double nu) {
    return regularized_incomplete_beta(nu / 2.0, 0.5, nu / (nu + t * t));
}

// Upper tail of the F distribution.
inline double f_upper_tail(double f, double d1, double d2) {
    if (f <= 0.0) return 1.0;
    return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

}  // namespace detail

/// Normal-tail p-value for a z-score.
inline double normal_p_value(double z, Tail tail) {
    if (!std::isfinite(z)) throw Error("normal_p_value: z is not finite");
    switch (tail) {
        case Tail::two_tailed: return std::erfc(std::abs(z) / std::numbers::sqrt2);
        case Tail::left_tailed: return detail::normal_cdf(z);
        case Tail::right_tailed: return 0.5 * std::erfc(z / std::numbers::sqrt2);
    }
    return 1.0;
}

/// Standardize with the sample (n-1) standard deviation. A zero-variance
/// input yields the all-zero vector; callers consult the chart's degenerate
/// flag.
inline std::vector<double> standardize(const std::vector<double>& x) {
    if (x.size() < 2) throw TooShortError("standardize: need at least 2 elements");
    const auto m = detail::sample_moments(x);
    std::vector<double> z(x.size(), 0.0);
    if (m.sd == 0.0) return z;
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - m.mean) / m.sd;
    return z;
}

/// z-score control chart over one deviation vector.
struct ControlChartResult {
    std::vector<double> deviations;
    std::vector<double> z_scores;
    std::vector<double> p_values;
    std::set<std::size_t> flagged;
    double alpha = 0.0;
    Tail tail = Tail::two_tailed;
    bool degenerate = false;
};

namespace detail {

// alpha-independent part of the chart, reused by threshold sweeps
struct ChartScores {
    std::vector<double> z_scores;
    std::vector<double> p_values;
    bool degenerate = false;
};

inline ChartScores chart_scores(const std::vector<double>& deviations, Tail tail) {
    if (deviations.size() < 2) throw TooShortError("control_chart: need at least 2 elements");
    ChartScores s;
    const auto m = sample_moments(deviations);
    if (is_degenerate(deviations, m)) {
        s.degenerate = true;
        s.z_scores.assign(deviations.size(), 0.0);
        s.p_values.assign(deviations.size(), 1.0);
        return s;
    }
    s.z_scores.resize(deviations.size());
    s.p_values.resize(deviations.size());
    for (std::size_t i = 0; i < deviations.size(); ++i) {
        s.z_scores[i] = (deviations[i] - m.mean) / m.sd;
        s.p_values[i] = normal_p_value(s.z_scores[i], tail);
    }
    return s;
}

}  // namespace detail

inline ControlChartResult control_chart(const std::vector<double>& deviations, double alpha,
                                        Tail tail) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("control_chart: alpha must be in (0,1)");
    auto scores = detail::chart_scores(deviations, tail);
    ControlChartResult r;
    r.deviations = deviations;
    r.z_scores = std::move(scores.z_scores);
    r.p_values = std::move(scores.p_values);
    r.alpha = alpha;
    r.tail = tail;
    r.degenerate = scores.degenerate;
    if (!r.degenerate) {
        for (std::size_t i = 0; i < r.p_values.size(); ++i) {
            if (r.p_values[i] < alpha) r.flagged.insert(i);
        }
    }
    return r;
}

/// Result of a significance test; dof[1] is zero for one-parameter tests.
struct TestReport {
    double statistic = 0.0;
    double p_value = 1.0;
    std::array<long, 2> dof{0, 0};
};

/// Two-sided paired Student t-test on a - b.
inline TestReport paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw LengthMismatchError("paired_t_test: length mismatch");
    if (a.size() < 2) throw TooShortError("paired_t_test: need at least 2 pairs");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const auto m = detail::sample_moments(d);
    if (m.sd == 0.0) {
        throw ZeroVarianceError("paired_t_test: all differences are equal");
    }
    const double n = static_cast<double>(d.size());
    TestReport r;
    r.statistic = m.mean / (m.sd / std::sqrt(n));
    r.dof = {static_cast<long>(d.size()) - 1, 0};
    r.p_value = detail::student_t_two_tailed(r.statistic, static_cast<double>(r.dof[0]));
    return r;
}

/// One-way ANOVA F-test across k groups.
inline TestReport one_way_anova(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw TooFewGroupsError("one_way_anova: need at least 2 groups");
    std::size_t total_n = 0;
    double grand_sum = 0.0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw TooShortError("one_way_anova: each group needs >= 2 values");
        total_n += g.size();
        for (double v : g) grand_sum += v;
    }
    const double grand_mean = grand_sum / static_cast<double>(total_n);

    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& g : groups) {
        double mean = 0.0;
        for (double v : g) mean += v;
        mean /= static_cast<double>(g.size());
        ss_between += static_cast<double>(g.size()) * (mean - grand_mean) * (mean - grand_mean);
        for (double v : g) ss_within += (v - mean) * (v - mean);
    }
    const long d1 = static_cast<long>(groups.size()) - 1;
    const long d2 = static_cast<long>(total_n) - static_cast<long>(groups.size());
    if (ss_within == 0.0) {
        throw ZeroWithinVarianceError("one_way_anova: zero within-group variance");
    }
    TestReport r;
    r.statistic = (ss_between / static_cast<double>(d1)) / (ss_within / static_cast<double>(d2));
    r.dof = {d1, d2};
    r.p_value = detail::f_upper_tail(r.statistic, static_cast<double>(d1), static_cast<double>(d2));
    return r;
}

}  // namespace eigenspot

#endif
