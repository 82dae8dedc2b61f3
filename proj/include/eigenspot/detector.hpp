#ifndef EIGENSPOT_DETECTOR_HPP
#define EIGENSPOT_DETECTOR_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "eigenspot/errors.hpp"
#include "eigenspot/matrix.hpp"
#include "eigenspot/stats.hpp"
#include "eigenspot/svd.hpp"

namespace eigenspot {

enum class Method { eigenspot, baseline_ratio };

inline const char* to_string(Method m) {
    return m == Method::eigenspot ? "eigenspot" : "baseline_ratio";
}

/// Detection outcome at one significance level.
///
/// For the eigenspot method `cells` is exactly the Cartesian product of the
/// flagged spatial and temporal components and the per-cell score is
/// max(spatial p, temporal p) -- the smallest alpha at which the cell would
/// still be reported. For the ratio method `cells` is the flagged set itself
/// and scores are the per-cell p-values; the component sets are the
/// projections of the flagged cells.
struct HotspotReport {
    Method method = Method::eigenspot;
    double alpha = 0.0;
    Tail tail = Tail::two_tailed;
    std::size_t n_regions = 0;
    std::size_t n_periods = 0;
    std::set<std::size_t> spatial_components;
    std::set<std::size_t> temporal_components;
    std::set<Cell> cells;
    std::map<Cell, double> cell_scores;
    // diagnostics: the two charts (eigenspot) or the full p-value grid (ratio)
    std::optional<ControlChartResult> spatial_chart;
    std::optional<ControlChartResult> temporal_chart;
    std::vector<double> cell_p_values;

    bool found() const { return !cells.empty(); }
};

/// Alpha-independent detection state: everything expensive (SVD, charts or
/// the ratio grid) computed once, so threshold sweeps only re-threshold.
struct DetectionScores {
    Method method = Method::eigenspot;
    Tail tail = Tail::two_tailed;
    std::size_t n_regions = 0;
    std::size_t n_periods = 0;
    // eigenspot
    std::vector<double> spatial_deviations, temporal_deviations;
    detail::ChartScores spatial, temporal;
    SingularPair baseline_pair, cases_pair;
    // baseline_ratio
    std::vector<double> ratios;
    detail::ChartScores ratio_chart;
};

namespace detail {

inline void require_same_shape(const CountMatrix& baseline, const CountMatrix& cases) {
    if (!baseline.same_shape(cases)) {
        throw ShapeMismatchError("baseline is " + std::to_string(baseline.n_regions()) + "x" +
                                 std::to_string(baseline.n_periods()) + " but cases is " +
                                 std::to_string(cases.n_regions()) + "x" +
                                 std::to_string(cases.n_periods()));
    }
}

}  // namespace detail

inline DetectionScores eigenspot_scores(const CountMatrix& baseline, const CountMatrix& cases,
                                        Tail tail = Tail::two_tailed) {
    detail::require_same_shape(baseline, cases);
    DetectionScores s;
    s.method = Method::eigenspot;
    s.tail = tail;
    s.n_regions = baseline.n_regions();
    s.n_periods = baseline.n_periods();
    s.baseline_pair = rank1_svd(baseline);
    s.cases_pair = rank1_svd(cases);

    s.spatial_deviations.resize(s.n_regions);
    for (std::size_t i = 0; i < s.n_regions; ++i) {
        s.spatial_deviations[i] = s.cases_pair.spatial[i] - s.baseline_pair.spatial[i];
    }
    s.temporal_deviations.resize(s.n_periods);
    for (std::size_t j = 0; j < s.n_periods; ++j) {
        s.temporal_deviations[j] = s.cases_pair.temporal[j] - s.baseline_pair.temporal[j];
    }
    s.spatial = detail::chart_scores(s.spatial_deviations, tail);
    s.temporal = detail::chart_scores(s.temporal_deviations, tail);
    return s;
}

inline DetectionScores ratio_scores(const CountMatrix& baseline, const CountMatrix& cases,
                                    Tail tail = Tail::two_tailed) {
    detail::require_same_shape(baseline, cases);
    DetectionScores s;
    s.method = Method::baseline_ratio;
    s.tail = tail;
    s.n_regions = baseline.n_regions();
    s.n_periods = baseline.n_periods();
    s.ratios.resize(s.n_regions * s.n_periods);
    for (std::size_t i = 0; i < s.n_regions; ++i) {
        for (std::size_t j = 0; j < s.n_periods; ++j) {
            const double b = baseline(i, j);
            if (b <= 0.0) {
                throw ZeroBaselineCellError(i, j, "ratio method: baseline cell (" +
                                                      std::to_string(i) + "," + std::to_string(j) +
                                                      ") is zero");
            }
            s.ratios[i * s.n_periods + j] = cases(i, j) / b;
        }
    }
    s.ratio_chart = detail::chart_scores(s.ratios, tail);
    return s;
}

inline HotspotReport assemble_report(const DetectionScores& s, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("detect: alpha must be in (0,1)");
    HotspotReport r;
    r.method = s.method;
    r.alpha = alpha;
    r.tail = s.tail;
    r.n_regions = s.n_regions;
    r.n_periods = s.n_periods;

    if (s.method == Method::eigenspot) {
        ControlChartResult sc;
        sc.deviations = s.spatial_deviations;
        sc.z_scores = s.spatial.z_scores;
        sc.p_values = s.spatial.p_values;
        sc.alpha = alpha;
        sc.tail = s.tail;
        sc.degenerate = s.spatial.degenerate;
        ControlChartResult tc;
        tc.deviations = s.temporal_deviations;
        tc.z_scores = s.temporal.z_scores;
        tc.p_values = s.temporal.p_values;
        tc.alpha = alpha;
        tc.tail = s.tail;
        tc.degenerate = s.temporal.degenerate;
        if (!sc.degenerate) {
            for (std::size_t i = 0; i < sc.p_values.size(); ++i) {
                if (sc.p_values[i] < alpha) sc.flagged.insert(i);
            }
        }
        if (!tc.degenerate) {
            for (std::size_t j = 0; j < tc.p_values.size(); ++j) {
                if (tc.p_values[j] < alpha) tc.flagged.insert(j);
            }
        }
        r.spatial_components = sc.flagged;
        r.temporal_components = tc.flagged;
        for (std::size_t i : r.spatial_components) {
            for (std::size_t j : r.temporal_components) {
                r.cells.emplace(i, j);
                r.cell_scores[{i, j}] = std::max(sc.p_values[i], tc.p_values[j]);
            }
        }
        r.spatial_chart = std::move(sc);
        r.temporal_chart = std::move(tc);
    } else {
        r.cell_p_values = s.ratio_chart.p_values;
        if (!s.ratio_chart.degenerate) {
            for (std::size_t i = 0; i < s.n_regions; ++i) {
                for (std::size_t j = 0; j < s.n_periods; ++j) {
                    const double p = r.cell_p_values[i * s.n_periods + j];
                    if (p < alpha) {
                        r.cells.emplace(i, j);
                        r.cell_scores[{i, j}] = p;
                        r.spatial_components.insert(i);
                        r.temporal_components.insert(j);
                    }
                }
            }
        }
    }
    return r;
}

/// Algorithm: rank-1 SVD of both matrices, element-wise singular-vector
/// deviations, one z-score control chart per dimension, cross product of the
/// flagged components.
inline HotspotReport detect_eigenspot(const CountMatrix& baseline, const CountMatrix& cases,
                                      double alpha, Tail tail = Tail::two_tailed) {
    return assemble_report(eigenspot_scores(baseline, cases, tail), alpha);
}

/// Comparator: per-cell cases/baseline ratios standardized once over the
/// whole grid; every cell with p < alpha is reported directly.
inline HotspotReport detect_baseline_method(const CountMatrix& baseline, const CountMatrix& cases,
                                            double alpha, Tail tail = Tail::two_tailed) {
    return assemble_report(ratio_scores(baseline, cases, tail), alpha);
}

}  // namespace eigenspot

#endif
