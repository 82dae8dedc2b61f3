#ifndef EIGENSPOT_EVALUATION_HPP
#define EIGENSPOT_EVALUATION_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "eigenspot/detector.hpp"
#include "eigenspot/errors.hpp"
#include "eigenspot/matrix.hpp"
#include "eigenspot/simulator.hpp"
#include "eigenspot/stats.hpp"

namespace eigenspot {

/// Threshold grid for the operational-alpha sweep: z-scores from z_lo to z_hi
/// in z_step increments, each converted to a two-tailed significance level.
/// The defaults span alpha 0.2005 down to 0.0027 over 173 thresholds.
struct SweepSpec {
    double z_lo = 1.28;
    double z_hi = 3.00;
    double z_step = 0.01;
    Tail tail = Tail::two_tailed;

    void validate() const {
        if (!(z_lo < z_hi)) throw ConfigError("SweepSpec: z_lo must be below z_hi");
        if (!(z_step > 0.0)) throw ConfigError("SweepSpec: z_step must be positive");
    }

    std::size_t threshold_count() const {
        validate();
        // the small slack keeps an exact-multiple span from losing its last
        // step to floating-point rounding
        return static_cast<std::size_t>(std::floor((z_hi - z_lo) / z_step + 1e-9)) + 1;
    }

    std::vector<double> alphas() const {
        const std::size_t count = threshold_count();
        std::vector<double> a(count);
        for (std::size_t k = 0; k < count; ++k) {
            a[k] = normal_p_value(z_lo + static_cast<double>(k) * z_step, Tail::two_tailed);
        }
        return a;
    }
};

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

namespace detail {

inline void require_mask_shape(std::size_t n, std::size_t m, const CellMask& mask) {
    if (mask.n_regions != n || mask.n_periods != m) {
        throw ShapeMismatchError("mask shape does not match the report grid");
    }
}

}  // namespace detail

/// Per-cell confusion of a report against the injection ground truth.
inline ConfusionCounts confusion(const HotspotReport& report, const CellMask& mask) {
    detail::require_mask_shape(report.n_regions, report.n_periods, mask);
    ConfusionCounts c;
    for (std::size_t i = 0; i < report.n_regions; ++i) {
        for (std::size_t j = 0; j < report.n_periods; ++j) {
            const bool truth = mask.at(i, j);
            const bool called = report.cells.count({i, j}) > 0;
            if (called && truth) ++c.tp;
            else if (called && !truth) ++c.fp;
            else if (!called && truth) ++c.fn;
            else ++c.tn;
        }
    }
    return c;
}

/// Per-cell binary-classification accuracy: (TP + TN) / (n * m).
inline double accuracy(const HotspotReport& report, const CellMask& mask) {
    const auto c = confusion(report, mask);
    return static_cast<double>(c.tp + c.tn) /
           static_cast<double>(report.n_regions * report.n_periods);
}

/// One dataset evaluated across the whole threshold grid.
struct EvaluationReport {
    Method method = Method::eigenspot;
    std::vector<double> alphas;
    std::vector<double> per_alpha_accuracy;
    std::vector<ConfusionCounts> confusion_totals;
    double mean_accuracy = 0.0;
    std::size_t replicates = 1;
    // setting echo
    std::size_t n_regions = 0, n_periods = 0;
    std::size_t hotspot_size = 0;
    double hotspot_impact = 1.0;
    std::uint64_t seed = 0;
};

namespace detail {

// cell membership predicate at one alpha, shared by both methods
struct CellFlagger {
    const DetectionScores* scores;
    double alpha;

    bool operator()(std::size_t i, std::size_t j) const {
        if (scores->method == Method::eigenspot) {
            if (scores->spatial.degenerate || scores->temporal.degenerate) return false;
            return scores->spatial.p_values[i] < alpha && scores->temporal.p_values[j] < alpha;
        }
        if (scores->ratio_chart.degenerate) return false;
        return scores->ratio_chart.p_values[i * scores->n_periods + j] < alpha;
    }
};

inline ConfusionCounts confusion_at(const CellFlagger& flagged, std::size_t n, std::size_t m,
                                    const CellMask& mask) {
    ConfusionCounts c;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const bool truth = mask.at(i, j);
            const bool called = flagged(i, j);
            if (called && truth) ++c.tp;
            else if (called && !truth) ++c.fp;
            else if (!called && truth) ++c.fn;
            else ++c.tn;
        }
    }
    return c;
}

inline EvaluationReport sweep_scores(const DetectionScores& scores, const CellMask& mask,
                                     const SweepSpec& spec) {
    require_mask_shape(scores.n_regions, scores.n_periods, mask);
    EvaluationReport r;
    r.method = scores.method;
    r.alphas = spec.alphas();
    r.n_regions = scores.n_regions;
    r.n_periods = scores.n_periods;
    const double cells = static_cast<double>(scores.n_regions * scores.n_periods);
    double acc_sum = 0.0;
    for (double alpha : r.alphas) {
        const auto c = confusion_at(CellFlagger{&scores, alpha}, scores.n_regions,
                                    scores.n_periods, mask);
        const double acc = static_cast<double>(c.tp + c.tn) / cells;
        r.per_alpha_accuracy.push_back(acc);
        r.confusion_totals.push_back(c);
        acc_sum += acc;
    }
    r.mean_accuracy = acc_sum / static_cast<double>(r.alphas.size());
    return r;
}

}  // namespace detail

/// Sweep one baseline/cases pair over the threshold grid with the given
/// method; detection scores are computed once and re-thresholded per alpha.
inline EvaluationReport alpha_sweep(const CountMatrix& baseline, const CountMatrix& cases,
                                    const CellMask& mask, Method method, const SweepSpec& spec) {
    const DetectionScores scores = method == Method::eigenspot
                                       ? eigenspot_scores(baseline, cases, spec.tail)
                                       : ratio_scores(baseline, cases, spec.tail);
    return detail::sweep_scores(scores, mask, spec);
}

/// Score a fixed external per-cell verdict grid (third-party method output)
/// against the ground truth at every alpha of the sweep. The verdicts are
/// already thresholded, so per-alpha accuracy is constant across the grid.
inline EvaluationReport verdict_sweep(const CellMask& verdicts, const CellMask& mask,
                                      const SweepSpec& spec) {
    if (verdicts.n_regions != mask.n_regions || verdicts.n_periods != mask.n_periods) {
        throw ShapeMismatchError("verdict grid shape does not match the dataset grid");
    }
    EvaluationReport r;
    r.alphas = spec.alphas();
    r.n_regions = verdicts.n_regions;
    r.n_periods = verdicts.n_periods;
    ConfusionCounts c;
    for (std::size_t i = 0; i < verdicts.n_regions; ++i) {
        for (std::size_t j = 0; j < verdicts.n_periods; ++j) {
            const bool truth = mask.at(i, j);
            const bool called = verdicts.at(i, j);
            if (called && truth) ++c.tp;
            else if (called && !truth) ++c.fp;
            else if (!called && truth) ++c.fn;
            else ++c.tn;
        }
    }
    const double acc = static_cast<double>(c.tp + c.tn) /
                       static_cast<double>(verdicts.n_regions * verdicts.n_periods);
    r.per_alpha_accuracy.assign(r.alphas.size(), acc);
    r.confusion_totals.assign(r.alphas.size(), c);
    r.mean_accuracy = acc;
    return r;
}

// ---------------------------------------------------------------------------
// Multi-replicate study (Table-1-shaped protocol)
// ---------------------------------------------------------------------------

struct StudySetting {
    std::size_t hotspot_size = 3;
    double hotspot_impact = 2.0;
};

/// External verdict provider: (setting index, replicate index) -> per-cell
/// verdict grid. Invoked only when a study scores a third-party method.
using VerdictSource = std::function<CellMask(std::size_t, std::size_t)>;

struct StudyConfig {
    std::vector<StudySetting> settings;
    std::size_t replicates = 100;
    std::uint64_t master_seed = 0;
    std::vector<Method> methods{Method::eigenspot, Method::baseline_ratio};
    SweepSpec sweep;
    /// Grid/growth/baseline template; hotspot fields and seed are overwritten
    /// per setting and replicate.
    SimulationConfig base;
    VerdictSource external_verdicts;

    void validate() const {
        if (settings.empty()) throw ConfigError("study: no settings");
        if (replicates == 0) throw ConfigError("study: replicates must be >= 1");
        if (methods.empty() && !external_verdicts) throw ConfigError("study: nothing to score");
        sweep.validate();
    }
};

struct MethodStudyResult {
    std::string method_name;
    double mean_accuracy = 0.0;
    double std_error = 0.0;
    std::vector<double> per_replicate_mean;
    std::vector<std::vector<double>> per_replicate_per_alpha;
};

struct StudyRow {
    StudySetting setting;
    std::vector<MethodStudyResult> methods;
};

/// Simulation config of one study dataset; exposed so external tooling can
/// regenerate the exact per-replicate inputs a study scored.
inline SimulationConfig study_replicate_config(const StudyConfig& cfg, const StudySetting& setting,
                                               std::size_t replicate) {
    SimulationConfig c = cfg.base;
    c.hotspot_size = setting.hotspot_size;
    c.hotspot_impact = setting.hotspot_impact;
    c.seed = replicate_seed(cfg.master_seed, replicate);
    return c;
}

namespace detail {

inline MethodStudyResult aggregate_method(std::string name,
                                          std::vector<std::vector<double>> per_alpha) {
    MethodStudyResult r;
    r.method_name = std::move(name);
    r.per_replicate_per_alpha = std::move(per_alpha);
    for (const auto& row : r.per_replicate_per_alpha) {
        double s = 0.0;
        for (double a : row) s += a;
        r.per_replicate_mean.push_back(s / static_cast<double>(row.size()));
    }
    double s = 0.0;
    for (double v : r.per_replicate_mean) s += v;
    r.mean_accuracy = s / static_cast<double>(r.per_replicate_mean.size());
    if (r.per_replicate_mean.size() > 1) {
        double ss = 0.0;
        for (double v : r.per_replicate_mean) {
            ss += (v - r.mean_accuracy) * (v - r.mean_accuracy);
        }
        const double nrep = static_cast<double>(r.per_replicate_mean.size());
        r.std_error = std::sqrt(ss / (nrep - 1.0)) / std::sqrt(nrep);
    }
    return r;
}

}  // namespace detail

/// Run the full protocol: for every setting, `replicates` datasets seeded
/// independently from the master seed (order-independent), each scored over
/// the sweep by every method on the same data. Optional progress callback
/// receives (datasets done, datasets total).
inline std::vector<StudyRow> run_study(
    const StudyConfig& cfg, const std::function<void(std::size_t, std::size_t)>& progress = {}) {
    cfg.validate();
    std::vector<StudyRow> rows;
    const std::size_t total = cfg.settings.size() * cfg.replicates;
    std::size_t done = 0;
    for (std::size_t si = 0; si < cfg.settings.size(); ++si) {
        const auto& setting = cfg.settings[si];
        // indexed per-replicate slots; aggregation below walks them in index
        // order so execution order can never leak into the results
        std::vector<std::vector<std::vector<double>>> method_acc(cfg.methods.size());
        for (auto& v : method_acc) v.resize(cfg.replicates);
        std::vector<std::vector<double>> external_acc(cfg.external_verdicts ? cfg.replicates : 0);

        for (std::size_t r = 0; r < cfg.replicates; ++r) {
            const SimulatedDataset ds = generate(study_replicate_config(cfg, setting, r));
            for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
                method_acc[mi][r] = alpha_sweep(ds.baseline, ds.cases, ds.injection_mask,
                                                cfg.methods[mi], cfg.sweep)
                                        .per_alpha_accuracy;
            }
            if (cfg.external_verdicts) {
                external_acc[r] =
                    verdict_sweep(cfg.external_verdicts(si, r), ds.injection_mask, cfg.sweep)
                        .per_alpha_accuracy;
            }
            if (progress) progress(++done, total);
        }

        StudyRow row;
        row.setting = setting;
        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
            row.methods.push_back(detail::aggregate_method(to_string(cfg.methods[mi]),
                                                           std::move(method_acc[mi])));
        }
        if (cfg.external_verdicts) {
            row.methods.push_back(detail::aggregate_method("external", std::move(external_acc)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace eigenspot

#endif
