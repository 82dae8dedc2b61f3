#ifndef EIGENSPOT_SIMULATOR_HPP
#define EIGENSPOT_SIMULATOR_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eigenspot/errors.hpp"
#include "eigenspot/matrix.hpp"
#include "eigenspot/rng.hpp"

namespace eigenspot {

/// Boolean regions x periods grid, row-major.
struct CellMask {
    std::size_t n_regions = 0;
    std::size_t n_periods = 0;
    std::vector<std::uint8_t> data;

    CellMask() = default;
    CellMask(std::size_t n, std::size_t m) : n_regions(n), n_periods(m), data(n * m, 0) {}

    bool at(std::size_t i, std::size_t j) const { return data[i * n_periods + j] != 0; }
    void set(std::size_t i, std::size_t j) { data[i * n_periods + j] = 1; }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto v : data) c += v != 0;
        return c;
    }
};

/// Parameters of the synthetic population baseline (stand-in for a real
/// population grid): per-region scales drawn log-uniformly over
/// [scale_lo, scale_hi], grown geometrically over periods.
struct SyntheticBaselineParams {
    std::uint64_t seed = 1;
    double scale_lo = 1e3;
    double scale_hi = 1e6;
};

struct SimulationConfig {
    std::size_t n_regions = 32;
    std::size_t n_periods = 19;
    double growth_rate = 0.012;  // 1.2% per period
    std::size_t hotspot_size = 0;  // H; 0 = no injection
    double hotspot_impact = 1.0;   // I >= 1
    std::optional<Cell> hotspot_origin;  // nullopt = uniform over valid origins
    std::uint64_t seed = 0;
    std::optional<CountMatrix> external_baseline;
    SyntheticBaselineParams synthetic;
    // Non-default mode: region-specific Poisson rates taken from each
    // region's first-period baseline count instead of one global rate.
    bool per_region_lambda = false;

    void validate() const {
        if (n_regions == 0 || n_periods == 0) throw ConfigError("grid dimensions must be positive");
        if (!(growth_rate > -1.0)) throw ConfigError("growth_rate must be greater than -1");
        if (hotspot_size > 0) {
            if (!(hotspot_impact >= 1.0)) throw ConfigError("hotspot_impact must be >= 1");
            if (hotspot_size > n_regions || hotspot_size > n_periods) {
                throw ConfigError("hotspot window " + std::to_string(hotspot_size) + "x" +
                                  std::to_string(hotspot_size) + " does not fit the grid");
            }
            if (hotspot_origin) {
                if (hotspot_origin->first + hotspot_size > n_regions ||
                    hotspot_origin->second + hotspot_size > n_periods) {
                    throw ConfigError("hotspot window at (" +
                                      std::to_string(hotspot_origin->first) + "," +
                                      std::to_string(hotspot_origin->second) +
                                      ") leaves the grid");
                }
            }
        }
        if (external_baseline &&
            (external_baseline->n_regions() != n_regions ||
             external_baseline->n_periods() != n_periods)) {
            throw ConfigError("external baseline shape does not match configured grid");
        }
    }
};

struct SimulatedDataset {
    CountMatrix baseline;
    CountMatrix cases;
    CellMask injection_mask;
    SimulationConfig config_echo;
    std::optional<Cell> origin_used;
    double lambda_hat = 0.0;
};

/// Poisson MLE from the first period: the arithmetic mean of column one.
inline double estimate_lambda(const CountMatrix& baseline) {
    double sum = 0.0;
    bool any_positive = false;
    for (std::size_t i = 0; i < baseline.n_regions(); ++i) {
        const double v = baseline(i, 0);
        sum += v;
        if (v > 0.0) any_positive = true;
    }
    if (!any_positive) throw EmptyFirstPeriodError("estimate_lambda: first period is all zero");
    return sum / static_cast<double>(baseline.n_regions());
}

/// Synthetic population grid: log-uniform region scales over [1e3, 1e6],
/// geometric growth across periods, rounded to integers. Deterministic in the
/// seed.
inline CountMatrix synthesize_baseline(std::size_t n_regions, std::size_t n_periods,
                                       double growth_rate, std::uint64_t seed,
                                       double scale_lo = 1e3, double scale_hi = 1e6) {
    if (n_regions == 0 || n_periods == 0) throw ConfigError("dimensions must be positive");
    if (!(scale_lo > 0.0) || !(scale_hi >= scale_lo)) throw ConfigError("bad scale range");
    if (!(growth_rate > -1.0)) throw ConfigError("growth_rate must be greater than -1");

    Xoshiro256PlusPlus rng(seed);
    const double log_lo = std::log(scale_lo), log_hi = std::log(scale_hi);
    std::vector<double> scales(n_regions);
    for (std::size_t i = 0; i < n_regions; ++i) {
        scales[i] = std::exp(log_lo + rng.next_double() * (log_hi - log_lo));
    }

    std::vector<double> values(n_regions * n_periods);
    std::vector<std::string> region_labels(n_regions), period_labels(n_periods);
    for (std::size_t i = 0; i < n_regions; ++i) region_labels[i] = "R" + std::to_string(i + 1);
    for (std::size_t j = 0; j < n_periods; ++j) period_labels[j] = "T" + std::to_string(j + 1);
    for (std::size_t j = 0; j < n_periods; ++j) {
        const double g = std::pow(1.0 + growth_rate, static_cast<double>(j));
        for (std::size_t i = 0; i < n_regions; ++i) {
            values[i * n_periods + j] = static_cast<double>(std::llround(scales[i] * g));
        }
    }
    return CountMatrix(n_regions, n_periods, std::move(values), std::move(region_labels),
                       std::move(period_labels));
}

/// Generate one semi-realistic dataset.
///
/// Stream order contract (part of the reproducibility contract): all case
/// draws consume the xoshiro256++ stream in row-major (region-major) order;
/// when the window origin is random, its two draws come after the full
/// matrix. Injection multiplies existing draws in place (rounding half away
/// from zero), so cells outside the window are bit-identical to an H=0 run
/// with the same seed.
inline SimulatedDataset generate(const SimulationConfig& config) {
    config.validate();
    const std::size_t n = config.n_regions, m = config.n_periods;

    CountMatrix baseline = config.external_baseline
                               ? *config.external_baseline
                               : synthesize_baseline(n, m, config.growth_rate,
                                                     config.synthetic.seed,
                                                     config.synthetic.scale_lo,
                                                     config.synthetic.scale_hi);

    const double lambda_hat = estimate_lambda(baseline);
    std::vector<double> region_rate(n, lambda_hat);
    if (config.per_region_lambda) {
        for (std::size_t i = 0; i < n; ++i) {
            const double v = baseline(i, 0);
            if (!(v > 0.0)) {
                throw ConfigError("per-region rates need positive first-period counts; region " +
                                  std::to_string(i) + " has none");
            }
            region_rate[i] = v;
        }
    }

    std::vector<double> growth(m);
    for (std::size_t j = 0; j < m; ++j) {
        growth[j] = std::pow(1.0 + config.growth_rate, static_cast<double>(j));
    }

    Xoshiro256PlusPlus rng(config.seed);
    std::vector<double> values(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            values[i * m + j] =
                static_cast<double>(sample_poisson(region_rate[i] * growth[j], rng));
        }
    }

    CellMask mask(n, m);
    std::optional<Cell> origin_used;
    if (config.hotspot_size > 0) {
        const std::size_t h = config.hotspot_size;
        Cell origin{0, 0};
        if (config.hotspot_origin) {
            origin = *config.hotspot_origin;
        } else {
            origin.first = static_cast<std::size_t>(rng.next_below(n - h + 1));
            origin.second = static_cast<std::size_t>(rng.next_below(m - h + 1));
        }
        origin_used = origin;
        for (std::size_t i = origin.first; i < origin.first + h; ++i) {
            for (std::size_t j = origin.second; j < origin.second + h; ++j) {
                mask.set(i, j);
                values[i * m + j] = static_cast<double>(
                    std::llround(values[i * m + j] * config.hotspot_impact));
            }
        }
    }

    CountMatrix cases(n, m, std::move(values),
                      std::vector<std::string>(baseline.region_labels()),
                      std::vector<std::string>(baseline.period_labels()));
    return SimulatedDataset{std::move(baseline), std::move(cases), std::move(mask),
                            config,              origin_used,      lambda_hat};
}

}  // namespace eigenspot

#endif
