#ifndef EIGENSPOT_MATRIX_HPP
#define EIGENSPOT_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "eigenspot/errors.hpp"

namespace eigenspot {

/// (region, period) coordinate, zero-based.
using Cell = std::pair<std::size_t, std::size_t>;

/// Dense row-major regions x periods grid of nonnegative counts.
///
/// Immutable after construction; entries are validated to be finite and >= 0.
/// Labels are optional; when present their lengths must match the grid.
class CountMatrix {
public:
    CountMatrix(std::size_t n_regions, std::size_t n_periods, std::vector<double> values,
                std::vector<std::string> region_labels = {},
                std::vector<std::string> period_labels = {})
        : n_regions_(n_regions),
          n_periods_(n_periods),
          values_(std::move(values)),
          region_labels_(std::move(region_labels)),
          period_labels_(std::move(period_labels)) {
        if (n_regions_ == 0 || n_periods_ == 0) {
            throw ShapeMismatchError("CountMatrix dimensions must be positive");
        }
        if (values_.size() != n_regions_ * n_periods_) {
            throw ShapeMismatchError("CountMatrix values size " + std::to_string(values_.size()) +
                                     " does not match " + std::to_string(n_regions_) + "x" +
                                     std::to_string(n_periods_));
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            const double v = values_[i];
            if (!std::isfinite(v) || v < 0.0) {
                throw Error("CountMatrix entry at (" + std::to_string(i / n_periods_) + "," +
                            std::to_string(i % n_periods_) + ") is negative or not finite");
            }
        }
        if (!region_labels_.empty() && region_labels_.size() != n_regions_) {
            throw ShapeMismatchError("region label count does not match n_regions");
        }
        if (!period_labels_.empty() && period_labels_.size() != n_periods_) {
            throw ShapeMismatchError("period label count does not match n_periods");
        }
    }

    std::size_t n_regions() const { return n_regions_; }
    std::size_t n_periods() const { return n_periods_; }

    double operator()(std::size_t region, std::size_t period) const {
        return values_[region * n_periods_ + period];
    }

    const std::vector<double>& values() const { return values_; }
    const std::vector<std::string>& region_labels() const { return region_labels_; }
    const std::vector<std::string>& period_labels() const { return period_labels_; }

    bool has_labels() const { return !region_labels_.empty() && !period_labels_.empty(); }

    /// Label for a region, falling back to "R<i+1>" when unlabeled.
    std::string region_label(std::size_t i) const {
        return region_labels_.empty() ? "R" + std::to_string(i + 1) : region_labels_[i];
    }

    /// Label for a period, falling back to "T<j+1>" when unlabeled.
    std::string period_label(std::size_t j) const {
        return period_labels_.empty() ? "T" + std::to_string(j + 1) : period_labels_[j];
    }

    bool all_zero() const {
        for (double v : values_) {
            if (v != 0.0) return false;
        }
        return true;
    }

    bool same_shape(const CountMatrix& other) const {
        return n_regions_ == other.n_regions_ && n_periods_ == other.n_periods_;
    }

private:
    std::size_t n_regions_;
    std::size_t n_periods_;
    std::vector<double> values_;
    std::vector<std::string> region_labels_;
    std::vector<std::string> period_labels_;
};

}  // namespace eigenspot

#endif
