#pragma once

#include <string>
#include <utility>
#include <vector>

namespace selfboost {

/// Named, uniformly spaced sequence of real samples. The universal currency
/// of the pipeline: the raw input, every intrinsic mode function and the
/// residual are all TimeSeries.
///
/// Construction rejects empty series and non-finite samples, so downstream
/// code may assume both invariants.
class TimeSeries {
public:
    TimeSeries(std::string name, std::vector<double> values, int sample_index_origin = 0);

    const std::string& name() const { return name_; }
    const std::vector<double>& values() const { return values_; }
    int sample_index_origin() const { return sample_index_origin_; }

    int length() const { return static_cast<int>(values_.size()); }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

    double mean() const;
    /// Population standard deviation (divide by n); matches the correlation
    /// denominator convention used in feature selection.
    double std_dev() const;

    TimeSeries with_values(std::vector<double> values) const {
        return TimeSeries(name_, std::move(values), sample_index_origin_);
    }

    TimeSeries renamed(std::string name) const {
        return TimeSeries(std::move(name), values_, sample_index_origin_);
    }

private:
    std::string name_;
    std::vector<double> values_;
    int sample_index_origin_ = 0;
};

/// Mean/std pair captured when a series is normalized, kept for inversion.
struct NormStats {
    double mean = 0.0;
    double std = 1.0;
};

/// Z-score `series` using the mean and population std of `stats_from`
/// (in the pipeline: the training segment). Throws ZeroVariance when the
/// std of `stats_from` is below 1e-12.
std::pair<TimeSeries, NormStats> zscore_normalize(const TimeSeries& series,
                                                  const TimeSeries& stats_from);

/// Apply previously captured stats: (x - mean) / std.
std::vector<double> apply_norm(const std::vector<double>& values, const NormStats& stats);

/// Invert: x * std + mean.
std::vector<double> invert_norm(const std::vector<double>& values, const NormStats& stats);

}  // namespace selfboost
