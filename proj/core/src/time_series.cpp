#include "selfboost/time_series.hpp"

#include <cmath>

#include "selfboost/error.hpp"

namespace selfboost {

TimeSeries::TimeSeries(std::string name, std::vector<double> values, int sample_index_origin)
    : name_(std::move(name)), values_(std::move(values)), sample_index_origin_(sample_index_origin) {
    if (values_.empty()) {
        throw Error(ErrorCode::InsufficientLength, "time series '" + name_ + "' is empty");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(ErrorCode::MissingValue, "time series '" + name_ + "' has a non-finite sample at index " +
                                                     std::to_string(i));
        }
    }
}

double TimeSeries::mean() const {
    double sum = 0.0;
    for (double v : values_) sum += v;
    return sum / static_cast<double>(values_.size());
}

double TimeSeries::std_dev() const {
    const double m = mean();
    double ss = 0.0;
    for (double v : values_) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values_.size()));
}

std::pair<TimeSeries, NormStats> zscore_normalize(const TimeSeries& series,
                                                  const TimeSeries& stats_from) {
    NormStats stats{stats_from.mean(), stats_from.std_dev()};
    if (stats.std < 1e-12) {
        throw Error(ErrorCode::ZeroVariance,
                    "cannot normalize '" + series.name() + "': stats series has (near-)zero variance");
    }
    return {series.with_values(apply_norm(series.values(), stats)), stats};
}

std::vector<double> apply_norm(const std::vector<double>& values, const NormStats& stats) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - stats.mean) / stats.std;
    return out;
}

std::vector<double> invert_norm(const std::vector<double>& values, const NormStats& stats) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] * stats.std + stats.mean;
    return out;
}

}  // namespace selfboost
