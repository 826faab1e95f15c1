#pragma once

#include <vector>

#include "selfboost/tensor.hpp"
#include "selfboost/windowing.hpp"

namespace selfboost {

/// Linear autoregression fitted by ordinary least squares: the prediction at
/// one horizon step is intercept + sum_i coefficients[i] * y_{t-i+1}, with
/// coefficients[0] applied to the most recent sample.
struct ArModel {
    int order = 0;
    std::vector<double> coefficients;
    double intercept = 0.0;

    /// Predict from the last `order` samples, most recent last (chronological).
    double predict(const std::vector<double>& recent) const;
};

/// Naive forecast: repeat each window's last observed value of the main task
/// channel across the horizon. Returns [num_samples, horizon].
Tensor persistence_forecast(const WindowedDataset& dataset);

/// Fit an AR(order) model for horizon step `step` (1-based) on the main task
/// channel via normal equations; ridge fallback (lambda = 1e-8) when the
/// plain system is near-singular. Throws SingularSystem when both fail.
ArModel fit_ar(const WindowedDataset& train, int order, int step = 1);

/// Direct multi-horizon AR: one per-step refit (no iterated rollout).
std::vector<ArModel> fit_ar_direct(const WindowedDataset& train, int order);

/// Apply per-step models to every window -> [num_samples, horizon].
Tensor ar_forecast(const WindowedDataset& dataset, const std::vector<ArModel>& models);

/// Main-task actuals [num_samples, horizon] straight from the targets.
Tensor main_task_actuals(const WindowedDataset& dataset);

}  // namespace selfboost
