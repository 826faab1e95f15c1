#pragma once

#include <optional>
#include <vector>

#include "selfboost/eemd.hpp"
#include "selfboost/forecaster.hpp"
#include "selfboost/tensor.hpp"

namespace selfboost {

/// RMSE / MAE / MAPE / R-squared over paired actual and predicted values.
/// MAPE is a fraction (100 % == 1.0) over the nonzero actuals, with the
/// excluded-term count reported; it is absent when every actual is zero.
struct MetricReport {
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> mape;
    int mape_excluded = 0;
    double r2 = 0.0;
    int n = 0;
};

MetricReport compute_metrics(const Tensor& actual, const Tensor& predicted);

/// RMSE-coefficient view of an inclusion sweep: coefficient_i = rmse_i / sum.
/// Lower coefficient = the added component mattered more.
struct RmseCoefficientReport {
    std::vector<double> rmse_per_run;
    std::vector<double> coefficients;
    /// Component index (IMFs then residual) added at each run, by descending
    /// correlation with the original. Empty when built from bare RMSEs.
    std::vector<int> component_order;
    /// Number of leading runs whose added component belongs to the task
    /// group; run task_run_count is the first view-phase run ("red point").
    int task_run_count = 0;
};

/// Throws NonPositiveRmse unless every input is > 0.
RmseCoefficientReport rmse_coefficients(const std::vector<double>& rmses);

/// Train one model per component prefix (components sorted by descending
/// correlation with the original) and report test RMSE and coefficients per
/// run. Prefix components stay in the task group until the k-means boundary
/// computed on the full set; later components enter the view group. Every
/// run reuses the same seed schedule. The sweep feeds components only --
/// include_original_as_channel is forced off so each run measures the IMFs'
/// own contribution.
RmseCoefficientReport imf_importance_sweep(const TimeSeries& original, const ImfSet& imfs,
                                           const ArchitectureConfig& arch, const TrainConfig& cfg,
                                           const SplitSpec& split = SplitSpec{});

}  // namespace selfboost
