#include "selfboost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "selfboost/baselines.hpp"
#include "selfboost/error.hpp"
#include "selfboost/prepare.hpp"

namespace selfboost {

MetricReport compute_metrics(const Tensor& actual, const Tensor& predicted) {
    if (!actual.same_shape(predicted)) {
        throw Error(ErrorCode::ShapeMismatch, "compute_metrics: shape mismatch");
    }
    const int n = actual.size();
    if (n < 1) {
        throw Error(ErrorCode::InsufficientLength, "compute_metrics: empty input");
    }

    MetricReport report;
    report.n = n;

    double sq_sum = 0.0;
    double abs_sum = 0.0;
    double ape_sum = 0.0;
    int ape_count = 0;
    double actual_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double err = actual[i] - predicted[i];
        sq_sum += err * err;
        abs_sum += std::abs(err);
        actual_sum += actual[i];
        if (actual[i] != 0.0) {
            ape_sum += std::abs(err) / std::abs(actual[i]);
            ++ape_count;
        }
    }
    report.rmse = std::sqrt(sq_sum / n);
    report.mae = abs_sum / n;
    report.mape_excluded = n - ape_count;
    if (ape_count > 0) {
        report.mape = ape_sum / ape_count;  // fraction: 100% == 1.0
    }

    const double mean = actual_sum / n;
    double ss_tot = 0.0;
    for (int i = 0; i < n; ++i) {
        ss_tot += (actual[i] - mean) * (actual[i] - mean);
    }
    if (ss_tot < 1e-300) {
        report.r2 = sq_sum < 1e-300 ? 1.0 : 0.0;  // constant actuals
    } else {
        report.r2 = 1.0 - sq_sum / ss_tot;
    }
    return report;
}

RmseCoefficientReport rmse_coefficients(const std::vector<double>& rmses) {
    if (rmses.empty()) {
        throw Error(ErrorCode::InsufficientLength, "rmse_coefficients: empty input");
    }
    double sum = 0.0;
    for (double r : rmses) {
        if (!(r > 0.0)) {
            throw Error(ErrorCode::NonPositiveRmse, "rmse_coefficients: all RMSEs must be > 0");
        }
        sum += r;
    }
    RmseCoefficientReport report;
    report.rmse_per_run = rmses;
    report.coefficients.reserve(rmses.size());
    for (double r : rmses) report.coefficients.push_back(r / sum);
    return report;
}

RmseCoefficientReport imf_importance_sweep(const TimeSeries& original, const ImfSet& imfs,
                                           const ArchitectureConfig& arch, const TrainConfig& cfg,
                                           const SplitSpec& split) {
    const int n_components = imfs.num_components();
    if (n_components < 2) {
        throw Error(ErrorCode::TooFewPoints, "imf_importance_sweep: need at least 2 components");
    }

    const SimilarityReport report = similarity_report(original, imfs);
    std::vector<int> order(static_cast<std::size_t>(n_components));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return report.correlations[static_cast<std::size_t>(a)] >
               report.correlations[static_cast<std::size_t>(b)];
    });

    // grouping boundary from the full-set clustering
    const FeatureGrouping full_grouping = group_features(report, 2, false);
    const int boundary = static_cast<int>(full_grouping.task_indices.size());

    ArchitectureConfig run_arch = arch;
    run_arch.variant = ModelVariant::SelfBoosted;
    run_arch.include_original_as_channel = false;

    const PreparedChannels prepared =
        normalize_channels(original, imfs, run_arch.lag, run_arch.horizon, split);

    std::vector<double> rmses;
    rmses.reserve(static_cast<std::size_t>(n_components));
    for (int run = 1; run <= n_components; ++run) {
        FeatureGrouping grouping;
        grouping.num_clusters = 2;
        const int task_count = std::min(run, boundary);
        grouping.task_indices.assign(order.begin(), order.begin() + task_count);
        grouping.view_indices.assign(order.begin() + task_count, order.begin() + run);
        grouping.dropped_indices.assign(order.begin() + run, order.end());
        std::sort(grouping.task_indices.begin(), grouping.task_indices.end());
        std::sort(grouping.view_indices.begin(), grouping.view_indices.end());
        std::sort(grouping.dropped_indices.begin(), grouping.dropped_indices.end());

        const WindowedDataset dataset =
            build_model_dataset(prepared, grouping, run_arch.lag, run_arch.horizon);
        auto [train_ds, val_ds, test_ds] = chronological_split(dataset, split);

        ForecastModel model = ForecastModel::build(run_arch, grouping, cfg.seed);
        model.set_channel_stats(prepared.stats);
        train(model, train_ds, val_ds, cfg);

        const auto predictions = predict(model, test_ds);
        Tensor actual = main_task_actuals(test_ds);
        const NormStats& main_stats = prepared.stats.front();
        for (int i = 0; i < actual.size(); ++i) {
            actual[i] = actual[i] * main_stats.std + main_stats.mean;
        }
        rmses.push_back(compute_metrics(actual, predictions.front()).rmse);
    }

    RmseCoefficientReport result = rmse_coefficients(rmses);
    result.component_order = order;
    result.task_run_count = std::min(boundary, n_components);
    return result;
}

}  // namespace selfboost
