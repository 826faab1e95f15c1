#pragma once

#include <string>
#include <vector>

#include "selfboost/eemd.hpp"
#include "selfboost/forecaster.hpp"
#include "selfboost/json_io.hpp"
#include "selfboost/metrics.hpp"
#include "selfboost/prepare.hpp"
#include "selfboost/selection.hpp"
#include "selfboost/windowing.hpp"

namespace selfboost {

struct SelectionConfig {
    int num_clusters = 2;
    bool drop_least_related = false;
    bool fold_negative_correlation = false;
};

void to_json(json& j, const SelectionConfig& c);
void from_json(const json& j, SelectionConfig& c);

/// One-shot experiment: decompose once, select once, then per lag train the
/// self-boosted model, both ablation variants and the baselines, and collect
/// test metrics into a results table. Everything below output_dir is a pure
/// function of (input CSV, config, seed).
struct ExperimentConfig {
    std::string input_csv;
    std::string output_dir;
    std::uint64_t seed = 0;
    std::vector<int> lags = {1, 3, 6, 12};
    int horizon = 1;
    bool interpolate_missing = false;
    int ar_order = 0;  // 0 = use the lag
    DecompositionConfig decomposition;
    SelectionConfig selection;
    ArchitectureConfig architecture;  // lag/horizon are overridden per run
    TrainConfig training;
    SplitSpec split;

    void validate() const;
};

void to_json(json& j, const ExperimentConfig& c);
void from_json(const json& j, ExperimentConfig& c);

ExperimentConfig experiment_config_from_file(const std::string& path);

/// Clamp conv widths and the pool width so the trunk stays feasible for
/// short lags (a 3-wide conv stack cannot consume a lag-1 window).
ArchitectureConfig resolve_architecture(ArchitectureConfig base, int lag, int horizon);

// ---- decomposition artifacts ----

void write_decomposition_csv(const std::string& path, const ImfSet& set);
ImfSet read_decomposition_csv(const std::string& path);
/// Sidecar: config, seed, per-mode sift counts, zero-crossing/extrema counts.
json decomposition_sidecar(const ImfSet& set, const DecompositionConfig& config);

// ---- grouping artifacts ----

json grouping_document(const SimilarityReport& report, const FeatureGrouping& grouping);
void read_grouping_document(const json& j, SimilarityReport& report, FeatureGrouping& grouping);

// ---- prediction / metrics artifacts ----

/// Rows (index, actual, predicted); index is the global time index of the
/// predicted sample, offset by the window position of the split.
void write_predictions_csv(const std::string& path, const Tensor& actual, const Tensor& predicted,
                           int first_window_global, int lag);
json metrics_to_json(const MetricReport& report);
void write_training_log_csv(const std::string& path, const TrainingLog& log,
                            const std::vector<std::string>& task_names);

/// Metrics from a predictions CSV (actual/predicted columns).
MetricReport evaluate_predictions_csv(const std::string& path);

// ---- the runner ----

struct ExperimentReport {
    std::vector<std::string> methods;  // fixed order
    std::vector<int> lags;
    std::vector<std::vector<MetricReport>> metrics;  // [method][lag]
};

ExperimentReport run_experiment(const ExperimentConfig& config);

/// The results table written by run_experiment: one row per method, one
/// column per (metric, lag) pair.
void write_results_csv(const std::string& path, const ExperimentReport& report);

}  // namespace selfboost
