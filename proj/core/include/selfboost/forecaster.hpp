#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "selfboost/layers.hpp"
#include "selfboost/selection.hpp"
#include "selfboost/tape.hpp"
#include "selfboost/time_series.hpp"
#include "selfboost/windowing.hpp"

namespace selfboost {

enum class ModelVariant { SelfBoosted, MtlOnly, MtvOnly };

const char* variant_name(ModelVariant v);
ModelVariant variant_from_name(const std::string& name);

/// Shape of the shared trunk and the task branches.
struct ArchitectureConfig {
    std::vector<std::pair<int, int>> conv_layers = {{32, 3}, {32, 3}, {32, 3}};  // (filters, width)
    int pool_width = 2;
    std::vector<int> gru_hidden = {64, 32};
    int shared_dense = 32;
    int branch_dense = 16;
    int lag = 12;
    int horizon = 1;
    bool include_original_as_channel = true;
    /// Learned per-view linear projection (lag -> branch_dense) instead of
    /// raw flattened windows.
    bool view_projection = false;
    ModelVariant variant = ModelVariant::SelfBoosted;

    void validate() const;
    /// Sequence length surviving the conv stack and pooling.
    /// Throws ShapeInfeasible when it would be < 1 for this lag.
    int trunk_sequence_length() const;
};

/// Joint loss and optimizer settings.
struct TrainConfig {
    int epochs = 200;
    int batch_size = 32;
    double main_task_weight = 2.0;
    double aux_task_weight = 1.0;
    int early_stop_patience = 20;
    bool shuffle = true;
    double clip_norm = 5.0;
    std::uint64_t seed = 0;
    AdamState adam;  // hyperparameters; moments are owned by the trainer

    void validate() const;
};

struct EpochLog {
    int epoch = 0;
    std::vector<double> train_task_mse;
    double train_joint = 0.0;
    std::vector<double> val_task_mse;
    double val_joint = 0.0;
};

struct TrainingLog {
    std::vector<EpochLog> epochs;
    int best_epoch = -1;
    double best_val_joint = 0.0;
};

/// Eq.-faithful joint objective: arithmetic mean over tasks of weighted
/// per-task MSE.
double joint_loss(const std::vector<Tensor>& predictions, const std::vector<Tensor>& targets,
                  const std::vector<double>& weights);

/// The trunk-plus-branches forecaster. Branch 0 is the main task (the
/// original series); for the self-boosted and MTL variants each related
/// component adds an auxiliary branch predicting that component's future.
/// The main branch concatenates the less-related components' windows as
/// extra views (except under MTL-only).
///
/// Dataset convention: channel 0 is the original series, channel 1+i is
/// decomposition component i; task j targets the channel recorded in
/// WindowedDataset::task_channels[j].
class ForecastModel {
public:
    static ForecastModel build(const ArchitectureConfig& arch, const FeatureGrouping& grouping,
                               std::uint64_t seed);

    const ArchitectureConfig& arch() const { return arch_; }
    const FeatureGrouping& grouping() const { return grouping_; }

    const std::vector<int>& trunk_channels() const { return trunk_channels_; }
    const std::vector<int>& view_channels() const { return view_channels_; }
    /// Dataset channel backing each branch target, main first.
    const std::vector<int>& task_channels() const { return task_channels_; }

    int num_branches() const { return static_cast<int>(branches_.size()); }
    int main_branch_input_width() const;

    const std::vector<NormStats>& channel_stats() const { return channel_stats_; }
    void set_channel_stats(std::vector<NormStats> stats);

    /// Fixed-order (name, tensor) view over every parameter.
    std::vector<std::pair<std::string, Tensor*>> parameters();
    std::vector<std::pair<std::string, const Tensor*>> parameters() const;

    /// Parameter leaves registered once per tape (shared across samples).
    struct TapeIds {
        struct ConvIds {
            Tape::Id kernels, bias;
        };
        struct BranchIds {
            std::vector<DenseLeafIds> view_proj;
            DenseLeafIds hidden;
            DenseLeafIds out;
        };
        std::vector<ConvIds> conv;
        std::vector<GruLeafIds> gru;
        DenseLeafIds shared;
        std::vector<BranchIds> branches;
    };

    TapeIds register_on_tape(Tape& tape) const;

    /// Forward pass for one window; returns one output id per branch,
    /// each a vector of length horizon (normalized space).
    std::vector<Tape::Id> forward_on_tape(Tape& tape, const TapeIds& ids,
                                          const WindowedDataset& ds, int sample) const;

    /// Per-task [num_samples, horizon] predictions in normalized space.
    std::vector<Tensor> predict_normalized(const WindowedDataset& ds) const;

    /// Task weights for the joint loss, aligned with branches.
    std::vector<double> task_weights(const TrainConfig& cfg) const;

    void check_dataset(const WindowedDataset& ds) const;

    struct Branch {
        std::vector<DenseLayer> view_proj;  // only on the main branch with view_projection
        DenseLayer hidden;
        DenseLayer out;
    };

    // mutable access for checkpoint loading and tests
    std::vector<Conv1dLayer>& conv_layers() { return conv_; }
    std::vector<GruLayer>& gru_layers() { return gru_; }
    DenseLayer& shared_dense() { return shared_; }
    std::vector<Branch>& branches() { return branches_; }
    const std::vector<Branch>& branches() const { return branches_; }

private:
    ArchitectureConfig arch_;
    FeatureGrouping grouping_;
    std::vector<int> trunk_channels_;
    std::vector<int> view_channels_;
    std::vector<int> task_channels_;
    std::vector<NormStats> channel_stats_;

    std::vector<Conv1dLayer> conv_;
    std::vector<GruLayer> gru_;
    DenseLayer shared_;
    std::vector<Branch> branches_;
};

/// Forward pass over a dataset with per-task de-normalization to the
/// original scale.
std::vector<Tensor> predict(const ForecastModel& model, const WindowedDataset& dataset);

/// Mini-batch Adam on the joint loss with early stopping on the validation
/// joint loss; the best-epoch parameters are restored on finish. Serialize /
/// restore via save_state/load_state for bit-exact resume.
class Trainer {
public:
    Trainer(ForecastModel& model, const WindowedDataset& train_set, const WindowedDataset& val_set,
            TrainConfig cfg);

    /// Run until the epoch budget or early stopping; restores best weights.
    const TrainingLog& run();

    /// Advance one epoch. Returns false once training has finished (the
    /// best snapshot is restored at that point).
    bool step_epoch();

    const TrainingLog& log() const { return log_; }
    const AdamState& adam() const { return adam_; }
    const Rng& rng() const { return rng_; }

    // checkpointing surface
    struct Snapshot {
        std::vector<Tensor> params;
        int epoch = -1;
        double val_joint = 0.0;
    };
    const Snapshot& best() const { return best_; }
    int next_epoch() const { return next_epoch_; }
    int epochs_since_improvement() const { return epochs_since_improvement_; }
    bool finished() const { return finished_; }

    std::string serialize_rng() const { return rng_.serialize(); }
    void restore(const AdamState& adam, const std::string& rng_state, const Snapshot& best,
                 int next_epoch, int epochs_since_improvement, TrainingLog log, bool finished);

private:
    void restore_best();
    std::vector<double> evaluate_split(const WindowedDataset& ds, std::vector<double>& task_mse);

    ForecastModel& model_;
    const WindowedDataset& train_;
    const WindowedDataset& val_;
    TrainConfig cfg_;
    std::vector<double> weights_;
    AdamState adam_;
    Rng rng_;
    TrainingLog log_;
    Snapshot best_;
    int next_epoch_ = 0;
    int epochs_since_improvement_ = 0;
    bool finished_ = false;
};

/// Convenience wrapper: build a trainer, run it, return the log.
TrainingLog train(ForecastModel& model, const WindowedDataset& train_set,
                  const WindowedDataset& val_set, const TrainConfig& cfg);

}  // namespace selfboost
