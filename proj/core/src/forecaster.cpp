#include "selfboost/forecaster.hpp"

#include <algorithm>
#include <cmath>

#include "selfboost/error.hpp"

namespace selfboost {

const char* variant_name(ModelVariant v) {
    switch (v) {
        case ModelVariant::SelfBoosted: return "self_boosted";
        case ModelVariant::MtlOnly: return "mtl_only";
        case ModelVariant::MtvOnly: return "mtv_only";
    }
    return "unknown";
}

ModelVariant variant_from_name(const std::string& name) {
    if (name == "self_boosted") return ModelVariant::SelfBoosted;
    if (name == "mtl_only") return ModelVariant::MtlOnly;
    if (name == "mtv_only") return ModelVariant::MtvOnly;
    throw Error(ErrorCode::ConfigInvalid, "unknown model variant '" + name + "'");
}

void ArchitectureConfig::validate() const {
    if (conv_layers.empty()) throw Error(ErrorCode::ConfigInvalid, "need at least one conv layer");
    for (const auto& [filters, width] : conv_layers) {
        if (filters < 1 || width < 1)
            throw Error(ErrorCode::ConfigInvalid, "conv filters and width must be >= 1");
    }
    if (pool_width < 1) throw Error(ErrorCode::ConfigInvalid, "pool_width must be >= 1");
    if (gru_hidden.empty()) throw Error(ErrorCode::ConfigInvalid, "need at least one GRU layer");
    for (int h : gru_hidden) {
        if (h < 1) throw Error(ErrorCode::ConfigInvalid, "gru_hidden sizes must be >= 1");
    }
    if (shared_dense < 1 || branch_dense < 1)
        throw Error(ErrorCode::ConfigInvalid, "dense sizes must be >= 1");
    if (lag < 1 || horizon < 1) throw Error(ErrorCode::ConfigInvalid, "lag and horizon must be >= 1");
}

int ArchitectureConfig::trunk_sequence_length() const {
    int length = lag;
    for (const auto& [filters, width] : conv_layers) {
        length = length - width + 1;
        if (length < 1) {
            throw Error(ErrorCode::ShapeInfeasible,
                        "conv stack consumes the whole window: lag " + std::to_string(lag) +
                            " is too short");
        }
    }
    length = length / pool_width;
    if (length < 1) {
        throw Error(ErrorCode::ShapeInfeasible,
                    "pool width " + std::to_string(pool_width) + " consumes the whole window");
    }
    return length;
}

void TrainConfig::validate() const {
    if (epochs < 1) throw Error(ErrorCode::ConfigInvalid, "epochs must be >= 1");
    if (batch_size < 1) throw Error(ErrorCode::ConfigInvalid, "batch_size must be >= 1");
    if (main_task_weight <= 0.0 || aux_task_weight <= 0.0)
        throw Error(ErrorCode::ConfigInvalid, "task weights must be > 0");
    if (early_stop_patience < 1)
        throw Error(ErrorCode::ConfigInvalid, "early_stop_patience must be >= 1");
}

double joint_loss(const std::vector<Tensor>& predictions, const std::vector<Tensor>& targets,
                  const std::vector<double>& weights) {
    if (predictions.size() != targets.size() || predictions.size() != weights.size() ||
        predictions.empty()) {
        throw Error(ErrorCode::ShapeMismatch, "joint_loss: task count mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        acc += weights[i] * mse(predictions[i], targets[i]);
    }
    return acc / static_cast<double>(predictions.size());
}

ForecastModel ForecastModel::build(const ArchitectureConfig& arch, const FeatureGrouping& grouping,
                                   std::uint64_t seed) {
    arch.validate();
    if (grouping.task_indices.empty()) {
        throw Error(ErrorCode::ConfigInvalid, "grouping has no task components");
    }
    const int seq_len = arch.trunk_sequence_length();
    (void)seq_len;

    ForecastModel model;
    model.arch_ = arch;
    model.grouping_ = grouping;

    if (arch.include_original_as_channel) model.trunk_channels_.push_back(0);
    for (int idx : grouping.task_indices) model.trunk_channels_.push_back(1 + idx);
    for (int idx : grouping.view_indices) model.view_channels_.push_back(1 + idx);

    model.task_channels_.push_back(0);
    if (arch.variant != ModelVariant::MtvOnly) {
        for (int idx : grouping.task_indices) model.task_channels_.push_back(1 + idx);
    }

    const int num_channels = 1 + static_cast<int>(grouping.task_indices.size() +
                                                  grouping.view_indices.size() +
                                                  grouping.dropped_indices.size());
    model.channel_stats_.assign(static_cast<std::size_t>(num_channels), NormStats{});

    Rng rng(seed);
    int in_channels = static_cast<int>(model.trunk_channels_.size());
    for (const auto& [filters, width] : arch.conv_layers) {
        model.conv_.push_back(make_conv1d(filters, width, in_channels, rng));
        in_channels = filters;
    }
    int gru_input = in_channels;
    for (int hidden : arch.gru_hidden) {
        model.gru_.push_back(make_gru(hidden, gru_input, rng));
        gru_input = hidden;
    }
    model.shared_ = make_dense(arch.shared_dense, gru_input, rng);

    const bool main_has_views = arch.variant != ModelVariant::MtlOnly;
    const int num_views = static_cast<int>(model.view_channels_.size());
    const int view_width = arch.view_projection ? arch.branch_dense : arch.lag;

    const int num_branches = arch.variant == ModelVariant::MtvOnly
                                 ? 1
                                 : 1 + static_cast<int>(grouping.task_indices.size());
    for (int b = 0; b < num_branches; ++b) {
        Branch branch;
        int input_width = arch.shared_dense;
        if (b == 0 && main_has_views) {
            if (arch.view_projection) {
                for (int v = 0; v < num_views; ++v) {
                    branch.view_proj.push_back(make_dense(arch.branch_dense, arch.lag, rng));
                }
            }
            input_width += num_views * view_width;
        }
        branch.hidden = make_dense(arch.branch_dense, input_width, rng);
        branch.out = make_dense(arch.horizon, arch.branch_dense, rng);
        model.branches_.push_back(std::move(branch));
    }
    return model;
}

int ForecastModel::main_branch_input_width() const {
    return branches_.front().hidden.in_size();
}

void ForecastModel::set_channel_stats(std::vector<NormStats> stats) {
    if (stats.size() != channel_stats_.size()) {
        throw Error(ErrorCode::ShapeMismatch, "set_channel_stats: channel count mismatch");
    }
    channel_stats_ = std::move(stats);
}

std::vector<std::pair<std::string, Tensor*>> ForecastModel::parameters() {
    std::vector<std::pair<std::string, Tensor*>> out;
    for (std::size_t i = 0; i < conv_.size(); ++i) {
        const std::string prefix = "conv" + std::to_string(i) + ".";
        out.emplace_back(prefix + "kernels", &conv_[i].kernels);
        out.emplace_back(prefix + "bias", &conv_[i].biases);
    }
    for (std::size_t i = 0; i < gru_.size(); ++i) {
        const std::string prefix = "gru" + std::to_string(i) + ".";
        GruLayer& g = gru_[i];
        out.emplace_back(prefix + "w_update", &g.w_update);
        out.emplace_back(prefix + "u_update", &g.u_update);
        out.emplace_back(prefix + "b_update", &g.b_update);
        out.emplace_back(prefix + "w_reset", &g.w_reset);
        out.emplace_back(prefix + "u_reset", &g.u_reset);
        out.emplace_back(prefix + "b_reset", &g.b_reset);
        out.emplace_back(prefix + "w_cand", &g.w_cand);
        out.emplace_back(prefix + "u_cand", &g.u_cand);
        out.emplace_back(prefix + "b_cand", &g.b_cand);
    }
    out.emplace_back("shared.weights", &shared_.weights);
    out.emplace_back("shared.bias", &shared_.bias);
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        const std::string prefix = "branch" + std::to_string(b) + ".";
        for (std::size_t v = 0; v < branches_[b].view_proj.size(); ++v) {
            const std::string vp = prefix + "view_proj" + std::to_string(v) + ".";
            out.emplace_back(vp + "weights", &branches_[b].view_proj[v].weights);
            out.emplace_back(vp + "bias", &branches_[b].view_proj[v].bias);
        }
        out.emplace_back(prefix + "hidden.weights", &branches_[b].hidden.weights);
        out.emplace_back(prefix + "hidden.bias", &branches_[b].hidden.bias);
        out.emplace_back(prefix + "out.weights", &branches_[b].out.weights);
        out.emplace_back(prefix + "out.bias", &branches_[b].out.bias);
    }
    return out;
}

std::vector<std::pair<std::string, const Tensor*>> ForecastModel::parameters() const {
    auto mutable_view = const_cast<ForecastModel*>(this)->parameters();
    std::vector<std::pair<std::string, const Tensor*>> out;
    out.reserve(mutable_view.size());
    for (auto& [name, tensor] : mutable_view) out.emplace_back(name, tensor);
    return out;
}

ForecastModel::TapeIds ForecastModel::register_on_tape(Tape& tape) const {
    TapeIds ids;
    for (const auto& layer : conv_) {
        ids.conv.push_back({tape.leaf(layer.kernels), tape.leaf(layer.biases)});
    }
    for (const auto& layer : gru_) ids.gru.push_back(gru_leaves(tape, layer));
    ids.shared = dense_leaves(tape, shared_);
    for (const auto& branch : branches_) {
        TapeIds::BranchIds b;
        for (const auto& proj : branch.view_proj) b.view_proj.push_back(dense_leaves(tape, proj));
        b.hidden = dense_leaves(tape, branch.hidden);
        b.out = dense_leaves(tape, branch.out);
        ids.branches.push_back(std::move(b));
    }
    return ids;
}

void ForecastModel::check_dataset(const WindowedDataset& ds) const {
    if (ds.lag != arch_.lag || ds.horizon != arch_.horizon) {
        throw Error(ErrorCode::ShapeMismatch, "dataset lag/horizon do not match the model");
    }
    if (ds.num_channels() != static_cast<int>(channel_stats_.size())) {
        throw Error(ErrorCode::ShapeMismatch, "dataset channel count does not match the model");
    }
    if (ds.num_tasks() < static_cast<int>(task_channels_.size())) {
        throw Error(ErrorCode::ShapeMismatch, "dataset provides fewer tasks than the model expects");
    }
    for (std::size_t j = 0; j < task_channels_.size(); ++j) {
        if (ds.task_channels[j] != task_channels_[j]) {
            throw Error(ErrorCode::ShapeMismatch,
                        "dataset task channel order does not match the model");
        }
    }
}

std::vector<Tape::Id> ForecastModel::forward_on_tape(Tape& tape, const TapeIds& ids,
                                                     const WindowedDataset& ds, int sample) const {
    const int lag = arch_.lag;

    Tensor trunk_input({lag, static_cast<int>(trunk_channels_.size())});
    for (int l = 0; l < lag; ++l) {
        for (std::size_t c = 0; c < trunk_channels_.size(); ++c) {
            trunk_input.at(l, static_cast<int>(c)) = ds.inputs.at(sample, l, trunk_channels_[c]);
        }
    }
    Tape::Id x = tape.leaf(std::move(trunk_input));
    for (const auto& conv : ids.conv) {
        x = tape.conv1d(x, conv.kernels, conv.bias);
    }
    x = tape.maxpool1d(x, arch_.pool_width);

    const int steps = tape.value(x).dim(0);
    std::vector<Tape::Id> sequence(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) sequence[static_cast<std::size_t>(t)] = tape.row(x, t);
    Tape::Id last = -1;
    for (std::size_t l = 0; l < gru_.size(); ++l) {
        Tape::Id h = tape.leaf(Tensor({gru_[l].hidden_size()}));
        for (int t = 0; t < steps; ++t) {
            h = gru_step_on_tape(tape, ids.gru[l], sequence[static_cast<std::size_t>(t)], h);
            sequence[static_cast<std::size_t>(t)] = h;
        }
        last = h;
    }
    const Tape::Id shared_repr = tape.relu(dense_on_tape(tape, ids.shared, last));

    std::vector<Tape::Id> outputs;
    outputs.reserve(branches_.size());
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        Tape::Id branch_in = shared_repr;
        if (b == 0 && arch_.variant != ModelVariant::MtlOnly && !view_channels_.empty()) {
            std::vector<Tape::Id> parts{shared_repr};
            for (std::size_t v = 0; v < view_channels_.size(); ++v) {
                Tensor window({lag});
                for (int l = 0; l < lag; ++l) {
                    window[l] = ds.inputs.at(sample, l, view_channels_[v]);
                }
                Tape::Id view = tape.leaf(std::move(window));
                if (arch_.view_projection) {
                    view = dense_on_tape(tape, ids.branches[b].view_proj[v], view);
                }
                parts.push_back(view);
            }
            branch_in = tape.concat(parts);
        }
        const Tape::Id hidden = tape.relu(dense_on_tape(tape, ids.branches[b].hidden, branch_in));
        outputs.push_back(dense_on_tape(tape, ids.branches[b].out, hidden));
    }
    return outputs;
}

std::vector<Tensor> ForecastModel::predict_normalized(const WindowedDataset& ds) const {
    check_dataset(ds);
    const int n = ds.num_samples();
    std::vector<Tensor> out;
    for (int b = 0; b < num_branches(); ++b) out.push_back(Tensor({n, arch_.horizon}));

    const int chunk = 256;  // bound tape growth
    for (int start = 0; start < n; start += chunk) {
        const int end = std::min(n, start + chunk);
        Tape tape;
        const TapeIds ids = register_on_tape(tape);
        for (int s = start; s < end; ++s) {
            const auto outputs = forward_on_tape(tape, ids, ds, s);
            for (std::size_t b = 0; b < outputs.size(); ++b) {
                const Tensor& v = tape.value(outputs[b]);
                for (int h = 0; h < arch_.horizon; ++h) out[b].at(s, h) = v[h];
            }
        }
    }
    return out;
}

std::vector<double> ForecastModel::task_weights(const TrainConfig& cfg) const {
    std::vector<double> weights;
    weights.push_back(cfg.main_task_weight);
    for (int b = 1; b < num_branches(); ++b) weights.push_back(cfg.aux_task_weight);
    return weights;
}

std::vector<Tensor> predict(const ForecastModel& model, const WindowedDataset& dataset) {
    auto outputs = model.predict_normalized(dataset);
    const auto& stats = model.channel_stats();
    for (int b = 0; b < model.num_branches(); ++b) {
        const NormStats& ns = stats[static_cast<std::size_t>(model.task_channels()[static_cast<std::size_t>(b)])];
        Tensor& t = outputs[static_cast<std::size_t>(b)];
        for (int i = 0; i < t.size(); ++i) t[i] = t[i] * ns.std + ns.mean;
    }
    return outputs;
}

// ---- Trainer ----

Trainer::Trainer(ForecastModel& model, const WindowedDataset& train_set,
                 const WindowedDataset& val_set, TrainConfig cfg)
    : model_(model), train_(train_set), val_(val_set), cfg_(std::move(cfg)), rng_(cfg_.seed) {
    cfg_.validate();
    model_.check_dataset(train_);
    model_.check_dataset(val_);
    weights_ = model_.task_weights(cfg_);
    adam_ = cfg_.adam;
    auto named = model_.parameters();
    std::vector<Tensor*> params;
    params.reserve(named.size());
    for (auto& [name, tensor] : named) params.push_back(tensor);
    adam_.init_moments(params);
}

std::vector<double> Trainer::evaluate_split(const WindowedDataset& ds,
                                            std::vector<double>& task_mse) {
    const int n = ds.num_samples();
    const int num_tasks = model_.num_branches();
    task_mse.assign(static_cast<std::size_t>(num_tasks), 0.0);
    for (int start = 0; start < n; start += cfg_.batch_size) {
        const int end = std::min(n, start + cfg_.batch_size);
        Tape tape;
        const auto ids = model_.register_on_tape(tape);
        for (int s = start; s < end; ++s) {
            const auto outputs = model_.forward_on_tape(tape, ids, ds, s);
            for (int j = 0; j < num_tasks; ++j) {
                Tensor target({ds.horizon});
                for (int h = 0; h < ds.horizon; ++h) target[h] = ds.targets.at(s, j, h);
                const auto loss = tape.mse(outputs[static_cast<std::size_t>(j)], tape.leaf(std::move(target)));
                task_mse[static_cast<std::size_t>(j)] += tape.value(loss)[0];
            }
        }
    }
    for (double& v : task_mse) v /= n;
    return task_mse;
}

bool Trainer::step_epoch() {
    if (finished_) return false;
    const int epoch = next_epoch_;
    const int n = train_.num_samples();
    const int num_tasks = model_.num_branches();

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    if (cfg_.shuffle) {
        for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(rng_.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
    }

    auto named = model_.parameters();
    std::vector<Tensor*> params;
    params.reserve(named.size());
    for (auto& [name, tensor] : named) params.push_back(tensor);

    std::vector<double> train_task_sum(static_cast<std::size_t>(num_tasks), 0.0);
    int batch_index = 0;
    for (int start = 0; start < n; start += cfg_.batch_size, ++batch_index) {
        const int end = std::min(n, start + cfg_.batch_size);
        const int batch = end - start;

        Tape tape;
        const auto ids = model_.register_on_tape(tape);
        // register_on_tape lays leaves down in parameters() order on a fresh tape
        if (static_cast<std::size_t>(tape.size()) != params.size()) {
            throw Error(ErrorCode::ShapeMismatch, "parameter leaf registration out of sync");
        }
        std::vector<Tape::Id> param_leaves;
        param_leaves.reserve(params.size());
        for (int id = 0; id < tape.size(); ++id) param_leaves.push_back(id);

        std::vector<Tape::Id> sample_losses;
        sample_losses.reserve(static_cast<std::size_t>(batch));
        for (int k = start; k < end; ++k) {
            const int s = order[static_cast<std::size_t>(k)];
            const auto outputs = model_.forward_on_tape(tape, ids, train_, s);
            std::vector<Tape::Id> task_losses;
            task_losses.reserve(static_cast<std::size_t>(num_tasks));
            for (int j = 0; j < num_tasks; ++j) {
                Tensor target({train_.horizon});
                for (int h = 0; h < train_.horizon; ++h) target[h] = train_.targets.at(s, j, h);
                task_losses.push_back(
                    tape.mse(outputs[static_cast<std::size_t>(j)], tape.leaf(std::move(target))));
                train_task_sum[static_cast<std::size_t>(j)] += tape.value(task_losses.back())[0];
            }
            std::vector<double> coeffs(weights_);
            for (double& c : coeffs) c /= num_tasks;
            sample_losses.push_back(tape.lin_comb(task_losses, coeffs));
        }
        const std::vector<double> batch_coeffs(sample_losses.size(), 1.0 / batch);
        const Tape::Id batch_loss = tape.lin_comb(sample_losses, batch_coeffs);
        const double loss_value = tape.value(batch_loss)[0];
        if (!std::isfinite(loss_value)) {
            throw Error(ErrorCode::NaNLoss, "non-finite loss at epoch " + std::to_string(epoch) +
                                                ", batch " + std::to_string(batch_index));
        }

        tape.backward(batch_loss);
        std::vector<Tensor> grads;
        grads.reserve(params.size());
        for (std::size_t p = 0; p < params.size(); ++p) {
            grads.push_back(tape.grad(param_leaves[p]));
        }
        clip_gradients(grads, cfg_.clip_norm);
        adam_step(adam_, params, grads);
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_task_mse.resize(static_cast<std::size_t>(num_tasks));
    for (int j = 0; j < num_tasks; ++j) {
        entry.train_task_mse[static_cast<std::size_t>(j)] =
            train_task_sum[static_cast<std::size_t>(j)] / n;
    }
    entry.train_joint = 0.0;
    for (int j = 0; j < num_tasks; ++j) {
        entry.train_joint += weights_[static_cast<std::size_t>(j)] *
                             entry.train_task_mse[static_cast<std::size_t>(j)];
    }
    entry.train_joint /= num_tasks;

    evaluate_split(val_, entry.val_task_mse);
    entry.val_joint = 0.0;
    for (int j = 0; j < num_tasks; ++j) {
        entry.val_joint += weights_[static_cast<std::size_t>(j)] *
                           entry.val_task_mse[static_cast<std::size_t>(j)];
    }
    entry.val_joint /= num_tasks;
    if (!std::isfinite(entry.val_joint)) {
        throw Error(ErrorCode::NaNLoss, "non-finite validation loss at epoch " + std::to_string(epoch));
    }
    log_.epochs.push_back(entry);

    if (best_.epoch < 0 || entry.val_joint < best_.val_joint) {
        best_.epoch = epoch;
        best_.val_joint = entry.val_joint;
        best_.params.clear();
        for (const Tensor* p : params) best_.params.push_back(*p);
        epochs_since_improvement_ = 0;
    } else {
        ++epochs_since_improvement_;
    }

    ++next_epoch_;
    if (next_epoch_ >= cfg_.epochs || epochs_since_improvement_ >= cfg_.early_stop_patience) {
        restore_best();
        finished_ = true;
        return false;
    }
    return true;
}

void Trainer::restore_best() {
    if (best_.epoch < 0) return;
    auto named = model_.parameters();
    for (std::size_t p = 0; p < named.size(); ++p) {
        *named[p].second = best_.params[p];
    }
    log_.best_epoch = best_.epoch;
    log_.best_val_joint = best_.val_joint;
}

const TrainingLog& Trainer::run() {
    while (step_epoch()) {
    }
    return log_;
}

void Trainer::restore(const AdamState& adam, const std::string& rng_state, const Snapshot& best,
                      int next_epoch, int epochs_since_improvement, TrainingLog log,
                      bool finished) {
    adam_ = adam;
    rng_.deserialize(rng_state);
    best_ = best;
    next_epoch_ = next_epoch;
    epochs_since_improvement_ = epochs_since_improvement;
    log_ = std::move(log);
    finished_ = finished;
}

TrainingLog train(ForecastModel& model, const WindowedDataset& train_set,
                  const WindowedDataset& val_set, const TrainConfig& cfg) {
    Trainer trainer(model, train_set, val_set, cfg);
    return trainer.run();
}

}  // namespace selfboost
