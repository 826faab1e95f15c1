#pragma once

#include <optional>
#include <string>

#include "selfboost/forecaster.hpp"
#include "selfboost/json_io.hpp"

namespace selfboost {

/// Serialize the model (and, when given, the live trainer) into the single
/// JSON checkpoint document: architecture, grouping, per-channel norm stats,
/// every parameter tensor, optimizer moments and step, RNG state, and the
/// epoch cursor. Doubles are written with shortest round-trip precision, so
/// save -> load -> continue is bit-exact.
json checkpoint_to_json(const ForecastModel& model, const Trainer* trainer = nullptr);

void save_checkpoint(const std::string& path, const ForecastModel& model,
                     const Trainer* trainer = nullptr);

ForecastModel model_from_checkpoint(const json& checkpoint);
ForecastModel load_checkpoint(const std::string& path);

/// Rebuild a trainer mid-run from a checkpoint that carries trainer state.
/// The model must be the one the checkpoint was loaded into.
Trainer trainer_from_checkpoint(const json& checkpoint, ForecastModel& model,
                                const WindowedDataset& train_set, const WindowedDataset& val_set,
                                const TrainConfig& cfg);

}  // namespace selfboost
