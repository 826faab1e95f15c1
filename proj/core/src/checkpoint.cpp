#include "selfboost/checkpoint.hpp"

#include "selfboost/error.hpp"

namespace selfboost {

namespace {

json log_to_json(const TrainingLog& log) {
    json epochs = json::array();
    for (const auto& e : log.epochs) {
        epochs.push_back(json{{"epoch", e.epoch},
                              {"train_task_mse", e.train_task_mse},
                              {"train_joint", e.train_joint},
                              {"val_task_mse", e.val_task_mse},
                              {"val_joint", e.val_joint}});
    }
    return json{{"epochs", epochs}, {"best_epoch", log.best_epoch}, {"best_val_joint", log.best_val_joint}};
}

TrainingLog log_from_json(const json& j) {
    TrainingLog log;
    for (const auto& e : j.at("epochs")) {
        EpochLog entry;
        e.at("epoch").get_to(entry.epoch);
        e.at("train_task_mse").get_to(entry.train_task_mse);
        e.at("train_joint").get_to(entry.train_joint);
        e.at("val_task_mse").get_to(entry.val_task_mse);
        e.at("val_joint").get_to(entry.val_joint);
        log.epochs.push_back(std::move(entry));
    }
    j.at("best_epoch").get_to(log.best_epoch);
    j.at("best_val_joint").get_to(log.best_val_joint);
    return log;
}

}  // namespace

json checkpoint_to_json(const ForecastModel& model, const Trainer* trainer) {
    json parameters = json::object();
    for (const auto& [name, tensor] : model.parameters()) {
        parameters[name] = *tensor;
    }
    json j{{"format", "selfboost-checkpoint"},
           {"version", 1},
           {"architecture", model.arch()},
           {"grouping", model.grouping()},
           {"channel_stats", model.channel_stats()},
           {"parameters", parameters}};

    if (trainer != nullptr) {
        const AdamState& adam = trainer->adam();
        json optimizer{{"learning_rate", adam.learning_rate},
                       {"beta1", adam.beta1},
                       {"beta2", adam.beta2},
                       {"epsilon", adam.epsilon},
                       {"step_count", adam.step_count},
                       {"first_moment", adam.first_moment},
                       {"second_moment", adam.second_moment}};
        json best{{"epoch", trainer->best().epoch},
                  {"val_joint", trainer->best().val_joint},
                  {"params", trainer->best().params}};
        j["trainer"] = json{{"optimizer", optimizer},
                            {"rng_state", trainer->serialize_rng()},
                            {"best", best},
                            {"next_epoch", trainer->next_epoch()},
                            {"epochs_since_improvement", trainer->epochs_since_improvement()},
                            {"finished", trainer->finished()},
                            {"log", log_to_json(trainer->log())}};
    }
    return j;
}

void save_checkpoint(const std::string& path, const ForecastModel& model, const Trainer* trainer) {
    save_json_file(path, checkpoint_to_json(model, trainer));
}

ForecastModel model_from_checkpoint(const json& checkpoint) {
    if (!checkpoint.contains("format") ||
        checkpoint.at("format").get<std::string>() != "selfboost-checkpoint") {
        throw Error(ErrorCode::ConfigInvalid, "not a selfboost checkpoint document");
    }
    const auto arch = checkpoint.at("architecture").get<ArchitectureConfig>();
    const auto grouping = checkpoint.at("grouping").get<FeatureGrouping>();
    ForecastModel model = ForecastModel::build(arch, grouping, /*seed=*/0);
    model.set_channel_stats(checkpoint.at("channel_stats").get<std::vector<NormStats>>());

    const json& parameters = checkpoint.at("parameters");
    for (auto& [name, tensor] : model.parameters()) {
        if (!parameters.contains(name)) {
            throw Error(ErrorCode::ConfigInvalid, "checkpoint is missing parameter '" + name + "'");
        }
        Tensor loaded = parameters.at(name).get<Tensor>();
        if (!loaded.same_shape(*tensor)) {
            throw Error(ErrorCode::ShapeMismatch, "checkpoint parameter '" + name + "' has wrong shape");
        }
        *tensor = std::move(loaded);
    }
    return model;
}

ForecastModel load_checkpoint(const std::string& path) {
    return model_from_checkpoint(load_json_file(path));
}

Trainer trainer_from_checkpoint(const json& checkpoint, ForecastModel& model,
                                const WindowedDataset& train_set, const WindowedDataset& val_set,
                                const TrainConfig& cfg) {
    Trainer trainer(model, train_set, val_set, cfg);
    if (!checkpoint.contains("trainer")) {
        return trainer;  // fresh run
    }
    const json& t = checkpoint.at("trainer");
    const json& o = t.at("optimizer");
    AdamState adam;
    o.at("learning_rate").get_to(adam.learning_rate);
    o.at("beta1").get_to(adam.beta1);
    o.at("beta2").get_to(adam.beta2);
    o.at("epsilon").get_to(adam.epsilon);
    o.at("step_count").get_to(adam.step_count);
    o.at("first_moment").get_to(adam.first_moment);
    o.at("second_moment").get_to(adam.second_moment);

    Trainer::Snapshot best;
    t.at("best").at("epoch").get_to(best.epoch);
    t.at("best").at("val_joint").get_to(best.val_joint);
    t.at("best").at("params").get_to(best.params);

    trainer.restore(adam, t.at("rng_state").get<std::string>(), best,
                    t.at("next_epoch").get<int>(), t.at("epochs_since_improvement").get<int>(),
                    log_from_json(t.at("log")), t.at("finished").get<bool>());
    return trainer;
}

}  // namespace selfboost
