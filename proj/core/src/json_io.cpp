#include "selfboost/json_io.hpp"

#include <fstream>

#include "selfboost/error.hpp"

namespace selfboost {

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& context) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const auto& a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw Error(ErrorCode::ConfigInvalid, "unknown key '" + context + "." + key + "'");
        }
    }
}

void to_json(json& j, const DecompositionConfig& c) {
    j = json{{"ensemble_size", c.ensemble_size},
             {"noise_amplitude_ratio", c.noise_amplitude_ratio},
             {"sd_threshold", c.sd_threshold},
             {"max_sift_iterations", c.max_sift_iterations},
             {"max_imfs", c.max_imfs},
             {"rng_seed", c.rng_seed},
             {"noise_distribution", c.noise == NoiseDistribution::Gaussian ? "gaussian" : "uniform"}};
}

void from_json(const json& j, DecompositionConfig& c) {
    reject_unknown_keys(j,
                        {"ensemble_size", "noise_amplitude_ratio", "sd_threshold",
                         "max_sift_iterations", "max_imfs", "rng_seed", "noise_distribution"},
                        "decomposition");
    read_if(j, "ensemble_size", c.ensemble_size);
    read_if(j, "noise_amplitude_ratio", c.noise_amplitude_ratio);
    read_if(j, "sd_threshold", c.sd_threshold);
    read_if(j, "max_sift_iterations", c.max_sift_iterations);
    read_if(j, "max_imfs", c.max_imfs);
    read_if(j, "rng_seed", c.rng_seed);
    if (j.contains("noise_distribution")) {
        const std::string name = j.at("noise_distribution").get<std::string>();
        if (name == "gaussian") {
            c.noise = NoiseDistribution::Gaussian;
        } else if (name == "uniform") {
            c.noise = NoiseDistribution::Uniform;
        } else {
            throw Error(ErrorCode::ConfigInvalid,
                        "decomposition.noise_distribution must be 'gaussian' or 'uniform'");
        }
    }
}

void to_json(json& j, const SimilarityReport& r) {
    j = json{{"correlations", r.correlations}, {"distances", r.distances}};
}

void from_json(const json& j, SimilarityReport& r) {
    j.at("correlations").get_to(r.correlations);
    j.at("distances").get_to(r.distances);
}

void to_json(json& j, const FeatureGrouping& g) {
    j = json{{"task_indices", g.task_indices},
             {"view_indices", g.view_indices},
             {"dropped_indices", g.dropped_indices},
             {"num_clusters", g.num_clusters}};
}

void from_json(const json& j, FeatureGrouping& g) {
    j.at("task_indices").get_to(g.task_indices);
    j.at("view_indices").get_to(g.view_indices);
    read_if(j, "dropped_indices", g.dropped_indices);
    read_if(j, "num_clusters", g.num_clusters);
}

void to_json(json& j, const ArchitectureConfig& c) {
    json conv = json::array();
    for (const auto& [filters, width] : c.conv_layers) conv.push_back({filters, width});
    j = json{{"conv_layers", conv},
             {"pool_width", c.pool_width},
             {"gru_hidden", c.gru_hidden},
             {"shared_dense", c.shared_dense},
             {"branch_dense", c.branch_dense},
             {"lag", c.lag},
             {"horizon", c.horizon},
             {"include_original_as_channel", c.include_original_as_channel},
             {"view_projection", c.view_projection},
             {"variant", variant_name(c.variant)}};
}

void from_json(const json& j, ArchitectureConfig& c) {
    reject_unknown_keys(j,
                        {"conv_layers", "pool_width", "gru_hidden", "shared_dense", "branch_dense",
                         "lag", "horizon", "include_original_as_channel", "view_projection",
                         "variant"},
                        "architecture");
    if (j.contains("conv_layers")) {
        c.conv_layers.clear();
        for (const auto& pair : j.at("conv_layers")) {
            if (!pair.is_array() || pair.size() != 2) {
                throw Error(ErrorCode::ConfigInvalid,
                            "architecture.conv_layers entries must be [filters, width]");
            }
            c.conv_layers.emplace_back(pair[0].get<int>(), pair[1].get<int>());
        }
    }
    read_if(j, "pool_width", c.pool_width);
    read_if(j, "gru_hidden", c.gru_hidden);
    read_if(j, "shared_dense", c.shared_dense);
    read_if(j, "branch_dense", c.branch_dense);
    read_if(j, "lag", c.lag);
    read_if(j, "horizon", c.horizon);
    read_if(j, "include_original_as_channel", c.include_original_as_channel);
    read_if(j, "view_projection", c.view_projection);
    if (j.contains("variant")) c.variant = variant_from_name(j.at("variant").get<std::string>());
}

void to_json(json& j, const TrainConfig& c) {
    j = json{{"epochs", c.epochs},
             {"batch_size", c.batch_size},
             {"main_task_weight", c.main_task_weight},
             {"aux_task_weight", c.aux_task_weight},
             {"early_stop_patience", c.early_stop_patience},
             {"shuffle", c.shuffle},
             {"clip_norm", c.clip_norm},
             {"seed", c.seed},
             {"adam",
              {{"learning_rate", c.adam.learning_rate},
               {"beta1", c.adam.beta1},
               {"beta2", c.adam.beta2},
               {"epsilon", c.adam.epsilon}}}};
}

void from_json(const json& j, TrainConfig& c) {
    reject_unknown_keys(j,
                        {"epochs", "batch_size", "main_task_weight", "aux_task_weight",
                         "early_stop_patience", "shuffle", "clip_norm", "seed", "adam"},
                        "training");
    read_if(j, "epochs", c.epochs);
    read_if(j, "batch_size", c.batch_size);
    read_if(j, "main_task_weight", c.main_task_weight);
    read_if(j, "aux_task_weight", c.aux_task_weight);
    read_if(j, "early_stop_patience", c.early_stop_patience);
    read_if(j, "shuffle", c.shuffle);
    read_if(j, "clip_norm", c.clip_norm);
    read_if(j, "seed", c.seed);
    if (j.contains("adam")) {
        const json& a = j.at("adam");
        reject_unknown_keys(a, {"learning_rate", "beta1", "beta2", "epsilon"}, "training.adam");
        read_if(a, "learning_rate", c.adam.learning_rate);
        read_if(a, "beta1", c.adam.beta1);
        read_if(a, "beta2", c.adam.beta2);
        read_if(a, "epsilon", c.adam.epsilon);
    }
}

void to_json(json& j, const NormStats& s) {
    j = json{{"mean", s.mean}, {"std", s.std}};
}

void from_json(const json& j, NormStats& s) {
    j.at("mean").get_to(s.mean);
    j.at("std").get_to(s.std);
}

void to_json(json& j, const Tensor& t) {
    j = json{{"shape", t.shape()}, {"data", t.buffer()}};
}

void from_json(const json& j, Tensor& t) {
    std::vector<int> shape;
    std::vector<double> data;
    j.at("shape").get_to(shape);
    j.at("data").get_to(data);
    t = Tensor(std::move(shape), std::move(data));
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigInvalid, "'" + path + "': " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    }
    out << j.dump(2) << '\n';
}

}  // namespace selfboost
