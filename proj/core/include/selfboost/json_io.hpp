#pragma once

#include <json.hpp>

#include "selfboost/eemd.hpp"
#include "selfboost/forecaster.hpp"
#include "selfboost/selection.hpp"
#include "selfboost/tensor.hpp"

namespace selfboost {

using nlohmann::json;

// nlohmann ADL hooks. Readers accept partial objects (absent keys keep the
// struct's defaults) so config files only state what they change; unknown
// keys raise ConfigInvalid with the offending path.

void to_json(json& j, const DecompositionConfig& c);
void from_json(const json& j, DecompositionConfig& c);

void to_json(json& j, const SimilarityReport& r);
void from_json(const json& j, SimilarityReport& r);

void to_json(json& j, const FeatureGrouping& g);
void from_json(const json& j, FeatureGrouping& g);

void to_json(json& j, const ArchitectureConfig& c);
void from_json(const json& j, ArchitectureConfig& c);

void to_json(json& j, const TrainConfig& c);
void from_json(const json& j, TrainConfig& c);

void to_json(json& j, const NormStats& s);
void from_json(const json& j, NormStats& s);

void to_json(json& j, const Tensor& t);
void from_json(const json& j, Tensor& t);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

/// Throw ConfigInvalid naming `context.key` when `j` holds keys outside
/// `allowed`.
void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& context);

}  // namespace selfboost
