#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "sswt/dataio.hpp"
#include "sswt/model.hpp"
#include "sswt/pipeline.hpp"
#include "sswt/training.hpp"

namespace sswt {

/// Everything a CLI run is parameterised by. `model.d` and `model.stages`
/// are filled in from the data and the window spec, not from the file.
struct ExperimentConfig {
  WindowSpec windows;
  ModelConfig model;
  TrainConfig train;
  SynthConfig synth;
};

/// Sections `windows`, `model`, `train`, `synth`; every key optional.
/// Unknown sections or keys are rejected so typos do not silently fall back to defaults.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

std::string to_string(LabelRule rule);
LabelRule label_rule_from_string(const std::string& name);

nlohmann::ordered_json to_json(const WindowSpec& spec);
WindowSpec window_spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace sswt
