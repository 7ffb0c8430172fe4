#include "sswt/config.hpp"

#include <fstream>
#include <set>

#include "sswt/error.hpp"

namespace sswt {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

}  // namespace

std::string to_string(LabelRule rule) {
  switch (rule) {
    case LabelRule::shortest_span: return "shortest_span";
    case LabelRule::longest_span: return "longest_span";
    case LabelRule::anchor_tick: return "anchor_tick";
  }
  return "unknown";
}

LabelRule label_rule_from_string(const std::string& name) {
  if (name == "shortest_span") return LabelRule::shortest_span;
  if (name == "longest_span") return LabelRule::longest_span;
  if (name == "anchor_tick") return LabelRule::anchor_tick;
  throw ConfigError("unknown label_rule '" + name + "'");
}

nlohmann::ordered_json to_json(const WindowSpec& spec) {
  return {{"lengths", spec.lengths}, {"stride", spec.stride}, {"label_rule", to_string(spec.label_rule)}};
}

WindowSpec window_spec_from_json(const json& j) {
  reject_unknown(j, "windows", {"lengths", "stride", "label_rule"});
  WindowSpec spec;
  read(j, "lengths", spec.lengths, "windows");
  read(j, "stride", spec.stride, "windows");
  std::string rule = to_string(spec.label_rule);
  read(j, "label_rule", rule, "windows");
  spec.label_rule = label_rule_from_string(rule);
  spec.validate();
  return spec;
}

nlohmann::ordered_json to_json(const ModelConfig& cfg) {
  return {{"d", cfg.d},
          {"d_k", cfg.d_k},
          {"heads", cfg.heads},
          {"stages", cfg.stages},
          {"ffn_hidden", cfg.ffn_hidden},
          {"weighted_attention", cfg.use_weighted_attention},
          {"residual_norm", cfg.use_residual_norm},
          {"lambda", cfg.lambda},
          {"entropy_epsilon", cfg.entropy_epsilon}};
}

ModelConfig model_config_from_json(const json& j) {
  reject_unknown(j, "model",
                 {"d", "d_k", "heads", "stages", "ffn_hidden", "weighted_attention", "residual_norm",
                  "lambda", "entropy_epsilon"});
  ModelConfig cfg;
  read(j, "d", cfg.d, "model");
  read(j, "d_k", cfg.d_k, "model");
  read(j, "heads", cfg.heads, "model");
  read(j, "stages", cfg.stages, "model");
  read(j, "ffn_hidden", cfg.ffn_hidden, "model");
  read(j, "weighted_attention", cfg.use_weighted_attention, "model");
  read(j, "residual_norm", cfg.use_residual_norm, "model");
  read(j, "lambda", cfg.lambda, "model");
  read(j, "entropy_epsilon", cfg.entropy_epsilon, "model");
  cfg.validate();
  return cfg;
}

namespace {

TrainConfig train_config_from_json(const json& j) {
  reject_unknown(j, "train",
                 {"lr", "batch_size", "max_epochs", "plateau_factor", "plateau_patience",
                  "early_stop_patience", "seed", "pos_weight"});
  TrainConfig cfg;
  read(j, "lr", cfg.lr0, "train");
  read(j, "batch_size", cfg.batch_size, "train");
  read(j, "max_epochs", cfg.max_epochs, "train");
  read(j, "plateau_factor", cfg.plateau_factor, "train");
  read(j, "plateau_patience", cfg.plateau_patience, "train");
  read(j, "early_stop_patience", cfg.early_stop_patience, "train");
  read(j, "seed", cfg.seed, "train");
  if (j.contains("pos_weight") && !j.at("pos_weight").is_null()) {
    double w = 0.0;
    read(j, "pos_weight", w, "train");
    cfg.pos_weight = w;
  }
  cfg.validate();
  return cfg;
}

SynthConfig synth_config_from_json(const json& j) {
  reject_unknown(j, "synth",
                 {"length", "dimension", "base_mid_price", "anomaly_rate", "archetype_mix", "seed"});
  SynthConfig cfg;
  read(j, "length", cfg.length, "synth");
  read(j, "dimension", cfg.dimension, "synth");
  read(j, "base_mid_price", cfg.base_mid_price, "synth");
  read(j, "anomaly_rate", cfg.anomaly_rate, "synth");
  read(j, "seed", cfg.seed, "synth");
  if (j.contains("archetype_mix")) {
    const auto& mix = j.at("archetype_mix");
    std::set<std::string> names;
    for (Archetype a : kArchetypes) names.insert(to_string(a));
    reject_unknown(mix, "synth.archetype_mix", names);
    // Listing any archetype makes unlisted ones zero.
    cfg.archetype_mix = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < kArchetypes.size(); ++i) {
      read(mix, to_string(kArchetypes[i]).c_str(), cfg.archetype_mix[i], "synth.archetype_mix");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  reject_unknown(doc, "config", {"windows", "model", "train", "synth"});
  ExperimentConfig cfg;
  if (doc.contains("windows")) cfg.windows = window_spec_from_json(doc.at("windows"));
  if (doc.contains("model")) cfg.model = model_config_from_json(doc.at("model"));
  if (doc.contains("train")) cfg.train = train_config_from_json(doc.at("train"));
  if (doc.contains("synth")) cfg.synth = synth_config_from_json(doc.at("synth"));
  cfg.model.stages = cfg.windows.lengths.size();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

nlohmann::ordered_json to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json mix;
  for (std::size_t i = 0; i < kArchetypes.size(); ++i) {
    mix[to_string(kArchetypes[i])] = cfg.synth.archetype_mix[i];
  }
  nlohmann::ordered_json train = {{"lr", cfg.train.lr0},
                                  {"batch_size", cfg.train.batch_size},
                                  {"max_epochs", cfg.train.max_epochs},
                                  {"plateau_factor", cfg.train.plateau_factor},
                                  {"plateau_patience", cfg.train.plateau_patience},
                                  {"early_stop_patience", cfg.train.early_stop_patience},
                                  {"seed", cfg.train.seed}};
  train["pos_weight"] = cfg.train.pos_weight ? nlohmann::ordered_json(*cfg.train.pos_weight)
                                             : nlohmann::ordered_json(nullptr);
  auto model = to_json(cfg.model);
  model.erase("d");
  model.erase("stages");
  return {{"windows", to_json(cfg.windows)},
          {"model", model},
          {"train", train},
          {"synth",
           {{"length", cfg.synth.length},
            {"dimension", cfg.synth.dimension},
            {"base_mid_price", cfg.synth.base_mid_price},
            {"anomaly_rate", cfg.synth.anomaly_rate},
            {"archetype_mix", mix},
            {"seed", cfg.synth.seed}}}};
}

}  // namespace sswt
