#include "sswt/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sswt/config.hpp"
#include "sswt/error.hpp"

namespace sswt {

namespace {

constexpr const char* kFormat = "sswt-checkpoint";
constexpr const char* kParameterOrder =
    "for each stage: for each head W_Q, W_K, W_V; then W_O, W_1, b_1, W_2, b_2; "
    "finally W_c, b_c; every matrix row-major";

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  nlohmann::ordered_json doc;
  doc["format"] = kFormat;
  doc["version"] = kCheckpointVersion;
  doc["windows"] = to_json(ckpt.windows);
  doc["model"] = to_json(ckpt.model);
  doc["standardization"] = {{"mean", ckpt.standardization.mean}, {"std", ckpt.standardization.std}};
  doc["threshold"] = ckpt.threshold;
  doc["pos_weight"] = ckpt.pos_weight;
  doc["best_epoch"] = ckpt.best_epoch;
  doc["parameter_count"] = ckpt.params.parameter_count();
  doc["parameter_order"] = kParameterOrder;
  doc["parameters"] = ckpt.params.flatten();
  return doc.dump(1) + "\n";
}

Checkpoint deserialize_checkpoint(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormat) throw SchemaError("not an sswt checkpoint");
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw SchemaError("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint ckpt;
    ckpt.windows = window_spec_from_json(doc.at("windows"));
    ckpt.model = model_config_from_json(doc.at("model"));
    ckpt.standardization.mean = doc.at("standardization").at("mean").get<std::vector<double>>();
    ckpt.standardization.std = doc.at("standardization").at("std").get<std::vector<double>>();
    ckpt.threshold = doc.at("threshold").get<double>();
    ckpt.pos_weight = doc.at("pos_weight").get<double>();
    ckpt.best_epoch = doc.at("best_epoch").get<std::size_t>();
    if (ckpt.model.stages != ckpt.windows.lengths.size()) {
      throw SchemaError("checkpoint model stages disagree with its window lengths");
    }
    if (ckpt.standardization.mean.size() != ckpt.model.d ||
        ckpt.standardization.std.size() != ckpt.model.d) {
      throw SchemaError("checkpoint standardization dimension disagrees with model d");
    }
    const auto theta = doc.at("parameters").get<std::vector<double>>();
    ckpt.params = ModelParams::zeros(ckpt.model);
    if (doc.at("parameter_count").get<std::size_t>() != theta.size()) {
      throw SchemaError("checkpoint parameter_count does not match payload length");
    }
    ckpt.params.assign(theta);
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ShapeError& e) {
    throw SchemaError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize_checkpoint(ckpt);
  if (!out) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace sswt
