#pragma once

#include <filesystem>
#include <string>

#include "sswt/model.hpp"
#include "sswt/pipeline.hpp"

namespace sswt {

inline constexpr int kCheckpointVersion = 1;

/// A trained detector: everything `eval`/`detect` need to score a raw CSV.
///
/// On disk this is one JSON document:
///   format "sswt-checkpoint", version, windows, model, standardization
///   {mean, std}, threshold, pos_weight, best_epoch, parameter_count,
///   parameter_order (human-readable), parameters (flat θ as decimals).
struct Checkpoint {
  WindowSpec windows;
  ModelConfig model;
  StandardizationParams standardization;
  ModelParams params;
  double threshold = 0.5;
  double pos_weight = 1.0;
  std::size_t best_epoch = 0;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& text);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sswt
