#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "sswt/model.hpp"
#include "sswt/pipeline.hpp"

namespace sswt {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update of `theta` in place. Throws TrainingError
/// (naming the offending coordinate) on a non-finite gradient.
void adam_step(std::span<double> theta, std::span<const double> grad, AdamState& state, double lr);

struct TrainConfig {
  double lr0 = 1e-3;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 50;
  double plateau_factor = 0.5;
  std::size_t plateau_patience = 3;
  std::size_t early_stop_patience = 8;
  std::uint64_t seed = 42;
  /// Positive-class weight in the cross-entropy; defaults to #neg/#pos on train.
  std::optional<double> pos_weight;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
};

struct ThresholdResult {
  double tau = 0.5;
  double f1 = 0.0;
  /// Validation contained a single class; tau fell back to 0.5.
  bool single_class = false;
};

/// Max-F1 threshold over midpoints of consecutive distinct scores plus 0.5;
/// ties go to the larger threshold. Predictions are `score > tau`.
ThresholdResult select_threshold(std::span<const double> scores, std::span<const int> labels);

struct FitResult {
  ModelParams params;
  std::vector<EpochRecord> history;
  ThresholdResult threshold;
  double pos_weight = 1.0;
  /// 1-based epoch of the returned parameters, 0 when no epoch ran.
  std::size_t best_epoch = 0;
};

FitResult fit(std::span<const EncodedSample> train, std::span<const EncodedSample> validation,
              const ModelConfig& model_cfg, const TrainConfig& train_cfg);

/// Writes `epoch,train_loss,val_loss,lr`.
void write_history_csv(std::span<const EpochRecord> history, const std::filesystem::path& path);

}  // namespace sswt
