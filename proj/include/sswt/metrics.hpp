#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace sswt {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct Classification {
  double accuracy = 0.0;
  double f1 = 0.0;
  Confusion confusion;
};

/// F1 = 2PR/(P+R) = 2TP/(2TP+FP+FN), defined as 0 when TP = 0.
Classification accuracy_f1(std::span<const int> predictions, std::span<const int> labels);

/// Mann-Whitney AUC with average ranks for tied scores. Throws MetricError
/// when only one class is present.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

struct MetricsReport {
  double accuracy = 0.0;
  double f1 = 0.0;
  /// Empty when the evaluated set holds a single class.
  std::optional<double> auc_roc;
  Confusion confusion;
  double threshold = 0.5;
  std::size_t samples = 0;
};

/// Thresholds `scores` at `tau` (score > tau is abnormal) and computes all metrics.
MetricsReport evaluate_scores(std::span<const double> scores, std::span<const int> labels, double tau);

}  // namespace sswt
