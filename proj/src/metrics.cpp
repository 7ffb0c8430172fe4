#include "sswt/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "sswt/error.hpp"

namespace sswt {

Classification accuracy_f1(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw SizeError("accuracy_f1: " + std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw SizeError("accuracy_f1: no samples");
  Classification c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] != 0;
    const bool y = labels[i] != 0;
    if (p && y) ++c.confusion.tp;
    else if (p) ++c.confusion.fp;
    else if (y) ++c.confusion.fn;
    else ++c.confusion.tn;
  }
  const auto& m = c.confusion;
  c.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
  // 2PR/(P+R) rewritten over counts; exact for integer inputs
  const std::size_t denom = 2 * m.tp + m.fp + m.fn;
  c.f1 = m.tp == 0 ? 0.0 : static_cast<double>(2 * m.tp) / static_cast<double>(denom);
  return c;
}

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw SizeError("auc_roc: " + std::to_string(scores.size()) + " scores for " +
                    std::to_string(labels.size()) + " labels");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average 1-based rank over each run of tied scores.
  double positive_rank_sum = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0) {
        positive_rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw MetricError("AUC-ROC undefined: need both classes (positives " + std::to_string(n_pos) +
                      ", negatives " + std::to_string(n_neg) + ")");
  }
  const double np = static_cast<double>(n_pos);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

MetricsReport evaluate_scores(std::span<const double> scores, std::span<const int> labels, double tau) {
  std::vector<int> predictions(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) predictions[i] = scores[i] > tau ? 1 : 0;
  const auto cls = accuracy_f1(predictions, labels);
  MetricsReport r;
  r.accuracy = cls.accuracy;
  r.f1 = cls.f1;
  r.confusion = cls.confusion;
  r.threshold = tau;
  r.samples = scores.size();
  try {
    r.auc_roc = auc_roc(scores, labels);
  } catch (const MetricError&) {
    r.auc_roc.reset();
  }
  return r;
}

}  // namespace sswt
