#include "sswt/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "sswt/error.hpp"

namespace sswt {

void adam_step(std::span<double> theta, std::span<const double> grad, AdamState& state, double lr) {
  if (grad.size() != theta.size() || state.m.size() != theta.size() ||
      state.v.size() != theta.size()) {
    throw ShapeError("adam_step: theta has " + std::to_string(theta.size()) + " entries, gradient " +
                     std::to_string(grad.size()) + ", moments " + std::to_string(state.m.size()));
  }
  if (!(lr > 0.0)) throw TrainingError("adam_step: learning rate must be positive");
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw TrainingError("non-finite gradient at parameter " + std::to_string(i) + " (step " +
                          std::to_string(state.t + 1) + ")");
    }
  }
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = grad[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    theta[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

void TrainConfig::validate() const {
  if (!(lr0 > 0.0)) throw ConfigError("lr0 must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(plateau_factor > 0.0 && plateau_factor < 1.0)) {
    throw ConfigError("plateau_factor must lie in (0, 1)");
  }
  if (plateau_patience == 0 || early_stop_patience == 0) {
    throw ConfigError("patience values must be positive");
  }
  if (pos_weight && !(*pos_weight > 0.0)) throw ConfigError("pos_weight must be positive");
}

namespace {

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

}  // namespace

ThresholdResult select_threshold(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw SizeError("select_threshold: " + std::to_string(scores.size()) + " scores for " +
                    std::to_string(labels.size()) + " labels");
  }
  const std::size_t positives =
      static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int y) { return y != 0; }));

  auto f1_at = [&](double tau) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const bool pred = scores[i] > tau;
      if (pred && labels[i] != 0) ++tp;
      else if (pred) ++fp;
      else if (labels[i] != 0) ++fn;
    }
    return f1_from_counts(tp, fp, fn);
  };

  if (positives == 0 || positives == scores.size()) {
    return {0.5, f1_at(0.5), true};
  }

  // Sort ascending, then sweep distinct score levels from the top: for the
  // midpoint just below level g, every sample at or above g is predicted positive.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  ThresholdResult best{0.5, f1_at(0.5), false};
  auto consider = [&](double tau, double f1) {
    if (f1 > best.f1 || (f1 == best.f1 && tau > best.tau)) best = {tau, f1, false};
  };

  std::size_t tp = 0, fp = 0;
  std::size_t end = order.size();
  while (end > 0) {
    const double level = scores[order[end - 1]];
    std::size_t begin = end;
    while (begin > 0 && scores[order[begin - 1]] == level) {
      --begin;
      if (labels[order[begin]] != 0) ++tp;
      else ++fp;
    }
    if (begin == 0) break;
    const double below = scores[order[begin - 1]];
    const double tau = (below + level) / 2.0;
    consider(tau, f1_from_counts(tp, fp, positives - tp));
    end = begin;
  }
  return best;
}

namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

FitResult fit(std::span<const EncodedSample> train, std::span<const EncodedSample> validation,
              const ModelConfig& model_cfg, const TrainConfig& train_cfg) {
  model_cfg.validate();
  train_cfg.validate();
  if (train.empty() || validation.empty()) {
    throw SizeError("fit needs non-empty train and validation windows (got " +
                    std::to_string(train.size()) + " and " + std::to_string(validation.size()) + ")");
  }
  const auto positives = static_cast<std::size_t>(
      std::count_if(train.begin(), train.end(), [](const EncodedSample& s) { return s.label != 0; }));
  if (positives == 0) {
    throw TrainingError("training windows contain no positive labels; pos_weight undefined");
  }

  FitResult result;
  result.pos_weight = train_cfg.pos_weight.value_or(static_cast<double>(train.size() - positives) /
                                                    static_cast<double>(positives));
  ModelParams params = init_params(model_cfg, train_cfg.seed);
  result.params = params;

  std::vector<double> theta = params.flatten();
  AdamState adam(theta.size());
  std::mt19937_64 shuffle_rng(train_cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::size_t> order = all_indices(train.size());
  const std::vector<std::size_t> val_indices = all_indices(validation.size());

  double lr = train_cfg.lr0;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  std::size_t plateau = 0;

  for (std::size_t epoch = 1; epoch <= train_cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double train_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += train_cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + train_cfg.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, stop - start);
      const auto obj = objective(train, batch, params, model_cfg, result.pos_weight, true);
      train_total += obj.value * static_cast<double>(batch.size());
      adam_step(theta, obj.gradient, adam, lr);
      params.assign(theta);
    }
    const double train_loss = train_total / static_cast<double>(order.size());
    const double val_loss =
        objective(validation, val_indices, params, model_cfg, result.pos_weight, false).value;
    result.history.push_back({epoch, train_loss, val_loss, lr});

    if (val_loss < best_val) {
      best_val = val_loss;
      result.params = params;
      result.best_epoch = epoch;
      stale = 0;
      plateau = 0;
    } else {
      ++stale;
      ++plateau;
      if (plateau >= train_cfg.plateau_patience) {
        lr *= train_cfg.plateau_factor;
        plateau = 0;
      }
      if (stale >= train_cfg.early_stop_patience) break;
    }
  }

  const auto val_scores = score_all(validation, result.params, model_cfg);
  std::vector<int> val_labels;
  val_labels.reserve(validation.size());
  for (const auto& s : validation) val_labels.push_back(s.label);
  result.threshold = select_threshold(val_scores, val_labels);
  return result;
}

void write_history_csv(std::span<const EpochRecord> history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "epoch,train_loss,val_loss,lr\n";
  out.precision(17);
  for (const auto& r : history) {
    out << r.epoch << ',' << r.train_loss << ',' << r.val_loss << ',' << r.lr << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace sswt
