#pragma once

// Staged transformer anomaly scorer.
//
// Every stage k sees an encoded W_k×d window Z. Each head computes
//   softmax(Q Kᵀ/√d_k · diag(w)) V,   Q = Z W_Q, K = Z W_K, V = Z W_V,
// where w holds per-time-step entropies of Z (or is omitted for plain
// attention). Heads are concatenated and projected back to d by W_O, then
// passed through a ReLU feed-forward block (both optionally wrapped in a
// residual connection + layer norm) and mean-pooled to a d-vector. The K
// stage vectors are concatenated and scored by σ(W_c F + b_c).
//
// Flat parameter order (θ): for each stage, for each head W_Q, W_K, W_V;
// then W_O, W_1, b_1, W_2, b_2; finally W_c, b_c. Matrices are row-major.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sswt/numerics.hpp"
#include "sswt/pipeline.hpp"

namespace sswt {

struct ModelConfig {
  std::size_t d = 10;
  std::size_t d_k = 4;
  std::size_t heads = 2;
  std::size_t stages = 3;
  std::size_t ffn_hidden = 16;
  bool use_weighted_attention = true;
  bool use_residual_norm = true;
  double lambda = 1e-4;
  double entropy_epsilon = 1e-6;

  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

inline constexpr double kLayerNormEps = 1e-5;
inline constexpr double kScoreClamp = 1e-12;

struct HeadParams {
  Matrix w_q;  // d×d_k
  Matrix w_k;  // d×d_k
  Matrix w_v;  // d×d_k
  friend bool operator==(const HeadParams&, const HeadParams&) = default;
};

struct StageParams {
  std::vector<HeadParams> heads;
  Matrix w_o;  // (h·d_k)×d
  Matrix w1;   // d×ffn_hidden
  Matrix b1;   // 1×ffn_hidden
  Matrix w2;   // ffn_hidden×d
  Matrix b2;   // 1×d
  friend bool operator==(const StageParams&, const StageParams&) = default;
};

struct ModelParams {
  std::vector<StageParams> stages;
  Matrix w_c;  // 1×(K·d)
  Matrix b_c;  // 1×1, the classifier bias

  /// All-zero parameters with the shapes implied by `cfg`.
  static ModelParams zeros(const ModelConfig& cfg);

  std::size_t parameter_count() const;
  std::vector<double> flatten() const;
  /// Overwrites every entry from θ; θ must have parameter_count() entries.
  void assign(std::span<const double> theta);

  template <typename Fn>
  void for_each_tensor(Fn&& fn) {
    for (auto& s : stages) {
      for (auto& h : s.heads) {
        fn(h.w_q);
        fn(h.w_k);
        fn(h.w_v);
      }
      fn(s.w_o);
      fn(s.w1);
      fn(s.b1);
      fn(s.w2);
      fn(s.b2);
    }
    fn(w_c);
    fn(b_c);
  }

  template <typename Fn>
  void for_each_tensor(Fn&& fn) const {
    const_cast<ModelParams*>(this)->for_each_tensor(
        [&](Matrix& m) { fn(static_cast<const Matrix&>(m)); });
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Glorot-uniform weights, zero biases, deterministic in `seed`.
ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------

/// One entropy per time step (row) of the stage input.
struct EntropyWeights {
  std::vector<double> values;
};

/// p_{t,j} = (|Z_tj| + ε) / Σ_j(|Z_tj| + ε);  w_t = -Σ_j p_{t,j} ln p_{t,j}.
EntropyWeights entropy_weights(const Matrix& z, double epsilon);

/// Row-stochastic attention matrix softmax(Q Kᵀ/√d_k · diag(w)).
Matrix attention_probabilities(const Matrix& z, const HeadParams& head,
                               const EntropyWeights* weights);
/// W×d_k head context.
Matrix attention(const Matrix& z, const HeadParams& head, const EntropyWeights* weights);

/// Pooled 1×d stage feature.
Matrix stage_encode(const Matrix& z, const StageParams& stage, const ModelConfig& cfg);

double forward_logit(std::span<const Matrix> stages, const ModelParams& params,
                     const ModelConfig& cfg);
/// Anomaly score σ(W_c F + b_c) ∈ (0, 1).
double forward(std::span<const Matrix> stages, const ModelParams& params, const ModelConfig& cfg);

/// Adds dlogit · ∂logit/∂θ into `grad` and returns the score.
double accumulate_gradient(std::span<const Matrix> stages, const ModelParams& params,
                           const ModelConfig& cfg, double dlogit_scale, ModelParams& grad);

// ---------------------------------------------------------------------------

struct LossResult {
  double value = 0.0;
  std::vector<double> d_scores;  // ∂L/∂s_i (0 where the clamp is active)
  std::vector<double> d_theta;   // ∂L/∂θ from the regulariser
};

/// L = -(1/N) Σ [pos_weight·y ln s + (1-y) ln(1-s)] + λ‖θ‖², scores clamped to
/// [1e-12, 1 - 1e-12].
LossResult loss(std::span<const double> scores, std::span<const int> labels, double lambda,
                std::span<const double> theta, double pos_weight = 1.0);

struct ObjectiveResult {
  double value = 0.0;
  std::vector<double> gradient;  // empty unless requested
  std::vector<double> scores;
};

/// Loss (and optionally its θ-gradient) over samples[indices], in index order.
ObjectiveResult objective(std::span<const EncodedSample> samples,
                          std::span<const std::size_t> indices, const ModelParams& params,
                          const ModelConfig& cfg, double pos_weight, bool with_gradient);

std::vector<double> score_all(std::span<const EncodedSample> samples, const ModelParams& params,
                              const ModelConfig& cfg);

}  // namespace sswt
