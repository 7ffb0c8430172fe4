#include "sswt/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sswt/error.hpp"

namespace sswt {

void ModelConfig::validate() const {
  if (d == 0 || d_k == 0 || heads == 0 || stages == 0 || ffn_hidden == 0) {
    throw ConfigError("model dimensions must all be at least 1");
  }
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(entropy_epsilon > 0.0)) throw ConfigError("entropy epsilon must be positive");
}

ModelParams ModelParams::zeros(const ModelConfig& cfg) {
  cfg.validate();
  ModelParams p;
  p.stages.resize(cfg.stages);
  for (auto& s : p.stages) {
    s.heads.resize(cfg.heads);
    for (auto& h : s.heads) {
      h.w_q = Matrix(cfg.d, cfg.d_k);
      h.w_k = Matrix(cfg.d, cfg.d_k);
      h.w_v = Matrix(cfg.d, cfg.d_k);
    }
    s.w_o = Matrix(cfg.heads * cfg.d_k, cfg.d);
    s.w1 = Matrix(cfg.d, cfg.ffn_hidden);
    s.b1 = Matrix(1, cfg.ffn_hidden);
    s.w2 = Matrix(cfg.ffn_hidden, cfg.d);
    s.b2 = Matrix(1, cfg.d);
  }
  p.w_c = Matrix(1, cfg.stages * cfg.d);
  p.b_c = Matrix(1, 1);
  return p;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for_each_tensor([&](const Matrix& m) { n += m.size(); });
  return n;
}

std::vector<double> ModelParams::flatten() const {
  std::vector<double> theta;
  theta.reserve(parameter_count());
  for_each_tensor([&](const Matrix& m) { theta.insert(theta.end(), m.values().begin(), m.values().end()); });
  return theta;
}

void ModelParams::assign(std::span<const double> theta) {
  if (theta.size() != parameter_count()) {
    throw ShapeError("parameter vector has " + std::to_string(theta.size()) + " entries, model needs " +
                     std::to_string(parameter_count()));
  }
  std::size_t offset = 0;
  for_each_tensor([&](Matrix& m) {
    auto dst = m.values();
    std::copy_n(theta.begin() + static_cast<std::ptrdiff_t>(offset), dst.size(), dst.begin());
    offset += dst.size();
  });
}

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
  ModelParams p = ModelParams::zeros(cfg);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto glorot = [&](Matrix& m) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (double& v : m.values()) v = limit * unit(rng);
  };
  for (auto& s : p.stages) {
    for (auto& h : s.heads) {
      glorot(h.w_q);
      glorot(h.w_k);
      glorot(h.w_v);
    }
    glorot(s.w_o);
    glorot(s.w1);
    glorot(s.w2);
  }
  glorot(p.w_c);
  return p;
}

// ---------------------------------------------------------------------------

EntropyWeights entropy_weights(const Matrix& z, double epsilon) {
  EntropyWeights w{std::vector<double>(z.rows(), 0.0)};
  for (std::size_t t = 0; t < z.rows(); ++t) {
    auto row = z.row(t);
    double total = 0.0;
    for (double v : row) total += std::abs(v) + epsilon;
    double h = 0.0;
    for (double v : row) {
      const double p = (std::abs(v) + epsilon) / total;
      h -= p * std::log(p);
    }
    w.values[t] = std::max(h, 0.0);
  }
  return w;
}

namespace {

void add_into(Matrix& dst, const Matrix& src) {
  auto out = dst.values();
  auto in = src.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += in[i];
}

void require_stage_input(const Matrix& z, const ModelConfig& cfg) {
  if (z.cols() != cfg.d) {
    throw ShapeError("stage input is " + z.shape() + ", model expects " + std::to_string(cfg.d) +
                     " columns");
  }
}

struct HeadCache {
  Matrix q, k, v;
  Matrix probs;
  Matrix context;
};

struct StageCache {
  std::optional<EntropyWeights> weights;
  std::vector<HeadCache> heads;
  Matrix concat;
  Matrix projected;  // H W_O
  Matrix pre1;       // Z + H W_O (residual mode)
  Matrix r1;
  Matrix u;          // r1 W1 + b1
  Matrix hidden;     // relu(u)
  Matrix ffn;        // hidden W2 + b2
  Matrix pre2;       // r1 + ffn (residual mode)
  Matrix r2;
  Matrix pooled;     // 1×d
};

HeadCache head_forward(const Matrix& z, const HeadParams& head, const EntropyWeights* weights) {
  HeadCache c;
  c.q = matmul(z, head.w_q);
  c.k = matmul(z, head.w_k);
  c.v = matmul(z, head.w_v);
  Matrix scores = scale(matmul_nt(c.q, c.k), 1.0 / std::sqrt(static_cast<double>(head.w_q.cols())));
  if (weights != nullptr) scores = scale_columns(scores, weights->values);
  c.probs = softmax_rows(scores);
  c.context = matmul(c.probs, c.v);
  return c;
}

StageCache stage_forward(const Matrix& z, const StageParams& stage, const ModelConfig& cfg) {
  require_stage_input(z, cfg);
  StageCache c;
  if (cfg.use_weighted_attention) c.weights = entropy_weights(z, cfg.entropy_epsilon);
  const EntropyWeights* w = c.weights ? &*c.weights : nullptr;
  std::vector<Matrix> contexts;
  contexts.reserve(stage.heads.size());
  for (const auto& head : stage.heads) {
    c.heads.push_back(head_forward(z, head, w));
    contexts.push_back(c.heads.back().context);
  }
  c.concat = hconcat(contexts);
  c.projected = matmul(c.concat, stage.w_o);
  if (cfg.use_residual_norm) {
    c.pre1 = add(z, c.projected);
    c.r1 = layer_norm_rows(c.pre1, kLayerNormEps);
  } else {
    c.r1 = c.projected;
  }
  c.u = add_row_broadcast(matmul(c.r1, stage.w1), stage.b1);
  c.hidden = elementwise(Elementwise::relu, c.u);
  c.ffn = add_row_broadcast(matmul(c.hidden, stage.w2), stage.b2);
  if (cfg.use_residual_norm) {
    c.pre2 = add(c.r1, c.ffn);
    c.r2 = layer_norm_rows(c.pre2, kLayerNormEps);
  } else {
    c.r2 = c.ffn;
  }
  c.pooled = mean_rows(c.r2);
  return c;
}

void stage_backward(const Matrix& z, const StageParams& stage, const ModelConfig& cfg,
                    const StageCache& c, const Matrix& d_pooled, StageParams& grad) {
  const Matrix d_r2 = mean_rows_pullback(z.rows(), d_pooled);
  Matrix d_ffn;
  Matrix d_r1;
  if (cfg.use_residual_norm) {
    d_ffn = layer_norm_rows_pullback(c.pre2, kLayerNormEps, d_r2);
    d_r1 = d_ffn;
  } else {
    d_ffn = d_r2;
  }

  auto g2 = matmul_pullback(c.hidden, stage.w2, d_ffn);
  add_into(grad.w2, g2.db);
  add_into(grad.b2, column_sums(d_ffn));
  const Matrix d_u = elementwise_pullback(Elementwise::relu, c.u, g2.da);
  auto g1 = matmul_pullback(c.r1, stage.w1, d_u);
  add_into(grad.w1, g1.db);
  add_into(grad.b1, column_sums(d_u));
  if (d_r1.empty()) {
    d_r1 = std::move(g1.da);
  } else {
    add_into(d_r1, g1.da);
  }

  const Matrix d_projected =
      cfg.use_residual_norm ? layer_norm_rows_pullback(c.pre1, kLayerNormEps, d_r1) : d_r1;
  auto go = matmul_pullback(c.concat, stage.w_o, d_projected);
  add_into(grad.w_o, go.db);

  const std::size_t dk = cfg.d_k;
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));
  for (std::size_t h = 0; h < stage.heads.size(); ++h) {
    const HeadCache& hc = c.heads[h];
    const Matrix d_context = column_block(go.da, h * dk, dk);
    auto gav = matmul_pullback(hc.probs, hc.v, d_context);
    Matrix d_scores = softmax_rows_pullback(hc.probs, gav.da);
    if (c.weights) d_scores = scale_columns(d_scores, c.weights->values);
    // scores = Q Kᵀ / √d_k
    const Matrix d_q = scale(matmul(d_scores, hc.k), inv_sqrt_dk);
    const Matrix d_k = scale(matmul_tn(d_scores, hc.q), inv_sqrt_dk);
    add_into(grad.heads[h].w_q, matmul_tn(z, d_q));
    add_into(grad.heads[h].w_k, matmul_tn(z, d_k));
    add_into(grad.heads[h].w_v, matmul_tn(z, gav.db));
  }
}

void require_stages(std::span<const Matrix> stages, const ModelParams& params,
                    const ModelConfig& cfg) {
  if (stages.size() != cfg.stages || params.stages.size() != cfg.stages) {
    throw ShapeError("model has " + std::to_string(cfg.stages) + " stages, input has " +
                     std::to_string(stages.size()));
  }
}

}  // namespace

Matrix attention_probabilities(const Matrix& z, const HeadParams& head,
                               const EntropyWeights* weights) {
  if (z.cols() != head.w_q.rows()) {
    throw ShapeError("attention: input " + z.shape() + " vs W_Q " + head.w_q.shape());
  }
  if (weights != nullptr && weights->values.size() != z.rows()) {
    throw ShapeError("attention: " + std::to_string(weights->values.size()) +
                     " weights for " + std::to_string(z.rows()) + " time steps");
  }
  return head_forward(z, head, weights).probs;
}

Matrix attention(const Matrix& z, const HeadParams& head, const EntropyWeights* weights) {
  if (z.cols() != head.w_q.rows()) {
    throw ShapeError("attention: input " + z.shape() + " vs W_Q " + head.w_q.shape());
  }
  if (weights != nullptr && weights->values.size() != z.rows()) {
    throw ShapeError("attention: " + std::to_string(weights->values.size()) +
                     " weights for " + std::to_string(z.rows()) + " time steps");
  }
  return head_forward(z, head, weights).context;
}

Matrix stage_encode(const Matrix& z, const StageParams& stage, const ModelConfig& cfg) {
  return stage_forward(z, stage, cfg).pooled;
}

double forward_logit(std::span<const Matrix> stages, const ModelParams& params,
                     const ModelConfig& cfg) {
  require_stages(stages, params, cfg);
  double logit = params.b_c(0, 0);
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const Matrix pooled = stage_encode(stages[k], params.stages[k], cfg);
    for (std::size_t j = 0; j < cfg.d; ++j) logit += params.w_c(0, k * cfg.d + j) * pooled(0, j);
  }
  return logit;
}

double forward(std::span<const Matrix> stages, const ModelParams& params, const ModelConfig& cfg) {
  return sigmoid(forward_logit(stages, params, cfg));
}

namespace {

struct ForwardTrace {
  std::vector<StageCache> caches;
  double logit = 0.0;
};

ForwardTrace forward_traced(std::span<const Matrix> stages, const ModelParams& params,
                            const ModelConfig& cfg) {
  require_stages(stages, params, cfg);
  ForwardTrace tr;
  tr.caches.reserve(stages.size());
  tr.logit = params.b_c(0, 0);
  for (std::size_t k = 0; k < stages.size(); ++k) {
    tr.caches.push_back(stage_forward(stages[k], params.stages[k], cfg));
    for (std::size_t j = 0; j < cfg.d; ++j) {
      tr.logit += params.w_c(0, k * cfg.d + j) * tr.caches.back().pooled(0, j);
    }
  }
  return tr;
}

void backward_traced(std::span<const Matrix> stages, const ModelParams& params,
                     const ModelConfig& cfg, const ForwardTrace& tr, double dlogit,
                     ModelParams& grad) {
  grad.b_c(0, 0) += dlogit;
  for (std::size_t k = 0; k < stages.size(); ++k) {
    Matrix d_pooled(1, cfg.d);
    for (std::size_t j = 0; j < cfg.d; ++j) {
      grad.w_c(0, k * cfg.d + j) += dlogit * tr.caches[k].pooled(0, j);
      d_pooled(0, j) = dlogit * params.w_c(0, k * cfg.d + j);
    }
    stage_backward(stages[k], params.stages[k], cfg, tr.caches[k], d_pooled, grad.stages[k]);
  }
}

}  // namespace

double accumulate_gradient(std::span<const Matrix> stages, const ModelParams& params,
                           const ModelConfig& cfg, double dlogit_scale, ModelParams& grad) {
  const ForwardTrace tr = forward_traced(stages, params, cfg);
  backward_traced(stages, params, cfg, tr, dlogit_scale, grad);
  return sigmoid(tr.logit);
}

// ---------------------------------------------------------------------------

LossResult loss(std::span<const double> scores, std::span<const int> labels, double lambda,
                std::span<const double> theta, double pos_weight) {
  if (scores.empty()) throw SizeError("loss over zero samples");
  if (scores.size() != labels.size()) {
    throw SizeError("loss: " + std::to_string(scores.size()) + " scores for " +
                    std::to_string(labels.size()) + " labels");
  }
  const double n = static_cast<double>(scores.size());
  LossResult r;
  r.d_scores.resize(scores.size());
  double ce = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double raw = scores[i];
    const double s = std::clamp(raw, kScoreClamp, 1.0 - kScoreClamp);
    const bool clamped = s != raw;
    if (labels[i] != 0) {
      ce -= pos_weight * std::log(s);
      r.d_scores[i] = clamped ? 0.0 : -pos_weight / (s * n);
    } else {
      ce -= std::log(1.0 - s);
      r.d_scores[i] = clamped ? 0.0 : 1.0 / ((1.0 - s) * n);
    }
  }
  double sq = 0.0;
  r.d_theta.resize(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    sq += theta[i] * theta[i];
    r.d_theta[i] = 2.0 * lambda * theta[i];
  }
  r.value = ce / n + lambda * sq;
  return r;
}

ObjectiveResult objective(std::span<const EncodedSample> samples,
                          std::span<const std::size_t> indices, const ModelParams& params,
                          const ModelConfig& cfg, double pos_weight, bool with_gradient) {
  if (indices.empty()) throw SizeError("objective over zero samples");
  ObjectiveResult out;
  out.scores.reserve(indices.size());
  std::vector<int> labels;
  labels.reserve(indices.size());
  const double n = static_cast<double>(indices.size());

  std::optional<ModelParams> grad;
  if (with_gradient) grad = ModelParams::zeros(cfg);
  for (std::size_t idx : indices) {
    const EncodedSample& s = samples[idx];
    labels.push_back(s.label);
    if (!with_gradient) {
      out.scores.push_back(forward(s.stages, params, cfg));
      continue;
    }
    // ∂L/∂logit for the pos-weighted cross-entropy, taken straight from the
    // logit so the sigmoid/log pair never cancels numerically.
    const ForwardTrace tr = forward_traced(s.stages, params, cfg);
    const double score = sigmoid(tr.logit);
    const double dlogit = s.label != 0 ? pos_weight * (score - 1.0) / n : score / n;
    backward_traced(s.stages, params, cfg, tr, dlogit, *grad);
    out.scores.push_back(score);
  }
  const auto theta = params.flatten();
  const LossResult lr = loss(out.scores, labels, cfg.lambda, theta, pos_weight);
  out.value = lr.value;
  if (with_gradient) {
    out.gradient = grad->flatten();
    for (std::size_t i = 0; i < out.gradient.size(); ++i) out.gradient[i] += lr.d_theta[i];
  }
  return out;
}

std::vector<double> score_all(std::span<const EncodedSample> samples, const ModelParams& params,
                              const ModelConfig& cfg) {
  std::vector<double> scores;
  scores.reserve(samples.size());
  for (const auto& s : samples) scores.push_back(forward(s.stages, params, cfg));
  return scores;
}

}  // namespace sswt
