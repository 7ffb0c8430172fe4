#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "sswt/checkpoint.hpp"
#include "sswt/error.hpp"
#include "sswt/model.hpp"
#include "test_support.hpp"

using namespace sswt;
using sswt::testing::random_matrix;

namespace {

// Independent scalar re-implementation of the stage and the score, written
// with nested vectors and explicit loops only.
using Rows = std::vector<std::vector<double>>;

Rows rows_of(const Matrix& m) {
  Rows r(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
  return r;
}

Rows mul(const Rows& a, const Rows& b) {
  Rows c(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b[0].size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

Rows norm_rows(Rows x) {
  for (auto& r : x) {
    const double n = static_cast<double>(r.size());
    const double mu = std::accumulate(r.begin(), r.end(), 0.0) / n;
    double var = 0.0;
    for (double v : r) var += (v - mu) * (v - mu);
    var /= n;
    for (double& v : r) v = (v - mu) / std::sqrt(var + 1e-5);
  }
  return x;
}

std::vector<double> reference_stage(const Matrix& zm, const StageParams& p, const ModelConfig& cfg) {
  const Rows z = rows_of(zm);
  const std::size_t W = z.size(), d = cfg.d, dk = cfg.d_k;
  std::vector<double> w(W, 1.0);
  if (cfg.use_weighted_attention) {
    for (std::size_t t = 0; t < W; ++t) {
      double total = 0.0;
      for (double v : z[t]) total += std::abs(v) + cfg.entropy_epsilon;
      double h = 0.0;
      for (double v : z[t]) {
        const double q = (std::abs(v) + cfg.entropy_epsilon) / total;
        h -= q * std::log(q);
      }
      w[t] = h;
    }
  }
  Rows concat(W);
  for (const auto& head : p.heads) {
    const Rows q = mul(z, rows_of(head.w_q)), k = mul(z, rows_of(head.w_k)), v = mul(z, rows_of(head.w_v));
    for (std::size_t i = 0; i < W; ++i) {
      std::vector<double> s(W);
      for (std::size_t j = 0; j < W; ++j) {
        double dot = 0.0;
        for (std::size_t c = 0; c < dk; ++c) dot += q[i][c] * k[j][c];
        s[j] = dot / std::sqrt(static_cast<double>(dk)) * w[j];
      }
      const double mx = *std::max_element(s.begin(), s.end());
      double total = 0.0;
      for (double& x : s) total += (x = std::exp(x - mx));
      for (std::size_t c = 0; c < dk; ++c) {
        double acc = 0.0;
        for (std::size_t j = 0; j < W; ++j) acc += s[j] / total * v[j][c];
        concat[i].push_back(acc);
      }
    }
  }
  Rows a = mul(concat, rows_of(p.w_o));
  if (cfg.use_residual_norm) {
    for (std::size_t i = 0; i < W; ++i)
      for (std::size_t j = 0; j < d; ++j) a[i][j] += z[i][j];
    a = norm_rows(a);
  }
  Rows u = mul(a, rows_of(p.w1));
  for (auto& r : u)
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = std::max(0.0, r[j] + p.b1(0, j));
  Rows f = mul(u, rows_of(p.w2));
  for (std::size_t i = 0; i < W; ++i)
    for (std::size_t j = 0; j < d; ++j) f[i][j] += p.b2(0, j) + (cfg.use_residual_norm ? a[i][j] : 0.0);
  if (cfg.use_residual_norm) f = norm_rows(f);
  std::vector<double> pooled(d, 0.0);
  for (const auto& r : f)
    for (std::size_t j = 0; j < d; ++j) pooled[j] += r[j] / static_cast<double>(W);
  return pooled;
}

double reference_score(std::span<const Matrix> stages, const ModelParams& p, const ModelConfig& cfg) {
  double logit = p.b_c(0, 0);
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const auto pooled = reference_stage(stages[k], p.stages[k], cfg);
    for (std::size_t j = 0; j < cfg.d; ++j) logit += p.w_c(0, k * cfg.d + j) * pooled[j];
  }
  return 1.0 / (1.0 + std::exp(-logit));
}

ModelConfig tiny_config(std::size_t d, std::size_t dk, std::size_t h, std::size_t k) {
  ModelConfig cfg;
  cfg.d = d;
  cfg.d_k = dk;
  cfg.heads = h;
  cfg.stages = k;
  cfg.ffn_hidden = 3;
  cfg.lambda = 1e-3;
  return cfg;
}

ModelParams random_params(const ModelConfig& cfg, std::mt19937_64& rng, double scale = 0.8) {
  ModelParams p = ModelParams::zeros(cfg);
  std::uniform_real_distribution<double> u(-scale, scale);
  p.for_each_tensor([&](Matrix& m) {
    for (double& v : m.values()) v = u(rng);
  });
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(Entropy, EqualMagnitudesGiveLogD) {
  const auto w = entropy_weights(Matrix::from_rows({{2, -2, 2, -2, 2}}), 1e-6);
  EXPECT_NEAR(w.values[0], std::log(5.0), 1e-12);
}

TEST(Entropy, DominantCoordinateApproachesZero) {
  const auto w = entropy_weights(Matrix::from_rows({{1, 0, 0, 0}}), 1e-12);
  EXPECT_LT(w.values[0], 1e-9);
}

TEST(Entropy, QuarterThreeQuarters) {
  const double eps = 1e-6;
  const auto w = entropy_weights(Matrix::from_rows({{1.0 - eps, -(3.0 - eps)}}), eps);
  EXPECT_NEAR(w.values[0], -(0.25 * std::log(0.25) + 0.75 * std::log(0.75)), 1e-12);
  EXPECT_NEAR(w.values[0], 0.5623, 1e-4);
}

TEST(Entropy, BoundsUnderFuzz) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> dim(1, 12);
  std::uniform_real_distribution<double> mag(-8, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = dim(rng);
    Matrix z = random_matrix(rng, dim(rng), d, -1, 1);
    for (double& v : z.values()) v *= std::pow(10.0, mag(rng));
    const auto w = entropy_weights(z, 1e-6);
    for (double v : w.values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, std::log(static_cast<double>(d)) + 1e-12);
    }
  }
}

TEST(Attention, AllOnesWeightsEqualPlain) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix z = random_matrix(rng, 7, 4, -2, 2);
    const HeadParams h{random_matrix(rng, 4, 3), random_matrix(rng, 4, 3), random_matrix(rng, 4, 3)};
    const EntropyWeights ones{std::vector<double>(7, 1.0)};
    const Matrix a = attention(z, h, &ones), b = attention(z, h, nullptr);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-12);
  }
}

TEST(Attention, SingleStepReturnsValueRow) {
  std::mt19937_64 rng(13);
  const Matrix z = random_matrix(rng, 1, 3);
  const HeadParams h{random_matrix(rng, 3, 2), random_matrix(rng, 3, 2), random_matrix(rng, 3, 2)};
  const EntropyWeights w{{0.37}};
  const Matrix out = attention(z, h, &w);
  const Matrix v = matmul(z, h.w_v);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(out(0, j), v(0, j), 1e-15);
}

TEST(Attention, TwoStepScalarHandCase) {
  const double z0 = 0.5, z1 = -1.5, a = 2.0, b = 0.75, c = 3.0, w0 = 0.4, w1 = 1.3;
  const HeadParams h{Matrix(1, 1, a), Matrix(1, 1, b), Matrix(1, 1, c)};
  const EntropyWeights w{{w0, w1}};
  const Matrix out = attention(Matrix::from_rows({{z0}, {z1}}), h, &w);
  const double zs[2] = {z0, z1}, ws[2] = {w0, w1};
  for (int i = 0; i < 2; ++i) {
    const double s0 = zs[i] * a * z0 * b * ws[0];
    const double s1 = zs[i] * a * z1 * b * ws[1];
    const double p0 = std::exp(s0) / (std::exp(s0) + std::exp(s1));
    const double expected = p0 * z0 * c + (1 - p0) * z1 * c;
    EXPECT_NEAR(out(i, 0), expected, 1e-14);
  }
}

TEST(Attention, RowsSumToOneBothModes) {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<std::size_t> dim(1, 9);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t W = dim(rng), d = dim(rng), dk = dim(rng);
    const Matrix z = random_matrix(rng, W, d, -5, 5);
    const HeadParams h{random_matrix(rng, d, dk, -2, 2), random_matrix(rng, d, dk, -2, 2),
                       random_matrix(rng, d, dk, -2, 2)};
    const auto w = entropy_weights(z, 1e-6);
    for (const EntropyWeights* wp : {&w, static_cast<const EntropyWeights*>(nullptr)}) {
      const Matrix p = attention_probabilities(z, h, wp);
      for (std::size_t i = 0; i < W; ++i) {
        double s = 0.0;
        for (double v : p.row(i)) s += v;
        ASSERT_NEAR(s, 1.0, 1e-12);
      }
    }
  }
}

TEST(Attention, WeightCountMismatch) {
  const HeadParams h{Matrix(2, 1), Matrix(2, 1), Matrix(2, 1)};
  const EntropyWeights w{{1.0}};
  EXPECT_THROW(attention(Matrix(3, 2), h, &w), ShapeError);
}

TEST(StageEncode, ZeroWeightsReduceToMeanOfNormalizedInput) {
  std::mt19937_64 rng(15);
  const ModelConfig cfg = tiny_config(4, 2, 2, 1);
  const StageParams zero = ModelParams::zeros(cfg).stages[0];
  const Matrix z = random_matrix(rng, 6, 4, -3, 3);
  const Matrix pooled = stage_encode(z, zero, cfg);
  const Matrix expected = mean_rows(layer_norm_rows(z, 1e-5));
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(pooled(0, j), expected(0, j), 1e-4);
}

TEST(StageEncode, ConstantRowsPoolToASingleRow) {
  std::mt19937_64 rng(16);
  ModelConfig cfg = tiny_config(3, 2, 1, 1);
  cfg.use_residual_norm = false;
  const ModelParams p = random_params(cfg, rng);
  const Matrix row = random_matrix(rng, 1, 3);
  Matrix z(5, 3);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) z(i, j) = row(0, j);
  const Matrix a = stage_encode(z, p.stages[0], cfg), b = stage_encode(row, p.stages[0], cfg);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(a(0, j), b(0, j), 1e-12);
}

TEST(StageEncode, MatchesReferenceOnTwoByTwo) {
  std::mt19937_64 rng(17);
  const ModelConfig cfg = tiny_config(2, 2, 1, 1);
  const ModelParams p = random_params(cfg, rng);
  const Matrix z = Matrix::from_rows({{0.3, -1.2}, {1.7, 0.4}});
  const Matrix pooled = stage_encode(z, p.stages[0], cfg);
  const auto ref = reference_stage(z, p.stages[0], cfg);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(pooled(0, j), ref[j], 1e-12);
}

TEST(StageEncode, RowPermutationInvariance) {
  std::mt19937_64 rng(18);
  for (bool residual : {true, false}) {
    for (bool weighted : {true, false}) {
      ModelConfig cfg = tiny_config(4, 3, 2, 1);
      cfg.use_residual_norm = residual;
      cfg.use_weighted_attention = weighted;
      const ModelParams p = random_params(cfg, rng);
      const Matrix z = random_matrix(rng, 6, 4, -2, 2);
      Matrix zp(6, 4);
      const std::size_t perm[6] = {3, 0, 5, 1, 4, 2};
      for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 4; ++j) zp(i, j) = z(perm[i], j);
      const Matrix a = stage_encode(z, p.stages[0], cfg), b = stage_encode(zp, p.stages[0], cfg);
      for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(a(0, j), b(0, j), 1e-12);
    }
  }
}

TEST(Forward, ZeroClassifierGivesHalf) {
  std::mt19937_64 rng(19);
  const ModelConfig cfg = tiny_config(3, 2, 2, 2);
  ModelParams p = random_params(cfg, rng);
  p.w_c = Matrix(1, 6);
  p.b_c = Matrix(1, 1);
  const std::vector<Matrix> x = {random_matrix(rng, 2, 3, -9, 9), random_matrix(rng, 4, 3, -9, 9)};
  EXPECT_EQ(forward(x, p, cfg), 0.5);
}

TEST(Forward, ScoreInOpenUnitInterval) {
  std::mt19937_64 rng(20);
  const ModelConfig cfg = tiny_config(3, 2, 2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const ModelParams p = random_params(cfg, rng, 2.0);
    const std::vector<Matrix> x = {random_matrix(rng, 3, 3, -5, 5), random_matrix(rng, 5, 3, -5, 5)};
    const double s = forward(x, p, cfg);
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, 1.0);
  }
}

TEST(Forward, TinyModelMatchesReference) {
  ModelConfig cfg = tiny_config(2, 1, 1, 1);
  cfg.ffn_hidden = 2;
  ModelParams p = ModelParams::zeros(cfg);
  auto& s = p.stages[0];
  s.heads[0].w_q = Matrix::from_rows({{0.5}, {-0.3}});
  s.heads[0].w_k = Matrix::from_rows({{0.2}, {0.9}});
  s.heads[0].w_v = Matrix::from_rows({{-1.1}, {0.4}});
  s.w_o = Matrix::from_rows({{0.7, -0.6}});
  s.w1 = Matrix::from_rows({{0.3, -0.8}, {1.2, 0.5}});
  s.b1 = Matrix::from_rows({{0.1, -0.2}});
  s.w2 = Matrix::from_rows({{0.6, 0.2}, {-0.4, 0.9}});
  s.b2 = Matrix::from_rows({{0.05, -0.05}});
  p.w_c = Matrix::from_rows({{1.5, -0.7}});
  p.b_c = Matrix(1, 1, 0.1);
  const std::vector<Matrix> x = {Matrix::from_rows({{0.8, -0.2}, {0.1, 1.3}})};
  EXPECT_NEAR(forward(x, p, cfg), reference_score(x, p, cfg), 1e-12);
}

TEST(Forward, RandomModelsMatchReference) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    ModelConfig cfg = tiny_config(3, 2, 2, 2);
    cfg.use_weighted_attention = trial % 2 == 0;
    cfg.use_residual_norm = trial % 3 != 0;
    const ModelParams p = random_params(cfg, rng);
    const std::vector<Matrix> x = {random_matrix(rng, 3, 3, -2, 2), random_matrix(rng, 6, 3, -2, 2)};
    EXPECT_NEAR(forward(x, p, cfg), reference_score(x, p, cfg), 1e-12);
  }
}

TEST(Forward, IncreasingInClassifierBias) {
  std::mt19937_64 rng(22);
  const ModelConfig cfg = tiny_config(3, 2, 1, 1);
  ModelParams p = random_params(cfg, rng);
  const std::vector<Matrix> x = {random_matrix(rng, 4, 3)};
  double prev = 0.0;
  for (double b = -5.0; b <= 5.0; b += 0.5) {
    p.b_c(0, 0) = b;
    const double s = forward(x, p, cfg);
    EXPECT_GT(s, prev);
    prev = s;
  }
}

TEST(Forward, StageCountMismatch) {
  const ModelConfig cfg = tiny_config(3, 2, 1, 2);
  const ModelParams p = ModelParams::zeros(cfg);
  const std::vector<Matrix> x = {Matrix(4, 3)};
  EXPECT_THROW(forward(x, p, cfg), ShapeError);
}

TEST(Loss, HalfScorePositiveIsLogTwo) {
  const std::vector<double> s = {0.5};
  const std::vector<int> y = {1};
  EXPECT_NEAR(loss(s, y, 0.0, {}).value, std::log(2.0), 1e-15);
}

TEST(Loss, PerfectPredictionIsTiny) {
  const std::vector<double> s = {1.0, 0.0, 1.0};
  const std::vector<int> y = {1, 0, 1};
  const auto r = loss(s, y, 0.0, {});
  EXPECT_LE(r.value, 1e-11);
  EXPECT_TRUE(std::isfinite(r.value));
}

TEST(Loss, RegulariserAddedOnce) {
  const std::vector<double> s = {1.0, 0.0};
  const std::vector<int> y = {1, 0};
  const std::vector<double> theta = {1.0, -1.0, 1.0, 1.0};
  const auto r = loss(s, y, 0.1, theta);
  EXPECT_NEAR(r.value, 0.4, 1e-10);
  ASSERT_EQ(r.d_theta.size(), 4u);
  EXPECT_NEAR(r.d_theta[1], -0.2, 1e-15);
}

TEST(Loss, ScoreGradientMatchesFiniteDifference) {
  const std::vector<double> s0 = {0.3, 0.8, 0.55};
  const std::vector<int> y = {1, 0, 1};
  const auto r = loss(s0, y, 0.0, {}, 2.5);
  const auto f = [&](std::span<const double> s) { return loss(s, y, 0.0, {}, 2.5).value; };
  EXPECT_LT(grad_check(f, r.d_scores, s0, 1e-6), 1e-7);
}

TEST(Loss, Errors) {
  EXPECT_THROW(loss({}, {}, 0.0, {}), SizeError);
  const std::vector<double> s = {0.5, 0.5};
  const std::vector<int> y = {1};
  EXPECT_THROW(loss(s, y, 0.0, {}), SizeError);
}

// Whole-objective gradient against central differences on random tiny configs.
TEST(Gradient, MatchesFiniteDifferencesOnRandomConfigs) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> pick_w(1, 6), pick_d(1, 5), pick_dk(1, 4), pick_h(1, 2),
      pick_k(1, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t K = pick_k(rng);
    ModelConfig cfg = tiny_config(pick_d(rng), pick_dk(rng), pick_h(rng), K);
    cfg.use_weighted_attention = trial % 4 != 3;
    cfg.use_residual_norm = trial % 5 != 4;
    std::vector<std::size_t> lengths;
    std::size_t w = 0;
    for (std::size_t k = 0; k < K; ++k) lengths.push_back(w = std::min<std::size_t>(6, w + pick_w(rng)));
    std::vector<EncodedSample> samples;
    for (int n = 0; n < 3; ++n) {
      EncodedSample s;
      s.label = n % 2;
      for (std::size_t len : lengths) s.stages.push_back(random_matrix(rng, len, cfg.d, -2, 2));
      samples.push_back(std::move(s));
    }
    const std::vector<std::size_t> idx = {0, 1, 2};
    ModelParams p = random_params(cfg, rng);
    const auto theta = p.flatten();
    const auto analytic = objective(samples, idx, p, cfg, 1.7, true).gradient;
    const auto f = [&](std::span<const double> x) {
      ModelParams q = p;
      q.assign(x);
      return objective(samples, idx, q, cfg, 1.7, false).value;
    };
    EXPECT_LT(grad_check(f, analytic, theta, 1e-5), 1e-4) << "trial " << trial;
  }
}

TEST(Gradient, AccumulateMatchesLogitDerivative) {
  std::mt19937_64 rng(24);
  const ModelConfig cfg = tiny_config(3, 2, 2, 2);
  const ModelParams p = random_params(cfg, rng);
  const std::vector<Matrix> x = {random_matrix(rng, 2, 3), random_matrix(rng, 5, 3)};
  ModelParams g = ModelParams::zeros(cfg);
  const double s = accumulate_gradient(x, p, cfg, 1.0, g);
  EXPECT_NEAR(s, forward(x, p, cfg), 1e-15);
  const auto f = [&](std::span<const double> th) {
    ModelParams q = p;
    q.assign(th);
    return forward_logit(x, q, cfg);
  };
  EXPECT_LT(grad_check(f, g.flatten(), p.flatten(), 1e-5), 1e-6);
}

TEST(Params, FlattenAssignRoundTrip) {
  std::mt19937_64 rng(25);
  const ModelConfig cfg = tiny_config(3, 2, 2, 3);
  const ModelParams p = random_params(cfg, rng);
  ModelParams q = ModelParams::zeros(cfg);
  q.assign(p.flatten());
  EXPECT_EQ(p, q);
  const std::size_t per_stage = 2 * 3 * 3 * 2 + 4 * 3 + 3 * 3 + 3 + 3 * 3 + 3;
  EXPECT_EQ(p.parameter_count(), 3 * per_stage + 9 + 1);
  EXPECT_THROW(q.assign(std::vector<double>(5)), ShapeError);
}

TEST(Params, InitIsDeterministicAndBounded) {
  const ModelConfig cfg;
  const ModelParams a = init_params(cfg, 7), b = init_params(cfg, 7), c = init_params(cfg, 8);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (const auto& s : a.stages) {
    const double lim = std::sqrt(6.0 / static_cast<double>(cfg.d + cfg.d_k));
    for (double v : s.heads[0].w_q.values()) EXPECT_LE(std::abs(v), lim);
    for (double v : s.b1.values()) EXPECT_EQ(v, 0.0);
  }
  EXPECT_EQ(a.b_c(0, 0), 0.0);
}

TEST(CheckpointFormat, RoundTripIsExact) {
  std::mt19937_64 rng(26);
  Checkpoint ck;
  ck.model = tiny_config(3, 2, 2, 2);
  ck.windows.lengths = {4, 9};
  ck.windows.stride = 3;
  ck.windows.label_rule = LabelRule::anchor_tick;
  ck.standardization = {{0.1, 1.0 / 3.0, -7.25}, {1.0, 2.5, 1e-9}};
  ck.params = random_params(ck.model, rng);
  ck.threshold = 0.3141592653589793;
  ck.pos_weight = 12.5;
  ck.best_epoch = 4;
  const std::string text = serialize_checkpoint(ck);
  const Checkpoint back = deserialize_checkpoint(text);
  EXPECT_EQ(back.params, ck.params);
  EXPECT_EQ(back.model, ck.model);
  EXPECT_EQ(back.windows.lengths, ck.windows.lengths);
  EXPECT_EQ(back.windows.stride, ck.windows.stride);
  EXPECT_EQ(back.windows.label_rule, ck.windows.label_rule);
  EXPECT_EQ(back.standardization, ck.standardization);
  EXPECT_EQ(back.threshold, ck.threshold);
  EXPECT_EQ(back.pos_weight, ck.pos_weight);
  EXPECT_EQ(back.best_epoch, ck.best_epoch);
  EXPECT_EQ(serialize_checkpoint(back), text);
}

TEST(CheckpointFormat, RejectsDamagedDocuments) {
  std::mt19937_64 rng(27);
  Checkpoint ck;
  ck.model = tiny_config(2, 1, 1, 1);
  ck.windows.lengths = {3};
  ck.standardization = {{0, 0}, {1, 1}};
  ck.params = random_params(ck.model, rng);
  auto doc = nlohmann::json::parse(serialize_checkpoint(ck));
  EXPECT_THROW(deserialize_checkpoint("not json"), SchemaError);
  auto bad = doc;
  bad["format"] = "other";
  EXPECT_THROW(deserialize_checkpoint(bad.dump()), SchemaError);
  bad = doc;
  bad["parameters"].erase(0);
  EXPECT_THROW(deserialize_checkpoint(bad.dump()), SchemaError);
  bad = doc;
  bad.erase("standardization");
  EXPECT_THROW(deserialize_checkpoint(bad.dump()), SchemaError);
}
