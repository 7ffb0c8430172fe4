#include <gtest/gtest.h>

#include <cmath>

#include "sswt/error.hpp"
#include "sswt/pipeline.hpp"
#include "test_support.hpp"

using namespace sswt;

namespace {

TickSeries column_series(const std::vector<std::vector<double>>& rows) {
  TickSeries s;
  for (std::size_t j = 0; j < rows.front().size(); ++j) s.feature_names.push_back("c" + std::to_string(j));
  std::int64_t ts = 100;
  for (const auto& r : rows) s.records.push_back({ts++, r, 0});
  return s;
}

// Feature j of tick t is 100t + j, so each slice row identifies its tick.
TickSeries index_series(std::size_t n, std::size_t d) {
  TickSeries s;
  for (std::size_t j = 0; j < d; ++j) s.feature_names.push_back("c" + std::to_string(j));
  for (std::size_t t = 0; t < n; ++t) {
    TickRecord r;
    r.timestamp_ms = static_cast<std::int64_t>(t);
    for (std::size_t j = 0; j < d; ++j) r.features.push_back(100.0 * static_cast<double>(t) + static_cast<double>(j));
    s.records.push_back(r);
  }
  return s;
}

TickSeries random_series(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> g(3.0, 2.0);
  TickSeries s = index_series(n, d);
  for (auto& r : s.records)
    for (double& v : r.features) v = g(rng);
  return s;
}

}  // namespace

TEST(Standardization, FitOneTwoThree) {
  const auto p = fit_standardization(column_series({{1}, {2}, {3}}));
  EXPECT_NEAR(p.mean[0], 2.0, 1e-15);
  EXPECT_NEAR(p.std[0], std::sqrt(2.0 / 3.0), 1e-15);
}

TEST(Standardization, ConstantColumnStoresOne) {
  const auto p = fit_standardization(column_series({{5}, {5}, {5}}));
  EXPECT_EQ(p.mean[0], 5.0);
  EXPECT_EQ(p.std[0], 1.0);
  const auto z = standardize(column_series({{5}, {5}, {5}}), p);
  for (const auto& r : z.records) EXPECT_EQ(r.features[0], 0.0);
}

TEST(Standardization, HandComputedValues) {
  const auto s = column_series({{1}, {2}, {3}});
  const auto z = standardize(s, fit_standardization(s));
  EXPECT_NEAR(z.records[0].features[0], -1.224744871391589, 1e-12);
  EXPECT_NEAR(z.records[1].features[0], 0.0, 1e-15);
  EXPECT_NEAR(z.records[2].features[0], 1.224744871391589, 1e-12);
}

TEST(Standardization, IdentityParams) {
  std::mt19937_64 rng(1);
  const auto s = random_series(rng, 30, 3);
  const StandardizationParams id{{0, 0, 0}, {1, 1, 1}};
  EXPECT_EQ(standardize(s, id), s);
}

TEST(Standardization, RefitOnStandardizedIsZeroOne) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_series(rng, 200, 5);
    const auto z = standardize(s, fit_standardization(s));
    const auto p = fit_standardization(z);
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_NEAR(p.mean[j], 0.0, 1e-9);
      EXPECT_NEAR(p.std[j], 1.0, 1e-9);
    }
  }
}

TEST(Standardization, RoundTrip) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_series(rng, 100, 4);
    const auto p = fit_standardization(s);
    const auto back = unstandardize(standardize(s, p), p);
    for (std::size_t t = 0; t < s.size(); ++t)
      for (std::size_t j = 0; j < 4; ++j)
        EXPECT_NEAR(back.records[t].features[j], s.records[t].features[j], 1e-12);
  }
}

TEST(Standardization, Errors) {
  TickSeries empty;
  empty.feature_names = {"a"};
  EXPECT_THROW(fit_standardization(empty), SizeError);
  const StandardizationParams wrong{{0}, {1}};
  EXPECT_THROW(standardize(index_series(5, 2), wrong), ShapeError);
}

TEST(Windows, TenTicksLengthFourStrideTwo) {
  WindowSpec spec;
  spec.lengths = {4};
  spec.stride = 2;
  const auto ws = build_windows(index_series(10, 1), spec);
  ASSERT_EQ(ws.samples.size(), 4u);
  EXPECT_EQ(window_count(10, spec), 4u);
  const std::vector<std::size_t> expected = {3, 5, 7, 9};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(ws.samples[i].anchor, expected[i]);
  EXPECT_FALSE(ws.insufficient_data);
}

TEST(Windows, EndAlignedSlices) {
  WindowSpec spec;
  spec.lengths = {2, 4};
  spec.stride = 1;
  const auto ws = build_windows(index_series(6, 2), spec);
  ASSERT_FALSE(ws.samples.empty());
  const auto& first = ws.samples.front();
  EXPECT_EQ(first.anchor, 3u);
  ASSERT_EQ(first.slices.size(), 2u);
  EXPECT_EQ(first.slices[0], Matrix::from_rows({{200, 201}, {300, 301}}));
  EXPECT_EQ(first.slices[1], Matrix::from_rows({{0, 1}, {100, 101}, {200, 201}, {300, 301}}));
}

TEST(Windows, InsufficientData) {
  WindowSpec spec;
  spec.lengths = {4};
  const auto ws = build_windows(index_series(3, 1), spec);
  EXPECT_TRUE(ws.samples.empty());
  EXPECT_TRUE(ws.insufficient_data);
  EXPECT_EQ(window_count(3, spec), 0u);
}

TEST(Windows, ClosedFormCountAndBounds) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> len(1, 30), stride(1, 7), n(0, 120), k(1, 3);
  for (int trial = 0; trial < 100; ++trial) {
    WindowSpec spec;
    spec.lengths.clear();
    std::size_t w = 0;
    for (std::size_t i = 0, kk = k(rng); i < kk; ++i) spec.lengths.push_back(w += len(rng));
    spec.stride = stride(rng);
    const std::size_t T = n(rng);
    const std::size_t expected = T < spec.longest() ? 0 : (T - spec.longest()) / spec.stride + 1;
    EXPECT_EQ(window_count(T, spec), expected);
    if (T == 0) continue;
    const auto ws = build_windows(index_series(T, 1), spec);
    ASSERT_EQ(ws.samples.size(), expected);
    for (const auto& s : ws.samples) {
      ASSERT_LT(s.anchor, T);
      ASSERT_EQ(s.slices.size(), spec.lengths.size());
      for (std::size_t j = 0; j < spec.lengths.size(); ++j) {
        ASSERT_EQ(s.slices[j].rows(), spec.lengths[j]);
        // last row of every slice is the anchor tick
        EXPECT_EQ(s.slices[j](spec.lengths[j] - 1, 0), 100.0 * static_cast<double>(s.anchor));
      }
    }
  }
}

TEST(Windows, LabelRules) {
  TickSeries s = index_series(12, 1);
  s.records[5].label = 1;
  WindowSpec spec;
  spec.lengths = {2, 6};
  spec.stride = 1;
  // anchors 5..11; W1 span of anchor a is {a-1, a}, W2 span {a-5..a}
  spec.label_rule = LabelRule::shortest_span;
  auto ws = build_windows(s, spec);
  for (const auto& w : ws.samples) EXPECT_EQ(w.label, (w.anchor == 5 || w.anchor == 6) ? 1 : 0) << w.anchor;
  spec.label_rule = LabelRule::longest_span;
  ws = build_windows(s, spec);
  for (const auto& w : ws.samples) EXPECT_EQ(w.label, w.anchor <= 10 ? 1 : 0) << w.anchor;
  spec.label_rule = LabelRule::anchor_tick;
  ws = build_windows(s, spec);
  for (const auto& w : ws.samples) EXPECT_EQ(w.label, w.anchor == 5 ? 1 : 0) << w.anchor;
}

TEST(Windows, SpecValidation) {
  WindowSpec spec;
  spec.lengths = {};
  EXPECT_THROW(spec.validate(), ConfigError);
  spec.lengths = {5, 5};
  EXPECT_THROW(spec.validate(), ConfigError);
  spec.lengths = {5};
  spec.stride = 0;
  EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(PositionalEncodingTable, RowZeroAlternates) {
  const auto pe = positional_encoding(5, 6);
  for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(pe.table(0, c), c % 2 == 0 ? 0.0 : 1.0);
}

TEST(PositionalEncodingTable, ClosedFormEntries) {
  EXPECT_NEAR(positional_encoding(3, 4).table(1, 0), 0.8414709848078965, 1e-15);
  EXPECT_NEAR(positional_encoding(3, 4).table(2, 2), std::sin(0.02), 1e-15);
  EXPECT_NEAR(positional_encoding(3, 4).table(2, 3), std::cos(0.02), 1e-15);
}

TEST(PositionalEncodingTable, BoundsAndPairIdentity) {
  for (std::size_t d : {1u, 2u, 5u, 10u, 16u}) {
    const auto pe = positional_encoding(120, d);
    for (std::size_t r = 0; r < 120; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        EXPECT_LE(std::abs(pe.table(r, c)), 1.0);
      }
      for (std::size_t c = 0; c + 1 < d; c += 2) {
        const double s = pe.table(r, c), k = pe.table(r, c + 1);
        EXPECT_NEAR(s * s + k * k, 1.0, 1e-12);
      }
    }
  }
}

TEST(Encode, ZeroSliceGivesTable) {
  WindowSample sample;
  sample.slices = {Matrix(3, 4)};
  const std::vector<PositionalEncoding> tables = {positional_encoding(3, 4)};
  EXPECT_EQ(encode(sample, tables)[0], tables[0].table);
}

TEST(Encode, ZeroTableGivesSlice) {
  std::mt19937_64 rng(5);
  WindowSample sample;
  sample.slices = {sswt::testing::random_matrix(rng, 3, 2)};
  const std::vector<PositionalEncoding> tables = {{Matrix(3, 2)}};
  EXPECT_EQ(encode(sample, tables)[0], sample.slices[0]);
}

TEST(Encode, TwoByTwoHandCase) {
  WindowSample sample;
  sample.slices = {Matrix(2, 2, 1.0)};
  const std::vector<PositionalEncoding> tables = {positional_encoding(2, 2)};
  const Matrix z = encode(sample, tables)[0];
  EXPECT_NEAR(z(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(z(0, 1), 2.0, 1e-15);
  EXPECT_NEAR(z(1, 0), 1.8415, 1e-4);
  EXPECT_NEAR(z(1, 1), 1.5403, 1e-4);
}

TEST(Encode, TableCountMismatch) {
  WindowSample sample;
  sample.slices = {Matrix(2, 2), Matrix(4, 2)};
  const std::vector<PositionalEncoding> tables = {positional_encoding(2, 2)};
  EXPECT_THROW(encode(sample, tables), ShapeError);
}

TEST(EncodeWindows, MatchesBuildPlusEncode) {
  std::mt19937_64 rng(6);
  const auto s = random_series(rng, 80, 3);
  WindowSpec spec;
  const auto enc = encode_windows(s, spec);
  const auto ws = build_windows(s, spec);
  const auto tables = positional_encodings(spec, 3);
  ASSERT_EQ(enc.size(), ws.samples.size());
  for (std::size_t i = 0; i < enc.size(); ++i) {
    EXPECT_EQ(enc[i].anchor, ws.samples[i].anchor);
    EXPECT_EQ(enc[i].label, ws.samples[i].label);
    EXPECT_EQ(enc[i].stages, encode(ws.samples[i], tables));
  }
}
