#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sswt/dataio.hpp"
#include "sswt/numerics.hpp"

namespace sswt {

/// Per-feature train-set mean and population standard deviation.
/// Zero-variance features store std = 1.
struct StandardizationParams {
  std::vector<double> mean;
  std::vector<double> std;

  friend bool operator==(const StandardizationParams&, const StandardizationParams&) = default;
};

StandardizationParams fit_standardization(const TickSeries& train);
TickSeries standardize(const TickSeries& series, const StandardizationParams& params);
/// Inverse map x·σ + μ.
TickSeries unstandardize(const TickSeries& series, const StandardizationParams& params);

enum class LabelRule {
  shortest_span,  // any labeled tick inside the W₁ slice
  longest_span,   // any labeled tick inside the W_K slice
  anchor_tick,    // the anchor tick itself is labeled
};

struct WindowSpec {
  std::vector<std::size_t> lengths = {10, 30, 60};
  std::size_t stride = 5;
  LabelRule label_rule = LabelRule::shortest_span;

  std::size_t longest() const { return lengths.back(); }
  void validate() const;
};

/// K end-aligned slices; slice k covers ticks [anchor - W_k + 1, anchor].
struct WindowSample {
  std::size_t anchor = 0;
  std::vector<Matrix> slices;
  int label = 0;
};

struct WindowSet {
  std::vector<WindowSample> samples;
  /// Set when the series is shorter than the longest window.
  bool insufficient_data = false;
};

/// Closed-form sample count floor((T - W_K)/S) + 1, or 0 when T < W_K.
std::size_t window_count(std::size_t series_length, const WindowSpec& spec);

WindowSet build_windows(const TickSeries& series, const WindowSpec& spec);

/// W×d table: PE[pos, 2j] = sin(pos / 10000^(2j/d)), PE[pos, 2j+1] = cos(same).
struct PositionalEncoding {
  Matrix table;
};

PositionalEncoding positional_encoding(std::size_t length, std::size_t dimension);
std::vector<PositionalEncoding> positional_encodings(const WindowSpec& spec, std::size_t dimension);

/// Slice-wise X + PE.
std::vector<Matrix> encode(const WindowSample& sample, std::span<const PositionalEncoding> tables);

/// Encoded model input, one matrix per stage.
struct EncodedSample {
  std::size_t anchor = 0;
  std::vector<Matrix> stages;
  int label = 0;
};

/// Builds windows and adds positional encodings in one pass.
std::vector<EncodedSample> encode_windows(const TickSeries& series, const WindowSpec& spec);

}  // namespace sswt
