#include "sswt/pipeline.hpp"

#include <cmath>

#include "sswt/error.hpp"

namespace sswt {

StandardizationParams fit_standardization(const TickSeries& train) {
  if (train.empty()) throw SizeError("cannot fit standardization on an empty series");
  const std::size_t d = train.dimension();
  const double n = static_cast<double>(train.size());
  StandardizationParams p{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (const auto& r : train.records)
    for (std::size_t j = 0; j < d; ++j) p.mean[j] += r.features[j];
  for (auto& m : p.mean) m /= n;
  for (const auto& r : train.records) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = r.features[j] - p.mean[j];
      p.std[j] += c * c;
    }
  }
  for (auto& s : p.std) {
    s = std::sqrt(s / n);
    if (!(s > 0.0)) s = 1.0;
  }
  return p;
}

namespace {

void require_dimension(const TickSeries& series, const StandardizationParams& params) {
  if (params.mean.size() != series.dimension() || params.std.size() != series.dimension()) {
    throw ShapeError("standardization has " + std::to_string(params.mean.size()) +
                     " features, series has " + std::to_string(series.dimension()));
  }
}

}  // namespace

TickSeries standardize(const TickSeries& series, const StandardizationParams& params) {
  require_dimension(series, params);
  TickSeries out = series;
  for (auto& r : out.records)
    for (std::size_t j = 0; j < r.features.size(); ++j)
      r.features[j] = (r.features[j] - params.mean[j]) / params.std[j];
  return out;
}

TickSeries unstandardize(const TickSeries& series, const StandardizationParams& params) {
  require_dimension(series, params);
  TickSeries out = series;
  for (auto& r : out.records)
    for (std::size_t j = 0; j < r.features.size(); ++j)
      r.features[j] = r.features[j] * params.std[j] + params.mean[j];
  return out;
}

void WindowSpec::validate() const {
  if (lengths.empty()) throw ConfigError("window spec needs at least one length");
  if (stride == 0) throw ConfigError("window stride must be positive");
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    if (lengths[k] == 0) throw ConfigError("window lengths must be positive");
    if (k > 0 && lengths[k] <= lengths[k - 1]) {
      throw ConfigError("window lengths must be strictly increasing");
    }
  }
}

std::size_t window_count(std::size_t series_length, const WindowSpec& spec) {
  if (series_length < spec.longest()) return 0;
  return (series_length - spec.longest()) / spec.stride + 1;
}

namespace {

int window_label(const TickSeries& series, std::size_t anchor, const WindowSpec& spec) {
  std::size_t span = 1;
  switch (spec.label_rule) {
    case LabelRule::shortest_span: span = spec.lengths.front(); break;
    case LabelRule::longest_span: span = spec.lengths.back(); break;
    case LabelRule::anchor_tick: span = 1; break;
  }
  for (std::size_t t = anchor + 1 - span; t <= anchor; ++t) {
    if (series.records[t].label != 0) return 1;
  }
  return 0;
}

Matrix slice_rows(const TickSeries& series, std::size_t first, std::size_t count) {
  const std::size_t d = series.dimension();
  Matrix m(count, d);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& f = series.records[first + i].features;
    std::copy(f.begin(), f.end(), m.row(i).begin());
  }
  return m;
}

}  // namespace

WindowSet build_windows(const TickSeries& series, const WindowSpec& spec) {
  spec.validate();
  WindowSet out;
  const std::size_t count = window_count(series.size(), spec);
  if (count == 0) {
    out.insufficient_data = true;
    return out;
  }
  out.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    WindowSample s;
    s.anchor = spec.longest() - 1 + i * spec.stride;
    for (std::size_t w : spec.lengths) s.slices.push_back(slice_rows(series, s.anchor + 1 - w, w));
    s.label = window_label(series, s.anchor, spec);
    out.samples.push_back(std::move(s));
  }
  return out;
}

PositionalEncoding positional_encoding(std::size_t length, std::size_t dimension) {
  PositionalEncoding pe{Matrix(length, dimension)};
  for (std::size_t pos = 0; pos < length; ++pos) {
    for (std::size_t c = 0; c < dimension; ++c) {
      const double j2 = static_cast<double>(c - c % 2);
      const double angle =
          static_cast<double>(pos) / std::pow(10000.0, j2 / static_cast<double>(dimension));
      pe.table(pos, c) = c % 2 == 0 ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

std::vector<PositionalEncoding> positional_encodings(const WindowSpec& spec, std::size_t dimension) {
  std::vector<PositionalEncoding> tables;
  for (std::size_t w : spec.lengths) tables.push_back(positional_encoding(w, dimension));
  return tables;
}

std::vector<Matrix> encode(const WindowSample& sample, std::span<const PositionalEncoding> tables) {
  if (tables.size() != sample.slices.size()) {
    throw ShapeError("encode: " + std::to_string(tables.size()) + " tables for " +
                     std::to_string(sample.slices.size()) + " slices");
  }
  std::vector<Matrix> out;
  out.reserve(tables.size());
  for (std::size_t k = 0; k < tables.size(); ++k) out.push_back(add(sample.slices[k], tables[k].table));
  return out;
}

std::vector<EncodedSample> encode_windows(const TickSeries& series, const WindowSpec& spec) {
  auto windows = build_windows(series, spec);
  const auto tables = positional_encodings(spec, series.dimension());
  std::vector<EncodedSample> out;
  out.reserve(windows.samples.size());
  for (auto& w : windows.samples) {
    EncodedSample e{w.anchor, encode(w, tables), w.label};
    w.slices.clear();
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace sswt
