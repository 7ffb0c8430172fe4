#include "sswt/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "sswt/error.hpp"

namespace sswt {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

void TickSeries::validate() const {
  const std::size_t d = dimension();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.features.size() != d) {
      throw ShapeError("record " + std::to_string(i) + " has " +
                       std::to_string(r.features.size()) + " features, expected " +
                       std::to_string(d));
    }
    if (r.label != 0 && r.label != 1) {
      throw DomainError("record " + std::to_string(i) + " label must be 0 or 1");
    }
    for (double v : r.features) {
      if (!std::isfinite(v)) throw DomainError("record " + std::to_string(i) + " non-finite feature");
    }
    if (i > 0 && r.timestamp_ms <= records[i - 1].timestamp_ms) {
      throw OrderingError(i + 1, "timestamps not strictly increasing at row " +
                                     std::to_string(i + 1));
    }
  }
}

TickSeries parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("missing header row");
  const auto header = split_fields(line);
  if (header.size() < 3 || header[0] != "timestamp" || header[1] != "label") {
    throw SchemaError("header must start with timestamp,label and name at least one feature");
  }
  TickSeries series;
  for (std::size_t c = 2; c < header.size(); ++c) series.feature_names.emplace_back(header[c]);
  const std::size_t d = series.dimension();

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw SchemaError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                        " columns, header has " + std::to_string(header.size()));
    }
    TickRecord rec;
    if (!parse_number(fields[0], rec.timestamp_ms)) {
      throw ParseError(row, 1, "row " + std::to_string(row) + " column timestamp: cannot parse '" +
                                   std::string(fields[0]) + "'");
    }
    if (!parse_number(fields[1], rec.label) || (rec.label != 0 && rec.label != 1)) {
      throw ParseError(row, 2, "row " + std::to_string(row) + " column label: expected 0 or 1, got '" +
                                   std::string(fields[1]) + "'");
    }
    rec.features.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      if (!parse_number(fields[j + 2], rec.features[j]) || !std::isfinite(rec.features[j])) {
        throw ParseError(row, j + 3,
                         "row " + std::to_string(row) + " column " + series.feature_names[j] +
                             ": cannot parse '" + std::string(fields[j + 2]) + "'");
      }
    }
    if (!series.records.empty() && rec.timestamp_ms <= series.records.back().timestamp_ms) {
      throw OrderingError(row, "timestamp at row " + std::to_string(row) +
                                   " does not increase (" + std::to_string(rec.timestamp_ms) +
                                   " after " + std::to_string(series.records.back().timestamp_ms) +
                                   ")");
    }
    series.records.push_back(std::move(rec));
  }
  return series;
}

TickSeries load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_csv(in);
}

void write_csv(const TickSeries& series, std::ostream& out) {
  std::string line = "timestamp,label";
  for (const auto& name : series.feature_names) {
    line += ',';
    line += name;
  }
  out << line << '\n';
  for (const auto& r : series.records) {
    line = std::to_string(r.timestamp_ms);
    line += ',';
    line += std::to_string(r.label);
    for (double v : r.features) {
      line += ',';
      append_double(line, v);
    }
    out << line << '\n';
  }
}

void write_csv(const TickSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_csv(series, out);
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Synthetic generator
// ---------------------------------------------------------------------------

std::string to_string(Archetype a) {
  switch (a) {
    case Archetype::liquidity_exhaustion: return "liquidity_exhaustion";
    case Archetype::spread_spike: return "spread_spike";
    case Archetype::volume_imbalance: return "volume_imbalance";
    case Archetype::flash_crash: return "flash_crash";
  }
  return "unknown";
}

std::vector<std::string> synthetic_feature_names() {
  std::vector<std::string> names;
  for (std::size_t j = 1; j <= kSyntheticDimension; ++j) names.push_back("f" + std::to_string(j));
  return names;
}

void SynthConfig::validate() const {
  if (length < 100) throw ConfigError("synthetic length must be at least 100 ticks");
  if (dimension != kSyntheticDimension) {
    throw ConfigError("synthetic schema is fixed at dimension 10");
  }
  if (!(anomaly_rate >= 0.0 && anomaly_rate < 0.5)) {
    throw ConfigError("anomaly_rate must lie in [0, 0.5)");
  }
  if (!(base_mid_price > 0.0)) throw ConfigError("base_mid_price must be positive");
  double total = 0.0;
  for (double p : archetype_mix) {
    if (!(p >= 0.0)) throw ConfigError("archetype proportions must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("archetype proportions must sum to 1");
}

namespace {

constexpr std::int64_t kStartTimestampMs = 1'672'531'200'000;  // 2023-01-01T00:00:00Z
constexpr std::int64_t kTickMs = 1000;
constexpr std::size_t kEpisodeGap = 60;
constexpr std::size_t kFlashDropTicks = 3;

constexpr double kWalkStep = 5e-5;
constexpr double kBaseSpread = 1e-4;
constexpr double kBaseVolume = 1.5;
constexpr std::array<double, 4> kBaseDepth = {4.0, 6.0, 8.0, 10.0};

// feature column layout
constexpr std::size_t kBid = 0;
constexpr std::size_t kAsk = 4;
constexpr std::size_t kVolume = 8;
constexpr std::size_t kSpread = 9;

struct LengthRange {
  std::size_t min;
  std::size_t max;
};

LengthRange length_range(Archetype a) {
  switch (a) {
    case Archetype::liquidity_exhaustion: return {5, 30};
    case Archetype::spread_spike: return {2, 10};
    case Archetype::volume_imbalance: return {5, 20};
    case Archetype::flash_crash: return {kFlashDropTicks + 10, kFlashDropTicks + 60};
  }
  return {1, 1};
}

struct PlannedEpisode {
  Archetype kind;
  std::size_t length;
};

std::vector<PlannedEpisode> plan_episodes(const SynthConfig& cfg, std::mt19937_64& rng) {
  std::vector<PlannedEpisode> plan;
  const auto budget =
      static_cast<std::size_t>(std::floor(cfg.anomaly_rate * static_cast<double>(cfg.length)));
  std::discrete_distribution<std::size_t> pick(cfg.archetype_mix.begin(), cfg.archetype_mix.end());
  std::size_t used = 0;
  while (used < budget) {
    const Archetype kind = kArchetypes[pick(rng)];
    const auto range = length_range(kind);
    std::uniform_int_distribution<std::size_t> len_dist(range.min, range.max);
    std::size_t len = len_dist(rng);
    const std::size_t remaining = budget - used;
    if (len > remaining) {
      if (remaining < range.min) break;
      len = remaining;
    }
    plan.push_back({kind, len});
    used += len;
  }
  return plan;
}

std::vector<Episode> place_episodes(std::vector<PlannedEpisode> plan, std::size_t length,
                                    std::mt19937_64& rng) {
  auto footprint = [&](const std::vector<PlannedEpisode>& p) {
    std::size_t total = (p.size() + 1) * kEpisodeGap;
    for (const auto& e : p) total += e.length;
    return total;
  };
  while (!plan.empty() && footprint(plan) > length) plan.pop_back();
  if (plan.empty()) return {};

  const std::size_t slack = length - footprint(plan);
  std::uniform_int_distribution<std::size_t> offset_dist(0, slack);
  std::vector<std::size_t> offsets(plan.size());
  for (auto& o : offsets) o = offset_dist(rng);
  std::sort(offsets.begin(), offsets.end());

  std::vector<Episode> episodes;
  std::size_t cursor = kEpisodeGap;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const std::size_t begin = cursor + offsets[i];
    episodes.push_back({plan[i].kind, begin, begin + plan[i].length});
    cursor += plan[i].length + kEpisodeGap;
  }
  return episodes;
}

}  // namespace

SyntheticDataset generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  auto episodes = place_episodes(plan_episodes(cfg, rng), cfg.length, rng);

  const std::size_t T = cfg.length;
  SyntheticDataset out;
  out.series.feature_names = synthetic_feature_names();
  out.series.records.resize(T);
  out.mid_price.resize(T);

  // Base regime: log-AR(1) depth and spread, i.i.d. lognormal volume,
  // Gaussian random-walk mid price.
  constexpr double kDepthPhi = 0.95;
  constexpr double kDepthSigma = 0.15;
  constexpr double kSpreadPhi = 0.9;
  constexpr double kSpreadSigma = 0.1;
  constexpr double kVolumeSigma = 0.35;
  std::array<double, 8> depth_state{};
  double spread_state = 0.0;
  double mid = cfg.base_mid_price;
  const double depth_innov = kDepthSigma * std::sqrt(1.0 - kDepthPhi * kDepthPhi);
  const double spread_innov = kSpreadSigma * std::sqrt(1.0 - kSpreadPhi * kSpreadPhi);

  for (std::size_t t = 0; t < T; ++t) {
    auto& rec = out.series.records[t];
    rec.timestamp_ms = kStartTimestampMs + static_cast<std::int64_t>(t) * kTickMs;
    rec.features.assign(kSyntheticDimension, 0.0);
    for (std::size_t s = 0; s < 8; ++s) {
      depth_state[s] = kDepthPhi * depth_state[s] + depth_innov * normal(rng);
      rec.features[s] = kBaseDepth[s % 4] * std::exp(depth_state[s]);
    }
    rec.features[kVolume] = kBaseVolume * std::exp(kVolumeSigma * normal(rng));
    spread_state = kSpreadPhi * spread_state + spread_innov * normal(rng);
    rec.features[kSpread] = kBaseSpread * std::exp(spread_state);
    if (t > 0) mid += kWalkStep * normal(rng);
    out.mid_price[t] = mid;
  }

  for (const auto& ep : episodes) {
    const std::size_t len = ep.end - ep.begin;
    switch (ep.kind) {
      case Archetype::liquidity_exhaustion: {
        const double factor = uniform(0.05, 0.2);
        for (std::size_t t = ep.begin; t < ep.end; ++t) {
          auto& f = out.series.records[t].features;
          for (std::size_t level = 0; level < 3; ++level) {
            f[kBid + level] *= factor;
            f[kAsk + level] *= factor;
          }
        }
        break;
      }
      case Archetype::spread_spike: {
        const double factor = uniform(5.0, 20.0);
        for (std::size_t t = ep.begin; t < ep.end; ++t) {
          out.series.records[t].features[kSpread] *= factor;
        }
        break;
      }
      case Archetype::volume_imbalance: {
        const double factor = uniform(3.0, 8.0);
        const std::size_t side = unit(rng) < 0.5 ? kBid : kAsk;
        for (std::size_t t = ep.begin; t < ep.end; ++t) {
          auto& f = out.series.records[t].features;
          for (std::size_t level = 0; level < 4; ++level) f[side + level] *= factor;
          f[kVolume] *= factor;
        }
        break;
      }
      case Archetype::flash_crash: {
        // Fast drop of `steps` walk steps, then decay back toward the walk.
        // Stress intensity drives spread/volume up and bid depth down.
        const double steps = uniform(6.0, 10.0);
        const double spread_mult = uniform(4.0, 8.0);
        const double volume_mult = uniform(4.0, 8.0);
        const std::size_t drop = std::min(kFlashDropTicks, len);
        const std::size_t recovery = len - drop;
        for (std::size_t i = 0; i < len; ++i) {
          const std::size_t t = ep.begin + i;
          double offset;
          double stress;
          if (i < drop) {
            offset = -steps * kWalkStep * static_cast<double>(i + 1) / static_cast<double>(drop);
            stress = 1.0;
          } else {
            const double progress =
                static_cast<double>(i - drop + 1) / static_cast<double>(recovery);
            offset = -steps * kWalkStep * std::exp(-3.0 * progress);
            stress = 1.0 - 0.6 * progress;
          }
          out.mid_price[t] += offset;
          auto& f = out.series.records[t].features;
          f[kSpread] *= 1.0 + (spread_mult - 1.0) * stress;
          f[kVolume] *= 1.0 + (volume_mult - 1.0) * stress;
          for (std::size_t level = 0; level < 4; ++level) f[kBid + level] *= 1.0 - 0.7 * stress;
        }
        break;
      }
    }
    for (std::size_t t = ep.begin; t < ep.end; ++t) out.series.records[t].label = 1;
  }

  out.episodes = std::move(episodes);
  return out;
}

SplitSeries split_chronological(const TickSeries& series) {
  const std::size_t T = series.size();
  if (T < 20) throw SizeError("split needs at least 20 ticks, got " + std::to_string(T));
  const std::size_t n_train = 70 * T / 100;
  const std::size_t n_val = 15 * T / 100;
  SplitSeries out;
  for (auto* part : {&out.train, &out.validation, &out.test}) {
    part->feature_names = series.feature_names;
  }
  const auto first = series.records.begin();
  out.train.records.assign(first, first + static_cast<std::ptrdiff_t>(n_train));
  out.validation.records.assign(first + static_cast<std::ptrdiff_t>(n_train),
                                first + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test.records.assign(first + static_cast<std::ptrdiff_t>(n_train + n_val), series.records.end());
  return out;
}

}  // namespace sswt
