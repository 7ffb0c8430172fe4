#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sswt {

struct TickRecord {
  std::int64_t timestamp_ms = 0;
  std::vector<double> features;
  int label = 0;

  friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

/// Ordered, strictly increasing timestamps; every record has `dimension()` features.
struct TickSeries {
  std::vector<std::string> feature_names;
  std::vector<TickRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
  std::size_t dimension() const noexcept { return feature_names.size(); }

  /// Throws if the invariants above (or label ∈ {0,1}, finite features) are violated.
  void validate() const;

  friend bool operator==(const TickSeries&, const TickSeries&) = default;
};

/// Reads `timestamp,label,f1,...,fd`. Feature column names are free-form but the
/// first two columns must be `timestamp` and `label`.
TickSeries load_csv(const std::filesystem::path& path);
TickSeries parse_csv(std::istream& in);

/// Writes the same layout; decimals use the shortest representation that
/// parses back to the identical double.
void write_csv(const TickSeries& series, const std::filesystem::path& path);
void write_csv(const TickSeries& series, std::ostream& out);

// ---------------------------------------------------------------------------
// Synthetic order-book generator
// ---------------------------------------------------------------------------

enum class Archetype { liquidity_exhaustion, spread_spike, volume_imbalance, flash_crash };

inline constexpr std::array<Archetype, 4> kArchetypes = {
    Archetype::liquidity_exhaustion, Archetype::spread_spike, Archetype::volume_imbalance,
    Archetype::flash_crash};

std::string to_string(Archetype a);

/// Synthetic schema: bid depth L1-L4, ask depth L1-L4, trade volume, spread.
inline constexpr std::size_t kSyntheticDimension = 10;
std::vector<std::string> synthetic_feature_names();

struct SynthConfig {
  std::size_t length = 100'000;
  std::size_t dimension = kSyntheticDimension;
  double base_mid_price = 1.1;
  double anomaly_rate = 0.005;
  /// Proportions in kArchetypes order.
  std::array<double, 4> archetype_mix = {0.25, 0.25, 0.25, 0.25};
  std::uint64_t seed = 42;

  void validate() const;
};

struct Episode {
  Archetype kind;
  std::size_t begin;  // first labeled tick
  std::size_t end;    // one past the last labeled tick
};

struct SyntheticDataset {
  TickSeries series;
  std::vector<Episode> episodes;
  /// Latent mid price per tick (not a feature; kept for inspection).
  std::vector<double> mid_price;
};

SyntheticDataset generate_synthetic(const SynthConfig& cfg);

// ---------------------------------------------------------------------------

struct SplitSeries {
  TickSeries train;
  TickSeries validation;
  TickSeries test;
};

/// First floor(0.70·T) ticks, next floor(0.15·T), remainder.
SplitSeries split_chronological(const TickSeries& series);

}  // namespace sswt
