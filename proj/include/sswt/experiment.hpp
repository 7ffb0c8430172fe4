#pragma once

// End-to-end runs: data preparation, training + test evaluation, the
// four-variant ablation harness, and CSV/JSON exports.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sswt/checkpoint.hpp"
#include "sswt/config.hpp"
#include "sswt/dataio.hpp"
#include "sswt/metrics.hpp"
#include "sswt/pipeline.hpp"
#include "sswt/training.hpp"

namespace sswt {

enum class Split { train, validation, test };

std::string to_string(Split s);
Split split_from_string(const std::string& name);

/// Chronological split, train-fitted standardization, and encoded windows per split.
struct PreparedData {
  SplitSeries raw;
  StandardizationParams standardization;
  std::vector<EncodedSample> train;
  std::vector<EncodedSample> validation;
  std::vector<EncodedSample> test;

  const std::vector<EncodedSample>& windows(Split s) const;
  const TickSeries& series(Split s) const;
};

PreparedData prepare_data(const TickSeries& series, const WindowSpec& spec);

/// Copies `cfg.model` with d and the stage count taken from the data/windows.
ModelConfig resolve_model_config(const ExperimentConfig& cfg, std::size_t dimension);

struct RunResult {
  FitResult fit;
  Checkpoint checkpoint;
  MetricsReport test;
};

/// Fit on train/validation windows and evaluate on test at the selected τ.
RunResult run_experiment(const PreparedData& data, const ExperimentConfig& cfg);
RunResult run_experiment(const TickSeries& series, const ExperimentConfig& cfg);

/// Standardizes `split` with the checkpoint's statistics and encodes windows.
std::vector<EncodedSample> checkpoint_windows(const Checkpoint& ckpt, const TickSeries& split);

MetricsReport evaluate(const Checkpoint& ckpt, std::span<const EncodedSample> windows);

nlohmann::ordered_json to_json(const MetricsReport& report);
void write_report_json(const MetricsReport& report, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Ablation
// ---------------------------------------------------------------------------

enum class AblationVariant { full, no_staged_windows, no_sliding_windows, no_weighted_attention };

inline constexpr std::array<AblationVariant, 4> kAblationVariants = {
    AblationVariant::full, AblationVariant::no_staged_windows, AblationVariant::no_sliding_windows,
    AblationVariant::no_weighted_attention};

std::string to_string(AblationVariant v);

/// full: unchanged. no_staged_windows: only the shortest length (K = 1).
/// no_sliding_windows: stride = shortest length (non-overlapping).
/// no_weighted_attention: plain softmax(QKᵀ/√d_k)V.
ExperimentConfig variant_config(const ExperimentConfig& base, AblationVariant v);

struct AblationEntry {
  std::optional<MetricsReport> report;
  std::string error;  // set when the variant failed to train/evaluate
};

struct AblationTable {
  std::uint64_t seed = 0;
  std::array<AblationEntry, 4> rows;  // kAblationVariants order
};

struct AblationMean {
  double accuracy = 0.0;
  double f1 = 0.0;
  double auc_roc = 0.0;
  std::size_t runs = 0;      // successful runs averaged (AUC needs both classes)
  std::size_t auc_runs = 0;
};

struct AblationSummary {
  std::vector<AblationTable> per_seed;
  std::array<AblationMean, 4> mean;
};

/// Trains and evaluates every variant for every seed on identical splits.
/// A failing row is recorded and does not abort the others.
AblationSummary ablate(const TickSeries& series, const ExperimentConfig& base,
                       std::span<const std::uint64_t> seeds);

/// `seed,variant,accuracy,f1,auc_roc,tp,fp,tn,fn,threshold,error`, per-seed rows
/// then `mean` rows.
void write_ablation_csv(const AblationSummary& summary, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

struct TimelineRow {
  std::int64_t timestamp_ms = 0;
  double probability = 0.0;
  int predicted = 0;
  int actual = 0;
};

struct TimelineExport {
  double threshold = 0.5;
  std::vector<TimelineRow> rows;
};

/// One row per window, at the anchor tick's timestamp, in anchor order.
TimelineExport make_timeline(const Checkpoint& ckpt, std::span<const EncodedSample> windows,
                             const TickSeries& split);
/// `timestamp,probability,predicted,actual`.
void write_timeline_csv(const TimelineExport& timeline, const std::filesystem::path& path);

/// Per-tick depth levels, volume and spread in the ingest CSV layout.
void export_depth(const TickSeries& series, const std::filesystem::path& path);

}  // namespace sswt
