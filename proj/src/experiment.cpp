#include "sswt/experiment.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <memory>

#include "sswt/error.hpp"

namespace sswt {

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<int> labels_of(std::span<const EncodedSample> windows) {
  std::vector<int> labels;
  labels.reserve(windows.size());
  for (const auto& w : windows) labels.push_back(w.label);
  return labels;
}

}  // namespace

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "unknown";
}

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "validation") return Split::validation;
  if (name == "test") return Split::test;
  throw ConfigError("unknown split '" + name + "' (expected train, validation or test)");
}

const std::vector<EncodedSample>& PreparedData::windows(Split s) const {
  switch (s) {
    case Split::train: return train;
    case Split::validation: return validation;
    case Split::test: return test;
  }
  return test;
}

const TickSeries& PreparedData::series(Split s) const {
  switch (s) {
    case Split::train: return raw.train;
    case Split::validation: return raw.validation;
    case Split::test: return raw.test;
  }
  return raw.test;
}

PreparedData prepare_data(const TickSeries& series, const WindowSpec& spec) {
  spec.validate();
  PreparedData data;
  data.raw = split_chronological(series);
  data.standardization = fit_standardization(data.raw.train);
  data.train = encode_windows(standardize(data.raw.train, data.standardization), spec);
  data.validation = encode_windows(standardize(data.raw.validation, data.standardization), spec);
  data.test = encode_windows(standardize(data.raw.test, data.standardization), spec);
  return data;
}

ModelConfig resolve_model_config(const ExperimentConfig& cfg, std::size_t dimension) {
  ModelConfig m = cfg.model;
  m.d = dimension;
  m.stages = cfg.windows.lengths.size();
  m.validate();
  return m;
}

RunResult run_experiment(const PreparedData& data, const ExperimentConfig& cfg) {
  const ModelConfig model_cfg = resolve_model_config(cfg, data.raw.train.dimension());
  RunResult r;
  r.fit = fit(data.train, data.validation, model_cfg, cfg.train);
  r.checkpoint.windows = cfg.windows;
  r.checkpoint.model = model_cfg;
  r.checkpoint.standardization = data.standardization;
  r.checkpoint.params = r.fit.params;
  r.checkpoint.threshold = r.fit.threshold.tau;
  r.checkpoint.pos_weight = r.fit.pos_weight;
  r.checkpoint.best_epoch = r.fit.best_epoch;
  r.test = evaluate(r.checkpoint, data.test);
  return r;
}

RunResult run_experiment(const TickSeries& series, const ExperimentConfig& cfg) {
  return run_experiment(prepare_data(series, cfg.windows), cfg);
}

std::vector<EncodedSample> checkpoint_windows(const Checkpoint& ckpt, const TickSeries& split) {
  return encode_windows(standardize(split, ckpt.standardization), ckpt.windows);
}

MetricsReport evaluate(const Checkpoint& ckpt, std::span<const EncodedSample> windows) {
  if (windows.empty()) throw SizeError("no windows to evaluate");
  const auto scores = score_all(windows, ckpt.params, ckpt.model);
  return evaluate_scores(scores, labels_of(windows), ckpt.threshold);
}

nlohmann::ordered_json to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["accuracy"] = report.accuracy;
  j["f1"] = report.f1;
  j["auc_roc"] = report.auc_roc ? nlohmann::ordered_json(*report.auc_roc) : nlohmann::ordered_json(nullptr);
  j["confusion"] = {{"tp", report.confusion.tp},
                    {"fp", report.confusion.fp},
                    {"tn", report.confusion.tn},
                    {"fn", report.confusion.fn}};
  j["threshold"] = report.threshold;
  j["samples"] = report.samples;
  if (!report.auc_roc) {
    j["warnings"] = nlohmann::ordered_json::array({"auc_roc undefined: evaluated windows hold a single class"});
  }
  return j;
}

void write_report_json(const MetricsReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(report).dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------

std::string to_string(AblationVariant v) {
  switch (v) {
    case AblationVariant::full: return "full";
    case AblationVariant::no_staged_windows: return "no_staged_windows";
    case AblationVariant::no_sliding_windows: return "no_sliding_windows";
    case AblationVariant::no_weighted_attention: return "no_weighted_attention";
  }
  return "unknown";
}

ExperimentConfig variant_config(const ExperimentConfig& base, AblationVariant v) {
  ExperimentConfig cfg = base;
  switch (v) {
    case AblationVariant::full: break;
    case AblationVariant::no_staged_windows:
      cfg.windows.lengths = {base.windows.lengths.front()};
      break;
    case AblationVariant::no_sliding_windows:
      cfg.windows.stride = base.windows.lengths.front();
      break;
    case AblationVariant::no_weighted_attention:
      cfg.model.use_weighted_attention = false;
      break;
  }
  cfg.model.stages = cfg.windows.lengths.size();
  return cfg;
}

AblationSummary ablate(const TickSeries& series, const ExperimentConfig& base,
                       std::span<const std::uint64_t> seeds) {
  // Window sets depend only on the window spec; build each distinct one once.
  std::map<std::pair<std::vector<std::size_t>, std::size_t>, std::shared_ptr<const PreparedData>> cache;
  auto prepared_for = [&](const WindowSpec& spec) {
    auto key = std::make_pair(spec.lengths, spec.stride);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, std::make_shared<const PreparedData>(prepare_data(series, spec))).first;
    }
    return it->second;
  };

  AblationSummary summary;
  for (std::uint64_t seed : seeds) {
    AblationTable table;
    table.seed = seed;
    for (std::size_t i = 0; i < kAblationVariants.size(); ++i) {
      ExperimentConfig cfg = variant_config(base, kAblationVariants[i]);
      cfg.train.seed = seed;
      try {
        table.rows[i].report = run_experiment(*prepared_for(cfg.windows), cfg).test;
      } catch (const std::exception& e) {
        table.rows[i].error = e.what();
      }
    }
    summary.per_seed.push_back(std::move(table));
  }

  for (std::size_t i = 0; i < kAblationVariants.size(); ++i) {
    AblationMean& m = summary.mean[i];
    for (const auto& table : summary.per_seed) {
      const auto& report = table.rows[i].report;
      if (!report) continue;
      m.accuracy += report->accuracy;
      m.f1 += report->f1;
      ++m.runs;
      if (report->auc_roc) {
        m.auc_roc += *report->auc_roc;
        ++m.auc_runs;
      }
    }
    if (m.runs > 0) {
      m.accuracy /= static_cast<double>(m.runs);
      m.f1 /= static_cast<double>(m.runs);
    }
    if (m.auc_runs > 0) m.auc_roc /= static_cast<double>(m.auc_runs);
  }
  return summary;
}

void write_ablation_csv(const AblationSummary& summary, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "seed,variant,accuracy,f1,auc_roc,tp,fp,tn,fn,threshold,error\n";
  for (const auto& table : summary.per_seed) {
    for (std::size_t i = 0; i < kAblationVariants.size(); ++i) {
      const auto& row = table.rows[i];
      out << table.seed << ',' << to_string(kAblationVariants[i]) << ',';
      if (row.report) {
        const auto& r = *row.report;
        out << format_double(r.accuracy) << ',' << format_double(r.f1) << ','
            << (r.auc_roc ? format_double(*r.auc_roc) : "") << ',' << r.confusion.tp << ','
            << r.confusion.fp << ',' << r.confusion.tn << ',' << r.confusion.fn << ','
            << format_double(r.threshold) << ",\n";
      } else {
        std::string msg = row.error;
        for (char& c : msg) {
          if (c == ',' || c == '\n') c = ';';
        }
        out << ",,,,,,,," << msg << '\n';
      }
    }
  }
  for (std::size_t i = 0; i < kAblationVariants.size(); ++i) {
    const auto& m = summary.mean[i];
    out << "mean," << to_string(kAblationVariants[i]) << ',';
    if (m.runs > 0) {
      out << format_double(m.accuracy) << ',' << format_double(m.f1) << ','
          << (m.auc_runs > 0 ? format_double(m.auc_roc) : "") << ",,,,,,\n";
    } else {
      out << ",,,,,,,,no successful runs\n";
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------

TimelineExport make_timeline(const Checkpoint& ckpt, std::span<const EncodedSample> windows,
                             const TickSeries& split) {
  TimelineExport timeline;
  timeline.threshold = ckpt.threshold;
  timeline.rows.reserve(windows.size());
  for (const auto& w : windows) {
    if (w.anchor >= split.size()) {
      throw SizeError("window anchor " + std::to_string(w.anchor) + " beyond series of " +
                      std::to_string(split.size()) + " ticks");
    }
    const double p = forward(w.stages, ckpt.params, ckpt.model);
    timeline.rows.push_back({split.records[w.anchor].timestamp_ms, p, p > ckpt.threshold ? 1 : 0, w.label});
  }
  return timeline;
}

void write_timeline_csv(const TimelineExport& timeline, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "timestamp,probability,predicted,actual\n";
  for (const auto& r : timeline.rows) {
    out << r.timestamp_ms << ',' << format_double(r.probability) << ',' << r.predicted << ','
        << r.actual << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void export_depth(const TickSeries& series, const std::filesystem::path& path) {
  series.validate();
  write_csv(series, path);
}

}  // namespace sswt
