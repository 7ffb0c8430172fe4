// sswt: command-line front end for the staged sliding-window detector.
//
//   sswt synth  --config cfg.json --out data.csv
//   sswt train  --data data.csv --config cfg.json --out model.json [--history h.csv]
//   sswt eval   --data data.csv --model model.json --report report.json [--split test]
//   sswt detect --data data.csv --model model.json --timeline t.csv [--split test]
//   sswt ablate --data data.csv --config cfg.json --seeds 5 --report ablation.csv
//
// Failures print one line `error: <kind>: <message>` to stderr and exit 1.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sswt/checkpoint.hpp"
#include "sswt/config.hpp"
#include "sswt/dataio.hpp"
#include "sswt/error.hpp"
#include "sswt/experiment.hpp"

namespace {

using namespace sswt;

ExperimentConfig config_or_default(const std::string& path) {
  return path.empty() ? parse_config(nlohmann::json::object()) : load_config(path);
}

std::string one_line(std::string msg) {
  for (char& c : msg) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return msg;
}

int run_synth(const std::string& config_path, const std::string& out_path,
              const std::string& episodes_path) {
  const auto cfg = config_or_default(config_path);
  const auto data = generate_synthetic(cfg.synth);
  write_csv(data.series, out_path);
  if (!episodes_path.empty()) {
    std::ofstream ep(episodes_path, std::ios::binary);
    if (!ep) throw IoError("cannot write " + episodes_path);
    ep << "archetype,begin_tick,end_tick,begin_timestamp,end_timestamp\n";
    for (const auto& e : data.episodes) {
      ep << to_string(e.kind) << ',' << e.begin << ',' << e.end << ','
         << data.series.records[e.begin].timestamp_ms << ','
         << data.series.records[e.end - 1].timestamp_ms << '\n';
    }
  }
  std::size_t labeled = 0;
  for (const auto& r : data.series.records) labeled += static_cast<std::size_t>(r.label);
  std::cout << "wrote " << data.series.size() << " ticks, " << data.episodes.size()
            << " episodes, " << labeled << " labeled ticks to " << out_path << '\n';
  return 0;
}

int run_train(const std::string& data_path, const std::string& config_path,
              const std::string& out_path, const std::string& history_path) {
  const auto cfg = config_or_default(config_path);
  const auto series = load_csv(data_path);
  const auto result = run_experiment(series, cfg);
  save_checkpoint(result.checkpoint, out_path);
  if (!history_path.empty()) write_history_csv(result.fit.history, history_path);
  if (result.fit.threshold.single_class) {
    std::cerr << "warning: validation windows hold a single class; threshold defaulted to 0.5\n";
  }
  std::cout << "trained " << result.fit.history.size() << " epochs (best " << result.fit.best_epoch
            << "), threshold " << result.checkpoint.threshold << ", wrote " << out_path << '\n';
  return 0;
}

int run_eval(const std::string& data_path, const std::string& model_path,
             const std::string& report_path, const std::string& split_name) {
  const auto ckpt = load_checkpoint(model_path);
  const auto split = split_chronological(load_csv(data_path));
  const Split which = split_from_string(split_name);
  const TickSeries& part = which == Split::train ? split.train
                           : which == Split::validation ? split.validation
                                                        : split.test;
  const auto windows = checkpoint_windows(ckpt, part);
  const auto report = evaluate(ckpt, windows);
  write_report_json(report, report_path);
  std::cout << "accuracy " << report.accuracy << " f1 " << report.f1 << " auc_roc "
            << (report.auc_roc ? std::to_string(*report.auc_roc) : std::string("n/a")) << '\n';
  return 0;
}

int run_detect(const std::string& data_path, const std::string& model_path,
               const std::string& timeline_path, const std::string& split_name) {
  const auto ckpt = load_checkpoint(model_path);
  const auto split = split_chronological(load_csv(data_path));
  const Split which = split_from_string(split_name);
  const TickSeries& part = which == Split::train ? split.train
                           : which == Split::validation ? split.validation
                                                        : split.test;
  const auto windows = checkpoint_windows(ckpt, part);
  const auto timeline = make_timeline(ckpt, windows, part);
  write_timeline_csv(timeline, timeline_path);
  std::cout << "wrote " << timeline.rows.size() << " timeline rows to " << timeline_path << '\n';
  return 0;
}

int run_ablate(const std::string& data_path, const std::string& config_path, std::size_t n_seeds,
               const std::string& report_path) {
  const auto cfg = config_or_default(config_path);
  const auto series = load_csv(data_path);
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < n_seeds; ++i) seeds.push_back(cfg.train.seed + i);
  const auto summary = ablate(series, cfg, seeds);
  write_ablation_csv(summary, report_path);
  for (std::size_t i = 0; i < kAblationVariants.size(); ++i) {
    const auto& m = summary.mean[i];
    std::cout << to_string(kAblationVariants[i]) << ": mean accuracy " << m.accuracy << " f1 "
              << m.f1 << " auc_roc " << m.auc_roc << " (" << m.runs << " runs)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Staged sliding-window transformer anomaly detector"};
  app.require_subcommand(1);

  std::string config_path, data_path, out_path, model_path, report_path, timeline_path;
  std::string history_path, episodes_path;
  std::string split_name = "test";
  std::size_t n_seeds = 5;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic order-book dataset");
  synth->add_option("--config", config_path, "JSON config (synth section)");
  synth->add_option("--out", out_path, "Output CSV")->required();
  synth->add_option("--episodes", episodes_path, "Optional CSV of planted episodes");

  auto* train = app.add_subcommand("train", "Fit the model and select the threshold");
  train->add_option("--data", data_path, "Input CSV")->required();
  train->add_option("--config", config_path, "JSON config");
  train->add_option("--out", out_path, "Checkpoint path")->required();
  train->add_option("--history", history_path, "Optional training-history CSV");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint, writing a JSON metrics report");
  eval->add_option("--data", data_path, "Input CSV")->required();
  eval->add_option("--model", model_path, "Checkpoint")->required();
  eval->add_option("--report", report_path, "Output JSON")->required();
  eval->add_option("--split", split_name, "train, validation or test")->capture_default_str();

  auto* detect = app.add_subcommand("detect", "Export per-window anomaly probabilities");
  detect->add_option("--data", data_path, "Input CSV")->required();
  detect->add_option("--model", model_path, "Checkpoint")->required();
  detect->add_option("--timeline", timeline_path, "Output CSV")->required();
  detect->add_option("--split", split_name, "train, validation or test")->capture_default_str();

  auto* abl = app.add_subcommand("ablate", "Run the four-variant ablation");
  abl->add_option("--data", data_path, "Input CSV")->required();
  abl->add_option("--config", config_path, "JSON config");
  abl->add_option("--seeds", n_seeds, "Number of seeds (train.seed, train.seed+1, ...)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  abl->add_option("--report", report_path, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (synth->parsed()) return run_synth(config_path, out_path, episodes_path);
    if (train->parsed()) return run_train(data_path, config_path, out_path, history_path);
    if (eval->parsed()) return run_eval(data_path, model_path, report_path, split_name);
    if (detect->parsed()) return run_detect(data_path, model_path, timeline_path, split_name);
    if (abl->parsed()) return run_ablate(data_path, config_path, n_seeds, report_path);
  } catch (const sswt::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 1;
}
