// Command-line front end: synthesize recordings, process them into motion
// frames and features, build datasets, train and evaluate the classifier
// hierarchy, and render result reports.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ultragest/config.hpp"
#include "ultragest/errors.hpp"
#include "ultragest/eval.hpp"
#include "ultragest/framestack.hpp"
#include "ultragest/wav.hpp"

namespace fs = std::filesystem;
using namespace ultragest;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct GlobalOptions {
  std::optional<fs::path> config_path;
};

RunConfig load_config(const GlobalOptions& opts) { return load_run_config(opts.config_path); }

void write_json_file(const fs::path& path, const Json& j) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << j.dump(2) << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

Waveform concatenate(const std::vector<Waveform>& blocks) {
  Waveform out;
  if (blocks.empty()) return out;
  out.sample_rate_hz = blocks.front().sample_rate_hz;
  for (const auto& b : blocks)
    out.samples.insert(out.samples.end(), b.samples.begin(), b.samples.end());
  return out;
}

int cmd_synth(const GlobalOptions& opts, const std::string& gesture_name, std::uint64_t seed,
              std::size_t rep, const fs::path& out_path, const std::string& format_name) {
  RunConfig config = load_config(opts);
  if (!format_name.empty()) config.wav_format = wav_format_from_string(format_name);
  const GestureKind gesture = gesture_from_string(gesture_name);

  DatasetSpec spec = config.dataset;
  spec.master_seed = seed;
  const Scene scene = make_scene(spec, gesture, rep);
  const std::vector<Waveform> blocks = simulate_gesture(scene, config.pulse);
  const Waveform recording = concatenate(blocks);

  write_wav(out_path, recording, config.wav_format);

  Json meta{{"schema_version", 1},
            {"type", "ultragest-recording"},
            {"gesture", to_string(gesture)},
            {"seed", seed},
            {"repetition", rep},
            {"wav_format", to_string(config.wav_format)},
            {"samples", recording.samples.size()},
            {"scene", to_json(scene)}};
  fs::path meta_path = out_path;
  meta_path.replace_extension(".meta.json");
  write_json_file(meta_path, meta);

  fs::path config_path = out_path;
  config_path.replace_extension(".config.json");
  write_run_config(config_path, config);

  std::cout << "wrote " << out_path.string() << " (" << recording.samples.size()
            << " samples), sidecar " << meta_path.string() << "\n";
  return 0;
}

int cmd_process(const GlobalOptions& opts, const fs::path& in_path, const fs::path& out_dir) {
  const RunConfig config = load_config(opts);
  const Waveform recording = read_wav(in_path);
  if (std::llround(recording.sample_rate_hz) != std::llround(config.pulse.sample_rate_hz))
    throw DataError("sample-rate-mismatch: wav has " +
                    std::to_string(std::llround(recording.sample_rate_hz)) + " Hz, config expects " +
                    std::to_string(std::llround(config.pulse.sample_rate_hz)) + " Hz");

  const std::size_t block_len = config.pulse.samples_per_block();
  const std::size_t n_blocks = recording.samples.size() / block_len;
  if (n_blocks == 0)
    throw DataError("recording shorter than one pulse block (" + std::to_string(block_len) +
                    " samples)");

  std::vector<Waveform> blocks;
  blocks.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    Waveform block;
    block.sample_rate_hz = recording.sample_rate_hz;
    block.samples.assign(recording.samples.begin() + static_cast<std::ptrdiff_t>(b * block_len),
                         recording.samples.begin() +
                             static_cast<std::ptrdiff_t>((b + 1) * block_len));
    blocks.push_back(std::move(block));
  }

  const MotionProfile profile = assemble_profile(blocks, config.pulse, config.dsp);

  fs::create_directories(out_dir);
  write_framestack(out_dir / "frames.ugfs", profile.frames, config.pulse.sample_rate_hz);

  const FeatureConfig& fc = config.features;
  const MotionProfile fixed = normalize_length(profile, fc.profile_len);
  const auto rss = flatten_features(rss_vector(fixed, fc.peaks_per_frame), fc.norm);
  const auto range = flatten_features(range_matrix(fixed, fc.peaks_per_frame), fc.norm);
  write_features_csv(out_dir / "features_rss.csv", {{"unlabeled", rss.values}});
  write_features_csv(out_dir / "features_range.csv", {{"unlabeled", range.values}});
  write_run_config(out_dir / "run_config.json", config);

  std::cout << "processed " << n_blocks << " blocks -> " << (out_dir / "frames.ugfs").string()
            << "\n";
  return 0;
}

int cmd_dataset(const GlobalOptions& opts, const fs::path& out_dir) {
  const RunConfig config = load_config(opts);
  const Dataset dataset = build_dataset(config.dataset, config.pulse, config.dsp);
  save_dataset(out_dir, dataset);
  write_run_config(out_dir / "run_config.json", config);
  std::cout << "wrote " << dataset.entries.size() << " profiles to " << out_dir.string() << "\n";
  return 0;
}

Dataset obtain_dataset(const RunConfig& config, const std::string& dataset_arg) {
  if (dataset_arg.empty()) return build_dataset(config.dataset, config.pulse, config.dsp);
  return load_dataset(dataset_arg);
}

int cmd_train(const GlobalOptions& opts, const std::string& dataset_arg, const fs::path& out_path,
              bool run_grid_search) {
  RunConfig config = load_config(opts);
  const Dataset dataset = obtain_dataset(config, dataset_arg);

  if (run_grid_search) {
    const GridSearchResult grid = grid_search(dataset, config.training(), {2, 3}, {1.0, 10.0, 100.0},
                                              config.test_fraction, config.folds);
    std::cout << "grid search:\n";
    for (const auto& [degree, gamma, accuracy] : grid.table)
      std::cout << "  degree " << degree << "  gamma " << gamma << "  accuracy " << accuracy
                << "\n";
    std::cout << "selected degree " << grid.degree << ", gamma " << grid.gamma << "\n";
    config.kernel.degree = grid.degree;
    config.gamma = grid.gamma;
  }

  std::vector<GestureFeatures> features;
  std::vector<GestureKind> labels;
  features.reserve(dataset.entries.size());
  for (const auto& entry : dataset.entries) {
    features.push_back(extract_features(entry.profile, config.features));
    labels.push_back(entry.label);
  }
  const HierarchyModel model = train_hierarchy(features, labels, config.training());
  save_hierarchy(out_path, model);

  fs::path config_path = out_path;
  config_path.replace_extension(".config.json");
  write_run_config(config_path, config);
  std::cout << "trained hierarchy on " << dataset.entries.size() << " profiles -> "
            << out_path.string() << "\n";
  return 0;
}

int cmd_eval(const GlobalOptions& opts, const std::string& dataset_arg,
             const std::string& model_arg, const fs::path& out_dir,
             std::optional<std::size_t> folds_arg, std::optional<double> fraction_arg,
             bool single_split) {
  RunConfig config = load_config(opts);
  if (folds_arg) config.folds = *folds_arg;
  if (fraction_arg) config.test_fraction = *fraction_arg;
  if (single_split) config.folds = 1;

  CrossValidationResult result;
  if (!model_arg.empty()) {
    const HierarchyModel model = load_hierarchy(model_arg);
    result = evaluate_model(obtain_dataset(config, dataset_arg), model);
  } else {
    result = cross_validate(obtain_dataset(config, dataset_arg), config.training(),
                            config.test_fraction, config.folds);
  }

  write_report(out_dir, result);
  write_run_config(out_dir / "run_config.json", config);
  std::cout << format_report(result);
  std::cout << "report written to " << out_dir.string() << "\n";
  return 0;
}

int cmd_report(const fs::path& results_dir) {
  const fs::path metrics_path = results_dir / "metrics.json";
  std::ifstream f(metrics_path);
  if (!f) throw IoError("cannot open " + metrics_path.string());
  Json j;
  try {
    f >> j;
  } catch (const Json::exception& e) {
    throw DataError("metrics parse error: " + std::string(e.what()));
  }

  CrossValidationResult result;
  try {
    result.average_accuracy = j.at("average_accuracy").get<double>();
    result.folds = j.at("folds").get<std::size_t>();
    result.test_fraction = j.at("test_fraction").get<double>();
    result.fold_accuracies = j.at("fold_accuracies").get<std::vector<double>>();
    result.confusion.gesture_rejected = j.at("gesture_rejected").get<std::uint64_t>();
    result.confusion.no_gesture_total = j.at("no_gesture_total").get<std::uint64_t>();
    result.confusion.no_gesture_accepted = j.at("no_gesture_accepted").get<std::uint64_t>();
  } catch (const Json::exception& e) {
    throw DataError("metrics missing fields: " + std::string(e.what()));
  }

  const ConfusionCsv counts = read_confusion_csv(results_dir / "confusion_counts.csv");
  if (counts.values.size() != 5) throw DataError("confusion_counts.csv: expected 5 rows");
  for (std::size_t i = 0; i < 5; ++i) {
    if (counts.values[i].size() != 5) throw DataError("confusion_counts.csv: expected 5 columns");
    for (std::size_t k = 0; k < 5; ++k)
      result.confusion.counts[i][k] = static_cast<std::uint64_t>(counts.values[i][k]);
  }
  std::cout << format_report(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ultrasonic gesture recognition pipeline"};
  app.require_subcommand(1);

  GlobalOptions global;
  std::string config_arg;
  app.add_option("--config", config_arg,
                 "config file (falls back to $" + std::string(kConfigEnvVar) + ")");

  // synth
  auto* synth = app.add_subcommand("synth", "render one gesture recording to WAV");
  std::string synth_gesture = "fwd";
  std::uint64_t synth_seed = 1;
  std::size_t synth_rep = 0;
  std::string synth_out = "gesture.wav";
  std::string synth_format;
  synth->add_option("--gesture", synth_gesture, "fwd|fwd_bwd|swipe_ltr|swipe_rtl|hold_hand|no_gesture");
  synth->add_option("--seed", synth_seed, "scene seed");
  synth->add_option("--rep", synth_rep, "repetition index within the seed");
  synth->add_option("--out", synth_out, "output wav path");
  synth->add_option("--format", synth_format, "pcm16|float32 (default from config)");

  // process
  auto* process = app.add_subcommand("process", "wav -> motion frames + features");
  std::string process_in;
  std::string process_out = "processed";
  process->add_option("--in", process_in, "input wav")->required();
  process->add_option("--out", process_out, "output directory");

  // dataset
  auto* dataset_cmd = app.add_subcommand("dataset", "render the labeled synthetic dataset");
  std::string dataset_out = "dataset";
  dataset_cmd->add_option("--out", dataset_out, "output directory");

  // train
  auto* train = app.add_subcommand("train", "train the gesture hierarchy");
  std::string train_dataset;
  std::string train_out = "model.json";
  bool train_grid = false;
  train->add_option("--dataset", train_dataset,
                    "dataset manifest.json (omit to render the config's synthetic dataset)");
  train->add_option("--out", train_out, "model document path");
  train->add_flag("--grid-search", train_grid, "select degree/gamma by grid search first");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "cross-validate (or evaluate a saved model)");
  std::string eval_dataset;
  std::string eval_model;
  std::string eval_out = "results";
  std::optional<std::size_t> eval_folds;
  std::optional<double> eval_fraction;
  bool eval_single = false;
  eval_cmd->add_option("--dataset", eval_dataset,
                       "dataset manifest.json (omit to render the config's synthetic dataset)");
  eval_cmd->add_option("--model", eval_model, "saved model document to evaluate");
  eval_cmd->add_option("--out", eval_out, "results directory");
  eval_cmd->add_option("--folds", eval_folds, "number of repeated splits");
  eval_cmd->add_option("--test-fraction", eval_fraction, "held-out fraction per class");
  eval_cmd->add_flag("--single-split", eval_single, "one split only");

  // report
  auto* report = app.add_subcommand("report", "print the table for a results directory");
  std::string report_dir = "results";
  report->add_option("--results", report_dir, "results directory");

  // lets --config appear after the subcommand name as well
  for (auto* sub : {synth, process, dataset_cmd, train, eval_cmd, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (!config_arg.empty()) global.config_path = config_arg;

  try {
    if (synth->parsed())
      return cmd_synth(global, synth_gesture, synth_seed, synth_rep, synth_out, synth_format);
    if (process->parsed()) return cmd_process(global, process_in, process_out);
    if (dataset_cmd->parsed()) return cmd_dataset(global, dataset_out);
    if (train->parsed()) return cmd_train(global, train_dataset, train_out, train_grid);
    if (eval_cmd->parsed())
      return cmd_eval(global, eval_dataset, eval_model, eval_out, eval_folds, eval_fraction,
                      eval_single);
    if (report->parsed()) return cmd_report(report_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const IoError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
