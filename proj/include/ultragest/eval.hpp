#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ultragest/classifier.hpp"
#include "ultragest/dsp.hpp"
#include "ultragest/features.hpp"
#include "ultragest/simulator.hpp"

namespace ultragest {

/// Uniform jitter ranges applied per repetition when generating scenes.
struct JitterRanges {
  double position_m = 0.03;      // +/- on trajectory endpoints
  double hold_fraction = 0.08;   // +/-
  double time_skew = 0.15;       // +/-
  double reflection_low = 0.7;   // multiplier on the base reflection coefficient
  double reflection_high = 1.3;
  double tremor_low = 0.0008;
  double tremor_high = 0.0020;
  double tilt_low = 0.12;  // swipe plane tilt
  double tilt_high = 0.25;
  double wave_low = 0.006;  // swipe depth undulation amplitude
  double wave_high = 0.014;
  std::size_t clutter_min = 1;
  std::size_t clutter_max = 3;
  double clutter_gain_low = 0.01;
  double clutter_gain_high = 0.05;
  std::size_t multipath_min = 0;
  std::size_t multipath_max = 2;
  double multipath_gain_low = 0.10;
  double multipath_gain_high = 0.30;
  double si_gain_low = 0.5;
  double si_gain_high = 1.0;
};

/// Recipe for a labeled synthetic dataset. The master seed fully determines
/// every scene, so two builds from the same spec are identical.
struct DatasetSpec {
  std::size_t repetitions_per_gesture = 120;
  bool include_no_gesture = true;  // adds repetitions_per_gesture NoGesture recordings
  double noise_std = 0.22;  // receiver noise; default gives ~15 dB frame peak SNR at 0.30 m
  double reflection_coeff = 0.005;
  double duration_s = 2.0;
  std::size_t sub_reflectors = 0;
  JitterRanges jitter;
  std::uint64_t master_seed = 20211u;

  void validate() const;
};

/// One deterministic jittered scene for repetition `rep` of `gesture`.
Scene make_scene(const DatasetSpec& spec, GestureKind gesture, std::size_t rep);

struct DatasetEntry {
  MotionProfile profile;
  GestureKind label = GestureKind::NoGesture;
  std::uint64_t scene_seed = 0;
};

struct Dataset {
  DatasetSpec spec;
  PulseTrainConfig pulse;
  DspConfig dsp;
  std::vector<DatasetEntry> entries;
};

/// Renders the whole dataset through simulator -> correlation -> de-clutter.
/// Entries are ordered (gesture, repetition); rendering runs in parallel with
/// one seed-derived stream per entry.
Dataset build_dataset(const DatasetSpec& spec, const PulseTrainConfig& pulse,
                      const DspConfig& dsp);

/// 5x5 confusion counts over the gesture classes in the row/column order of
/// the reference results table: swipe_rtl, swipe_ltr, hold_hand, fwd_bwd, fwd.
/// Detection mistakes are tracked separately: a gesture classified as
/// NoGesture is a false reject (not a matrix entry), a NoGesture sample
/// classified as a gesture is a false accept.
struct ConfusionMatrix {
  static const std::array<GestureKind, 5>& class_order();
  static std::size_t class_index(GestureKind kind);  // throws for NoGesture

  std::array<std::array<std::uint64_t, 5>, 5> counts{};
  std::uint64_t gesture_rejected = 0;
  std::uint64_t no_gesture_total = 0;
  std::uint64_t no_gesture_accepted = 0;

  void add(GestureKind truth, GestureKind predicted);

  /// Row-normalised matrix; rows without samples stay all-zero.
  std::array<std::array<double, 5>, 5> normalized() const;
  std::uint64_t row_total(std::size_t row) const;
  double recall(std::size_t row) const;     // NaN when the row has no samples
  double precision(std::size_t col) const;  // NaN when nothing was predicted as col
  /// Mean of the normalised diagonal over rows that have samples.
  double average_accuracy() const;
  double false_accept_rate() const;  // NaN without NoGesture samples
  double false_reject_rate() const;  // NaN without gesture samples
};

struct CrossValidationResult {
  ConfusionMatrix confusion;
  double average_accuracy = 0.0;
  std::size_t folds = 0;
  double test_fraction = 0.0;
  std::vector<double> fold_accuracies;
};

/// Deterministic stratified split of entry indices into (train, test) for one
/// fold: test_fraction of every class, at least one example on each side.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const Dataset& dataset, double test_fraction, std::size_t fold);

/// Repeated stratified hold-out: per fold, test_fraction of every class
/// (at least one sample) is held out, the hierarchy is trained on the rest and
/// evaluated on the hold-out; predictions aggregate into one matrix.
/// folds = 1 reproduces a single split. Splits are deterministic in
/// (spec.master_seed, fold index).
CrossValidationResult cross_validate(const Dataset& dataset, const TrainingConfig& config,
                                     double test_fraction = 0.08, std::size_t folds = 12);

/// Evaluates an already trained model on every entry of the dataset.
CrossValidationResult evaluate_model(const Dataset& dataset, const HierarchyModel& model);

struct GridSearchResult {
  std::size_t degree = 0;
  double gamma = 0.0;
  double accuracy = 0.0;
  /// (degree, gamma, accuracy) for every grid point, in evaluation order.
  std::vector<std::tuple<std::size_t, double, double>> table;
};

GridSearchResult grid_search(const Dataset& dataset, const TrainingConfig& base,
                             const std::vector<std::size_t>& degrees,
                             const std::vector<double>& gammas, double test_fraction,
                             std::size_t folds);

/// Writes confusion.csv (row-normalised), confusion_counts.csv, metrics.json
/// and report.txt into `dir`.
void write_report(const std::filesystem::path& dir, const CrossValidationResult& result);

/// Renders the human-readable results table.
std::string format_report(const CrossValidationResult& result);

struct ConfusionCsv {
  std::vector<std::string> class_names;
  std::vector<std::vector<double>> values;
};

/// Writes a confusion CSV (header row, then one row per class). Values are
/// rendered as shortest round-trip decimals, so reading them back reproduces
/// the doubles bit-exactly.
void write_confusion_csv(const std::filesystem::path& path,
                         const std::vector<std::string>& class_names,
                         const std::vector<std::vector<double>>& rows);

/// Reads a confusion CSV written by write_confusion_csv (or shaped like one).
ConfusionCsv read_confusion_csv(const std::filesystem::path& path);

/// Dataset persistence: manifest.json plus one frame-stack file per entry.
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& manifest_path);

}  // namespace ultragest
