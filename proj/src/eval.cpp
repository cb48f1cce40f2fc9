#include "ultragest/eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "ultragest/config.hpp"
#include "ultragest/errors.hpp"
#include "ultragest/framestack.hpp"
#include "ultragest/rng.hpp"

namespace ultragest {

namespace {

std::uint64_t gesture_salt(GestureKind g) {
  switch (g) {
    case GestureKind::Fwd: return 0;
    case GestureKind::FwdBwd: return 1;
    case GestureKind::SwipeLTR: return 2;
    case GestureKind::SwipeRTL: return 3;
    case GestureKind::HoldHand: return 4;
    case GestureKind::NoGesture: return 5;
  }
  return 6;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

void DatasetSpec::validate() const {
  if (repetitions_per_gesture < 1)
    throw ConfigError("dataset spec: repetitions_per_gesture must be >= 1");
  if (noise_std < 0.0) throw ConfigError("dataset spec: noise_std must be >= 0");
  if (!(reflection_coeff > 0.0) || reflection_coeff > 1.0)
    throw ConfigError("dataset spec: reflection_coeff must be in (0, 1]");
  if (!(duration_s > 0.0)) throw ConfigError("dataset spec: duration_s must be positive");
  if (sub_reflectors > 3) throw ConfigError("dataset spec: sub_reflectors must be <= 3");
  const auto& j = jitter;
  if (j.position_m < 0.0 || j.hold_fraction < 0.0 || j.time_skew < 0.0)
    throw ConfigError("dataset spec: jitter amplitudes must be >= 0");
  if (!(j.reflection_low > 0.0) || j.reflection_high < j.reflection_low)
    throw ConfigError("dataset spec: bad reflection jitter range");
  if (j.clutter_max < j.clutter_min || j.multipath_max < j.multipath_min)
    throw ConfigError("dataset spec: bad clutter/multipath count range");
}

Scene make_scene(const DatasetSpec& spec, GestureKind gesture, std::size_t rep) {
  spec.validate();
  Rng rng(derive_seed(spec.master_seed, gesture_salt(gesture) * 1'000'003ULL + rep));
  const auto& j = spec.jitter;

  Trajectory tr = Trajectory::for_gesture(gesture);
  tr.duration_s = spec.duration_s;
  if (gesture != GestureKind::NoGesture) {
    const bool swipe = gesture == GestureKind::SwipeLTR || gesture == GestureKind::SwipeRTL;
    if (swipe) {
      // both depth fields carry the (shared) mid-depth of the swipe plane
      const double mid = tr.start.depth_m + rng.uniform(-j.position_m, j.position_m);
      tr.start.depth_m = mid;
      tr.end.depth_m = mid;
      tr.start.lateral_m += rng.uniform(-j.position_m / 2, j.position_m / 2);
      tr.end.lateral_m += rng.uniform(-j.position_m / 2, j.position_m / 2);
      tr.swipe_tilt = rng.uniform(j.tilt_low, j.tilt_high);
      tr.wave_amp_m = rng.uniform(j.wave_low, j.wave_high);
      tr.wave_freq_hz = rng.uniform(1.3, 2.2);
      tr.wave_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    } else {
      tr.start.depth_m += rng.uniform(-j.position_m, j.position_m);
      tr.start.lateral_m += rng.uniform(-j.position_m, j.position_m);
      tr.end.depth_m += rng.uniform(-j.position_m, j.position_m);
      tr.end.lateral_m += rng.uniform(-j.position_m, j.position_m);
    }
    tr.hold_fraction =
        std::clamp(tr.hold_fraction + rng.uniform(-j.hold_fraction, j.hold_fraction), 0.05, 0.95);
    tr.time_skew = rng.uniform(-j.time_skew, j.time_skew);
    tr.tremor_amp_m = rng.uniform(j.tremor_low, j.tremor_high);
    tr.tremor_freq_hz = rng.uniform(3.5, 5.5);
    tr.tremor_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    tr.tremor_phase2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }

  Scene scene;
  scene.trajectory = tr;
  scene.reflection_coeff =
      spec.reflection_coeff * rng.uniform(j.reflection_low, j.reflection_high);
  scene.self_interference_gain = rng.uniform(j.si_gain_low, j.si_gain_high);
  const std::size_t n_clutter =
      j.clutter_min + rng.uniform_index(j.clutter_max - j.clutter_min + 1);
  for (std::size_t i = 0; i < n_clutter; ++i)
    scene.static_clutter.push_back(
        {rng.uniform(0.13, 0.47), rng.uniform(j.clutter_gain_low, j.clutter_gain_high)});
  const std::size_t n_multipath =
      j.multipath_min + rng.uniform_index(j.multipath_max - j.multipath_min + 1);
  for (std::size_t i = 0; i < n_multipath; ++i)
    scene.multipath.push_back({rng.uniform(0.3e-3, 1.1e-3),
                               rng.uniform(j.multipath_gain_low, j.multipath_gain_high)});
  scene.noise_std = spec.noise_std;
  scene.sub_reflectors = spec.sub_reflectors;
  scene.rng_seed = rng.next_u64();
  return scene;
}

Dataset build_dataset(const DatasetSpec& spec, const PulseTrainConfig& pulse,
                      const DspConfig& dsp) {
  spec.validate();
  pulse.validate();
  dsp.validate();

  std::vector<std::pair<GestureKind, std::size_t>> jobs;
  for (GestureKind g : gesture_classes())
    for (std::size_t rep = 0; rep < spec.repetitions_per_gesture; ++rep) jobs.push_back({g, rep});
  if (spec.include_no_gesture)
    for (std::size_t rep = 0; rep < spec.repetitions_per_gesture; ++rep)
      jobs.push_back({GestureKind::NoGesture, rep});

  Dataset dataset;
  dataset.spec = spec;
  dataset.pulse = pulse;
  dataset.dsp = dsp;
  dataset.entries.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    const BlockCorrelator correlate(pulse);
    const LagGate gate = dsp.gate(pulse);
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size() || failed.load()) break;
      try {
        const auto [gesture, rep] = jobs[i];
        const Scene scene = make_scene(spec, gesture, rep);
        DeclutterState state(dsp.clutter_factor);
        MotionProfile profile;
        profile.label = gesture;
        const std::size_t n_blocks = static_cast<std::size_t>(
            std::llround(spec.duration_s / pulse.block_len_s()));
        profile.frames.reserve(n_blocks);
        for (std::size_t b = 0; b < n_blocks; ++b) {
          const Waveform block = simulate_block(scene, pulse, b);
          profile.frames.push_back(declutter(state, correlate(block, b), gate));
        }
        dataset.entries[i] = DatasetEntry{std::move(profile), gesture, scene.rng_seed};
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        break;
      }
    }
  };

  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(),
                                                     jobs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return dataset;
}

const std::array<GestureKind, 5>& ConfusionMatrix::class_order() {
  static const std::array<GestureKind, 5> order = {GestureKind::SwipeRTL, GestureKind::SwipeLTR,
                                                   GestureKind::HoldHand, GestureKind::FwdBwd,
                                                   GestureKind::Fwd};
  return order;
}

std::size_t ConfusionMatrix::class_index(GestureKind kind) {
  const auto& order = class_order();
  for (std::size_t i = 0; i < order.size(); ++i)
    if (order[i] == kind) return i;
  throw DataError("confusion matrix: NoGesture has no row");
}

void ConfusionMatrix::add(GestureKind truth, GestureKind predicted) {
  if (truth == GestureKind::NoGesture) {
    ++no_gesture_total;
    if (predicted != GestureKind::NoGesture) ++no_gesture_accepted;
    return;
  }
  if (predicted == GestureKind::NoGesture) {
    ++gesture_rejected;
    return;
  }
  ++counts[class_index(truth)][class_index(predicted)];
}

std::uint64_t ConfusionMatrix::row_total(std::size_t row) const {
  std::uint64_t total = 0;
  for (std::uint64_t v : counts[row]) total += v;
  return total;
}

std::array<std::array<double, 5>, 5> ConfusionMatrix::normalized() const {
  std::array<std::array<double, 5>, 5> out{};
  for (std::size_t i = 0; i < 5; ++i) {
    const std::uint64_t total = row_total(i);
    if (total == 0) continue;
    for (std::size_t j = 0; j < 5; ++j)
      out[i][j] = static_cast<double>(counts[i][j]) / static_cast<double>(total);
  }
  return out;
}

double ConfusionMatrix::recall(std::size_t row) const {
  const std::uint64_t total = row_total(row);
  if (total == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(counts[row][row]) / static_cast<double>(total);
}

double ConfusionMatrix::precision(std::size_t col) const {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < 5; ++i) total += counts[i][col];
  if (total == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(counts[col][col]) / static_cast<double>(total);
}

double ConfusionMatrix::average_accuracy() const {
  double sum = 0.0;
  std::size_t rows = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    const double r = recall(i);
    if (!std::isnan(r)) {
      sum += r;
      ++rows;
    }
  }
  return rows > 0 ? sum / static_cast<double>(rows) : std::numeric_limits<double>::quiet_NaN();
}

double ConfusionMatrix::false_accept_rate() const {
  if (no_gesture_total == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(no_gesture_accepted) / static_cast<double>(no_gesture_total);
}

double ConfusionMatrix::false_reject_rate() const {
  std::uint64_t gestures = gesture_rejected;
  for (std::size_t i = 0; i < 5; ++i) gestures += row_total(i);
  if (gestures == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(gesture_rejected) / static_cast<double>(gestures);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const Dataset& dataset, double test_fraction, std::size_t fold) {
  if (!(test_fraction > 0.0) || !(test_fraction < 1.0))
    throw ConfigError("cross_validate: test_fraction must be in (0, 1)");

  std::vector<std::vector<std::size_t>> by_class(6);
  for (std::size_t i = 0; i < dataset.entries.size(); ++i)
    by_class[gesture_salt(dataset.entries[i].label)].push_back(i);

  std::vector<std::size_t> train, test;
  Rng rng(derive_seed(dataset.spec.master_seed, 0xC50F0ULL + fold));
  for (auto& members : by_class) {
    if (members.empty()) continue;
    if (members.size() < 2)
      throw DataError("class-missing-from-split: a class has fewer than 2 examples");
    // Fisher-Yates with the fold's stream
    for (std::size_t i = members.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i + 1));
      std::swap(members[i], members[j]);
    }
    std::size_t n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    test.insert(test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    train.insert(train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test),
                 members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

namespace {

std::vector<GestureFeatures> extract_all_features(const Dataset& dataset,
                                                  const FeatureConfig& config) {
  std::vector<GestureFeatures> features(dataset.entries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= dataset.entries.size()) break;
      features[i] = extract_features(dataset.entries[i].profile, config);
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(
      1, std::min<std::size_t>(std::thread::hardware_concurrency(), dataset.entries.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t + 1 < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  return features;
}

}  // namespace

CrossValidationResult cross_validate(const Dataset& dataset, const TrainingConfig& config,
                                     double test_fraction, std::size_t folds) {
  if (dataset.entries.empty()) throw DataError("cross_validate: empty dataset");
  if (folds < 1) throw ConfigError("cross_validate: folds must be >= 1");

  const std::vector<GestureFeatures> features = extract_all_features(dataset, config.features);

  CrossValidationResult result;
  result.folds = folds;
  result.test_fraction = test_fraction;

  for (std::size_t fold = 0; fold < folds; ++fold) {
    const auto [train_idx, test_idx] = stratified_split(dataset, test_fraction, fold);

    std::vector<GestureFeatures> train_features;
    std::vector<GestureKind> train_labels;
    train_features.reserve(train_idx.size());
    for (std::size_t i : train_idx) {
      train_features.push_back(features[i]);
      train_labels.push_back(dataset.entries[i].label);
    }
    const HierarchyModel model = train_hierarchy(train_features, train_labels, config);

    std::uint64_t fold_correct = 0, fold_gestures = 0;
    for (std::size_t i : test_idx) {
      const GestureKind truth = dataset.entries[i].label;
      const GestureKind predicted = classify_gesture(model, features[i]);
      result.confusion.add(truth, predicted);
      if (truth != GestureKind::NoGesture) {
        ++fold_gestures;
        if (predicted == truth) ++fold_correct;
      }
    }
    result.fold_accuracies.push_back(
        fold_gestures > 0 ? static_cast<double>(fold_correct) / static_cast<double>(fold_gestures)
                          : std::numeric_limits<double>::quiet_NaN());
  }
  result.average_accuracy = result.confusion.average_accuracy();
  return result;
}

CrossValidationResult evaluate_model(const Dataset& dataset, const HierarchyModel& model) {
  if (dataset.entries.empty()) throw DataError("evaluate_model: empty dataset");
  const std::vector<GestureFeatures> features = extract_all_features(dataset, model.features);

  CrossValidationResult result;
  result.folds = 1;
  result.test_fraction = 1.0;
  std::uint64_t correct = 0, gestures = 0;
  for (std::size_t i = 0; i < dataset.entries.size(); ++i) {
    const GestureKind truth = dataset.entries[i].label;
    const GestureKind predicted = classify_gesture(model, features[i]);
    result.confusion.add(truth, predicted);
    if (truth != GestureKind::NoGesture) {
      ++gestures;
      if (predicted == truth) ++correct;
    }
  }
  result.fold_accuracies.push_back(
      gestures > 0 ? static_cast<double>(correct) / static_cast<double>(gestures)
                   : std::numeric_limits<double>::quiet_NaN());
  result.average_accuracy = result.confusion.average_accuracy();
  return result;
}

GridSearchResult grid_search(const Dataset& dataset, const TrainingConfig& base,
                             const std::vector<std::size_t>& degrees,
                             const std::vector<double>& gammas, double test_fraction,
                             std::size_t folds) {
  GridSearchResult best;
  best.accuracy = -1.0;
  for (std::size_t degree : degrees) {
    for (double gamma : gammas) {
      TrainingConfig config = base;
      config.kernel.degree = degree;
      config.gamma = gamma;
      const auto cv = cross_validate(dataset, config, test_fraction, folds);
      best.table.emplace_back(degree, gamma, cv.average_accuracy);
      if (cv.average_accuracy > best.accuracy) {
        best.accuracy = cv.average_accuracy;
        best.degree = degree;
        best.gamma = gamma;
      }
    }
  }
  return best;
}

void write_confusion_csv(const std::filesystem::path& path,
                         const std::vector<std::string>& class_names,
                         const std::vector<std::vector<double>>& rows) {
  if (class_names.size() != rows.size())
    throw DataError("confusion csv: class_names/rows size mismatch");
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << "gesture";
  for (const auto& name : class_names) f << ',' << name;
  f << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    f << class_names[i];
    for (double v : rows[i]) f << ',' << format_double(v);
    f << '\n';
  }
  if (!f) throw IoError("write failed: " + path.string());
}

void write_report(const std::filesystem::path& dir, const CrossValidationResult& result) {
  std::filesystem::create_directories(dir);
  const auto& order = ConfusionMatrix::class_order();
  const auto norm = result.confusion.normalized();

  std::vector<std::string> names;
  for (GestureKind g : order) names.emplace_back(to_string(g));
  {
    std::vector<std::vector<double>> rows(5, std::vector<double>(5));
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) rows[i][j] = norm[i][j];
    write_confusion_csv(dir / "confusion.csv", names, rows);
  }
  {
    std::ofstream f(dir / "confusion_counts.csv");
    if (!f) throw IoError("cannot open for writing: " + (dir / "confusion_counts.csv").string());
    f << "gesture";
    for (GestureKind g : order) f << ',' << to_string(g);
    f << '\n';
    for (std::size_t i = 0; i < 5; ++i) {
      f << to_string(order[i]);
      for (std::size_t j = 0; j < 5; ++j) f << ',' << result.confusion.counts[i][j];
      f << '\n';
    }
  }
  {
    Json per_class = Json::object();
    for (std::size_t i = 0; i < 5; ++i) {
      const double recall = result.confusion.recall(i);
      const double precision = result.confusion.precision(i);
      per_class[std::string(to_string(order[i]))] = {
          {"recall", std::isnan(recall) ? Json(nullptr) : Json(recall)},
          {"precision", std::isnan(precision) ? Json(nullptr) : Json(precision)}};
    }
    const double fa = result.confusion.false_accept_rate();
    const double fr = result.confusion.false_reject_rate();
    Json metrics{{"schema_version", 1},
                 {"average_accuracy", result.average_accuracy},
                 {"folds", result.folds},
                 {"test_fraction", result.test_fraction},
                 {"per_class", per_class},
                 {"false_accept_rate", std::isnan(fa) ? Json(nullptr) : Json(fa)},
                 {"false_reject_rate", std::isnan(fr) ? Json(nullptr) : Json(fr)},
                 {"fold_accuracies", result.fold_accuracies},
                 {"gesture_rejected", result.confusion.gesture_rejected},
                 {"no_gesture_total", result.confusion.no_gesture_total},
                 {"no_gesture_accepted", result.confusion.no_gesture_accepted}};
    std::ofstream f(dir / "metrics.json");
    if (!f) throw IoError("cannot open for writing: " + (dir / "metrics.json").string());
    f << metrics.dump(2) << '\n';
  }
  {
    std::ofstream f(dir / "report.txt");
    if (!f) throw IoError("cannot open for writing: " + (dir / "report.txt").string());
    f << format_report(result);
  }
}

std::string format_report(const CrossValidationResult& result) {
  const auto& order = ConfusionMatrix::class_order();
  const auto norm = result.confusion.normalized();
  std::ostringstream os;
  os << "Confusion matrix (rows = true class, row-normalised)\n\n";
  os << std::left << std::setw(12) << "gesture";
  for (GestureKind g : order) os << std::right << std::setw(11) << to_string(g);
  os << '\n';
  for (std::size_t i = 0; i < 5; ++i) {
    os << std::left << std::setw(12) << to_string(order[i]);
    for (std::size_t j = 0; j < 5; ++j)
      os << std::right << std::setw(11) << std::fixed << std::setprecision(4) << norm[i][j];
    os << '\n';
  }
  os << '\n';
  os << "per-class recall / precision\n";
  for (std::size_t i = 0; i < 5; ++i) {
    const double recall = result.confusion.recall(i);
    const double precision = result.confusion.precision(i);
    os << "  " << std::left << std::setw(12) << to_string(order[i]);
    if (std::isnan(recall)) os << "recall NA";
    else os << "recall " << std::fixed << std::setprecision(4) << recall;
    if (std::isnan(precision)) os << "  precision NA";
    else os << "  precision " << std::fixed << std::setprecision(4) << precision;
    os << '\n';
  }
  os << '\n';
  os << "average accuracy: " << std::fixed << std::setprecision(4) << result.average_accuracy
     << "  (" << result.folds << " fold(s), test fraction "
     << format_double(result.test_fraction) << ")\n";
  const double fa = result.confusion.false_accept_rate();
  const double fr = result.confusion.false_reject_rate();
  os << "no-gesture false accept rate: ";
  if (std::isnan(fa)) os << "NA";
  else os << std::fixed << std::setprecision(4) << fa;
  os << "\ngesture false reject rate: ";
  if (std::isnan(fr)) os << "NA";
  else os << std::fixed << std::setprecision(4) << fr;
  os << '\n';
  return os.str();
}

ConfusionCsv read_confusion_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw DataError("confusion csv: empty file " + path.string());

  ConfusionCsv out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    if (!std::getline(row, cell, ',')) throw DataError("confusion csv: bad row");
    out.class_names.push_back(cell);
    std::vector<double> values;
    while (std::getline(row, cell, ',')) {
      double v = 0.0;
      const auto* begin = cell.data();
      const auto* end = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc() || ptr != end)
        throw DataError("confusion csv: bad number '" + cell + "'");
      values.push_back(v);
    }
    out.values.push_back(std::move(values));
  }
  return out;
}

void save_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  std::filesystem::create_directories(dir / "stacks");
  Json entries = Json::array();
  for (std::size_t i = 0; i < dataset.entries.size(); ++i) {
    const auto& entry = dataset.entries[i];
    std::ostringstream name;
    name << "stacks/" << std::setfill('0') << std::setw(4) << i << '_'
         << to_string(entry.label) << ".ugfs";
    write_framestack(dir / name.str(), entry.profile.frames, dataset.pulse.sample_rate_hz);
    entries.push_back(Json{{"label", to_string(entry.label)},
                           {"seed", entry.scene_seed},
                           {"stack", name.str()}});
  }
  Json manifest{{"schema_version", 1},
                {"type", "ultragest-dataset"},
                {"pulse", to_json(dataset.pulse)},
                {"dsp", to_json(dataset.dsp)},
                {"spec", to_json(dataset.spec)},
                {"entries", entries}};
  std::ofstream f(dir / "manifest.json");
  if (!f) throw IoError("cannot open for writing: " + (dir / "manifest.json").string());
  f << manifest.dump(2) << '\n';
  if (!f) throw IoError("write failed: " + (dir / "manifest.json").string());
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
  std::ifstream f(manifest_path);
  if (!f) throw IoError("cannot open dataset manifest: " + manifest_path.string());
  Json j;
  try {
    f >> j;
  } catch (const Json::exception& e) {
    throw DataError("dataset manifest parse error: " + std::string(e.what()));
  }
  Dataset dataset;
  try {
    if (j.at("type").get<std::string>() != "ultragest-dataset")
      throw DataError("not a dataset manifest: " + manifest_path.string());
    dataset.pulse = pulse_from_json(j.at("pulse"));
    dataset.dsp = dsp_from_json(j.at("dsp"));
    dataset.spec = dataset_spec_from_json(j.at("spec"));
    const auto base = manifest_path.parent_path();
    for (const auto& e : j.at("entries")) {
      DatasetEntry entry;
      entry.label = gesture_from_string(e.at("label").get<std::string>());
      entry.scene_seed = e.at("seed").get<std::uint64_t>();
      FrameStack stack = read_framestack(base / e.at("stack").get<std::string>());
      entry.profile.frames = std::move(stack.frames);
      entry.profile.label = entry.label;
      dataset.entries.push_back(std::move(entry));
    }
  } catch (const Json::exception& e) {
    throw DataError("dataset manifest missing fields: " + std::string(e.what()));
  }
  return dataset;
}

}  // namespace ultragest
