#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ultragest/dsp.hpp"
#include "ultragest/simulator.hpp"

namespace ultragest {

/// Time series of MotionFrames spanning one gesture.
struct MotionProfile {
  std::vector<MotionFrame> frames;
  std::optional<GestureKind> label;
};

struct Peak {
  std::size_t lag_index = 0;
  double value = 0.0;
};

/// Per-frame sum of the top-K peak values over the profile.
struct RssVector {
  std::vector<double> values;
};

/// Per-frame top-K peaks as (lag, value) pairs, values non-increasing within a
/// row, padded with (0, 0) when a frame has fewer peaks.
struct RangeMatrix {
  std::vector<std::vector<Peak>> rows;  // L rows of exactly K entries
  std::size_t peaks_per_frame = 0;
  std::size_t frame_len = 0;  // lags per frame, used for normalisation
};

enum class FlattenNorm { None, Max, ZScore };

struct FeatureConfig {
  std::size_t profile_len = 100;    // L
  std::size_t peaks_per_frame = 20; // K
  /// Per-vector normalisation of the shape features fed to the classification
  /// nodes. The detection node always receives un-normalised RSS values so
  /// absolute echo energy stays visible; every hierarchy node additionally
  /// z-scores its inputs against training-set statistics.
  FlattenNorm norm = FlattenNorm::ZScore;
};

/// Up to k strict local maxima inside the gate, sorted by value descending,
/// ties to the smaller lag. Plateaus count once, at their leftmost index.
std::vector<Peak> find_peaks(const MotionFrame& frame, std::size_t k = 20);

RssVector rss_vector(const MotionProfile& profile, std::size_t k = 20);

RangeMatrix range_matrix(const MotionProfile& profile, std::size_t k = 20);

/// Center-crops or zero-pads the profile to exactly `target` frames.
MotionProfile normalize_length(const MotionProfile& profile, std::size_t target);

struct FlattenResult {
  std::vector<double> values;
  /// Set when max/zscore normalisation degenerates (all-zero or constant
  /// input); values are all zeros in that case.
  bool degenerate = false;
};

FlattenResult flatten_features(const RssVector& rss, FlattenNorm norm);

/// Flattens to 2*L*K values, row-major, each peak contributing
/// (lag / frame_len, value / matrix_max) before the chosen norm is applied.
FlattenResult flatten_features(const RangeMatrix& rm, FlattenNorm norm);

/// Runs blocks through block-correlation and de-cluttering into a profile.
MotionProfile assemble_profile(const std::vector<Waveform>& blocks,
                               const PulseTrainConfig& pulse, const DspConfig& dsp,
                               std::optional<GestureKind> label = std::nullopt);

/// Feature CSV rows: label (or "unlabeled"), then the flattened values.
void write_features_csv(const std::filesystem::path& path,
                        const std::vector<std::pair<std::string, std::vector<double>>>& rows);

}  // namespace ultragest
