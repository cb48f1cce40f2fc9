#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ultragest/signal.hpp"

namespace ultragest {

/// Inclusive lag window (in samples) that keeps hand echoes and rejects
/// self-interference near lag zero and late reverberation.
struct LagGate {
  std::size_t min_lag = 0;
  std::size_t max_lag = 0;

  bool contains(std::size_t lag) const { return lag >= min_lag && lag <= max_lag; }
};

struct DspConfig {
  /// Background forgetting factor c in [0, 1]. Slow enough (0.95) that a
  /// swipe's ~0.05 m/s radial rate survives subtraction; static returns cancel
  /// from the second frame regardless.
  double clutter_factor = 0.95;
  double gate_min_s = 0.5e-3;
  double gate_max_s = 3.5e-3;
  double speed_of_sound_mps = 343.0;

  void validate() const;
  LagGate gate(const PulseTrainConfig& pulse) const;
};

/// Raw cross-correlation values indexed by lag.
struct CorrelationFrame {
  std::vector<double> values;
  std::size_t block_index = 0;
};

/// De-cluttered, gated correlation magnitudes; peaks mark moving reflectors.
struct MotionFrame {
  std::vector<double> values;
  LagGate gate;
};

/// Running clutter estimate for one correlation stream. Owned by a single
/// stream at a time; distinct streams may run in parallel.
struct DeclutterState {
  explicit DeclutterState(double clutter_factor);

  double clutter_factor;
  std::vector<double> background;  // empty until the first frame is seen
  std::size_t frames_seen = 0;
};

/// Linear cross-correlation: values[k] = sum_n received[n+k] * tmpl[n] for
/// k in [0, len(received) - len(tmpl)]. FFT-based fast convolution.
CorrelationFrame cross_correlate(const Waveform& received, const Waveform& tmpl);

/// Correlates each of the N pulse periods in a block against its own template
/// (up-chirp for even periods, down for odd) and sums the magnitude sequences
/// into one frame of samples_per_period() lags. Caches template spectra, so
/// prefer one instance per config when processing many blocks.
class BlockCorrelator {
 public:
  explicit BlockCorrelator(const PulseTrainConfig& config);

  CorrelationFrame operator()(const Waveform& block, std::size_t block_index = 0) const;

 private:
  PulseTrainConfig config_;
  std::size_t fft_size_;
  std::vector<std::complex<double>> up_spectrum_;
  std::vector<std::complex<double>> down_spectrum_;
};

/// One-shot convenience wrapper around BlockCorrelator.
CorrelationFrame block_correlate(const Waveform& block, const PulseTrainConfig& config,
                                 std::size_t block_index = 0);

/// Gated magnitudes without background subtraction (used for static ranging).
MotionFrame gate_frame(const CorrelationFrame& frame, LagGate gate);

/// Subtracts the running background from the frame, clamps negatives to zero,
/// zeroes values outside the gate, then folds the frame into the background:
///   background <- c * background + (1 - c) * frame
/// The first frame initialises the background and yields an all-zero output.
MotionFrame declutter(DeclutterState& state, const CorrelationFrame& frame, LagGate gate);

struct RangeEstimate {
  double range_m = 0.0;
  double rss = 0.0;
};

/// Single-target reduction: the highest gated peak gives range
/// c * lag / (2 fs) and RSS. Ties resolve to the smaller lag. Throws DataError
/// on an all-zero frame.
RangeEstimate estimate_tof_rss(const MotionFrame& frame, const PulseTrainConfig& pulse,
                               const DspConfig& dsp);

}  // namespace ultragest
