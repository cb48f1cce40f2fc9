#pragma once

#include <cstddef>
#include <vector>

namespace ultragest {

/// Timing and frequency parameters of the transmitted pulse train.
///
/// One block of the train consists of `pulses_per_block` (N) pulses, one every
/// `pulse_period_s` (T2), each an LFM chirp of `pulse_len_s` (T1) sweeping
/// carrier_freq_hz +/- half_bandwidth_hz. Pulses alternate up/down chirps,
/// starting with an up-chirp. The block spans T3 = N * T2.
struct PulseTrainConfig {
  double carrier_freq_hz = 38'800.0;
  double half_bandwidth_hz = 3'500.0;
  double pulse_len_s = 0.5e-3;   // T1
  double pulse_period_s = 5e-3;  // T2
  std::size_t pulses_per_block = 4;
  double sample_rate_hz = 192'000.0;
  double amplitude = 1.0;
  /// Tukey taper parameter in [0, 1]; 0 keeps the rectangular envelope.
  double tukey_alpha = 0.0;

  std::size_t samples_per_pulse() const;
  std::size_t samples_per_period() const;
  std::size_t samples_per_block() const;
  double block_len_s() const { return static_cast<double>(pulses_per_block) * pulse_period_s; }

  /// Throws ConfigError if timing or Nyquist invariants are violated.
  void validate() const;
};

/// A real-valued sampled signal.
struct Waveform {
  std::vector<double> samples;
  double sample_rate_hz = 0.0;
};

enum class ChirpDirection { Up, Down };

/// One LFM pulse of round(T1 * fs) samples. The instantaneous frequency sweeps
/// linearly from fc - B to fc + B over the pulse (reversed for Down). Phase is
/// referenced to the pulse centre, which makes the down-chirp the exact sample
/// reversal of the up-chirp.
Waveform make_chirp(const PulseTrainConfig& config, ChirpDirection direction);

/// One full block: pulse k sits at offset round(k * T2 * fs), up-chirp for even
/// k, down-chirp for odd k, zeros elsewhere.
Waveform make_pulse_train(const PulseTrainConfig& config);

}  // namespace ultragest
