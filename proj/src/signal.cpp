#include "ultragest/signal.hpp"

#include <cmath>
#include <numbers>

#include "ultragest/errors.hpp"

namespace ultragest {

namespace {

constexpr double kPi = std::numbers::pi;

double tukey_window(std::size_t i, std::size_t n, double alpha) {
  if (alpha <= 0.0 || n < 2) return 1.0;
  const double x = static_cast<double>(i) / static_cast<double>(n - 1);
  const double half = alpha / 2.0;
  if (x < half) return 0.5 * (1.0 + std::cos(kPi * (x / half - 1.0)));
  if (x > 1.0 - half) return 0.5 * (1.0 + std::cos(kPi * ((x - 1.0 + half) / half)));
  return 1.0;
}

}  // namespace

std::size_t PulseTrainConfig::samples_per_pulse() const {
  return static_cast<std::size_t>(std::llround(pulse_len_s * sample_rate_hz));
}

std::size_t PulseTrainConfig::samples_per_period() const {
  return static_cast<std::size_t>(std::llround(pulse_period_s * sample_rate_hz));
}

std::size_t PulseTrainConfig::samples_per_block() const {
  return static_cast<std::size_t>(
      std::llround(static_cast<double>(pulses_per_block) * pulse_period_s * sample_rate_hz));
}

void PulseTrainConfig::validate() const {
  if (!(sample_rate_hz > 0.0)) throw ConfigError("pulse config: sample_rate_hz must be positive");
  if (!(carrier_freq_hz > 0.0)) throw ConfigError("pulse config: carrier_freq_hz must be positive");
  if (half_bandwidth_hz < 0.0) throw ConfigError("pulse config: half_bandwidth_hz must be >= 0");
  if (!(pulse_len_s > 0.0)) throw ConfigError("pulse config: pulse_len_s must be positive");
  if (!(pulse_len_s < pulse_period_s))
    throw ConfigError("pulse config: pulse_len_s must be shorter than pulse_period_s");
  if (pulses_per_block < 1) throw ConfigError("pulse config: pulses_per_block must be >= 1");
  if (!(carrier_freq_hz + half_bandwidth_hz < sample_rate_hz / 2.0))
    throw ConfigError("pulse config: sweep exceeds Nyquist (fc + B >= fs/2)");
  if (!(amplitude > 0.0) || amplitude > 1.0)
    throw ConfigError("pulse config: amplitude must be in (0, 1]");
  if (tukey_alpha < 0.0 || tukey_alpha > 1.0)
    throw ConfigError("pulse config: tukey_alpha must be in [0, 1]");
  if (samples_per_pulse() < 2) throw ConfigError("pulse config: pulse shorter than 2 samples");
}

Waveform make_chirp(const PulseTrainConfig& config, ChirpDirection direction) {
  config.validate();
  const std::size_t n = config.samples_per_pulse();
  const double fs = config.sample_rate_hz;
  const double fc = config.carrier_freq_hz;
  // Chirp rate so the sweep covers fc - B .. fc + B over exactly T1.
  const double rate = config.half_bandwidth_hz / config.pulse_len_s;
  const double sign = direction == ChirpDirection::Up ? 1.0 : -1.0;

  Waveform wf;
  wf.sample_rate_hz = fs;
  wf.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Time relative to the pulse centre. The centred quadratic phase makes
    // reversing the up-chirp's samples reproduce the down-chirp exactly.
    const double tc = (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) / fs;
    const double phase = 2.0 * kPi * (fc * tc + sign * rate * tc * tc);
    wf.samples[i] = config.amplitude * tukey_window(i, n, config.tukey_alpha) * std::cos(phase);
  }
  return wf;
}

Waveform make_pulse_train(const PulseTrainConfig& config) {
  config.validate();
  Waveform train;
  train.sample_rate_hz = config.sample_rate_hz;
  train.samples.assign(config.samples_per_block(), 0.0);

  const Waveform up = make_chirp(config, ChirpDirection::Up);
  const Waveform down = make_chirp(config, ChirpDirection::Down);
  for (std::size_t k = 0; k < config.pulses_per_block; ++k) {
    const auto offset = static_cast<std::size_t>(
        std::llround(static_cast<double>(k) * config.pulse_period_s * config.sample_rate_hz));
    const Waveform& pulse = (k % 2 == 0) ? up : down;
    for (std::size_t i = 0; i < pulse.samples.size() && offset + i < train.samples.size(); ++i)
      train.samples[offset + i] = pulse.samples[i];
  }
  return train;
}

}  // namespace ultragest
