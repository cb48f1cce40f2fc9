#include "ultragest/dsp.hpp"

#include <algorithm>
#include <cmath>

#include "ultragest/errors.hpp"
#include "ultragest/fft.hpp"

namespace ultragest {

namespace {

std::vector<std::complex<double>> spectrum_of(const std::vector<double>& samples,
                                              std::size_t fft_size) {
  std::vector<std::complex<double>> spec(fft_size);
  for (std::size_t i = 0; i < samples.size(); ++i) spec[i] = samples[i];
  fft_inplace(spec, false);
  return spec;
}

// Correlation of `received` against `tmpl` via the frequency domain, clean for
// lags in [0, len(received) - len(tmpl)].
std::vector<double> fft_correlate(const std::vector<double>& received,
                                  const std::vector<std::complex<double>>& tmpl_spectrum,
                                  std::size_t tmpl_len, std::size_t fft_size) {
  std::vector<std::complex<double>> work(fft_size);
  for (std::size_t i = 0; i < received.size(); ++i) work[i] = received[i];
  fft_inplace(work, false);
  for (std::size_t i = 0; i < fft_size; ++i) work[i] *= std::conj(tmpl_spectrum[i]);
  fft_inplace(work, true);

  const std::size_t n_lags = received.size() - tmpl_len + 1;
  std::vector<double> out(n_lags);
  for (std::size_t k = 0; k < n_lags; ++k) out[k] = work[k].real();
  return out;
}

}  // namespace

void DspConfig::validate() const {
  if (clutter_factor < 0.0 || clutter_factor > 1.0)
    throw ConfigError("dsp config: clutter_factor must be in [0, 1]");
  if (gate_min_s < 0.0 || !(gate_max_s > gate_min_s))
    throw ConfigError("dsp config: gate must satisfy 0 <= gate_min_s < gate_max_s");
  if (!(speed_of_sound_mps > 0.0))
    throw ConfigError("dsp config: speed_of_sound_mps must be positive");
}

LagGate DspConfig::gate(const PulseTrainConfig& pulse) const {
  validate();
  const std::size_t frame_len = pulse.samples_per_period();
  auto to_lag = [&](double t) {
    return static_cast<std::size_t>(std::llround(t * pulse.sample_rate_hz));
  };
  LagGate g{to_lag(gate_min_s), to_lag(gate_max_s)};
  g.max_lag = std::min(g.max_lag, frame_len > 0 ? frame_len - 1 : 0);
  if (g.min_lag > g.max_lag)
    throw ConfigError("dsp config: gate lies outside the pulse period");
  return g;
}

DeclutterState::DeclutterState(double clutter_factor_in) : clutter_factor(clutter_factor_in) {
  if (clutter_factor < 0.0 || clutter_factor > 1.0)
    throw ConfigError("declutter: clutter_factor must be in [0, 1]");
}

CorrelationFrame cross_correlate(const Waveform& received, const Waveform& tmpl) {
  if (tmpl.samples.empty()) throw DataError("cross_correlate: empty template");
  if (received.samples.size() < tmpl.samples.size())
    throw DataError("cross_correlate: received shorter than template");

  const std::size_t fft_size = next_pow2(received.samples.size() + tmpl.samples.size() - 1);
  CorrelationFrame frame;
  frame.values = fft_correlate(received.samples, spectrum_of(tmpl.samples, fft_size),
                               tmpl.samples.size(), fft_size);
  return frame;
}

BlockCorrelator::BlockCorrelator(const PulseTrainConfig& config) : config_(config) {
  config_.validate();
  const std::size_t period = config_.samples_per_period();
  const std::size_t pulse = config_.samples_per_pulse();
  // each period is padded so every lag in [0, period) is available
  fft_size_ = next_pow2(period + 2 * (pulse - 1) + 1);
  up_spectrum_ = spectrum_of(make_chirp(config_, ChirpDirection::Up).samples, fft_size_);
  down_spectrum_ = spectrum_of(make_chirp(config_, ChirpDirection::Down).samples, fft_size_);
}

CorrelationFrame BlockCorrelator::operator()(const Waveform& block,
                                             std::size_t block_index) const {
  if (block.samples.size() != config_.samples_per_block())
    throw DataError("block_correlate: expected " + std::to_string(config_.samples_per_block()) +
                    " samples, got " + std::to_string(block.samples.size()));

  const std::size_t period = config_.samples_per_period();
  const std::size_t pulse = config_.samples_per_pulse();
  const std::size_t segment_len = period + pulse - 1;

  CorrelationFrame frame;
  frame.block_index = block_index;
  frame.values.assign(period, 0.0);

  std::vector<double> segment(segment_len);
  for (std::size_t k = 0; k < config_.pulses_per_block; ++k) {
    const auto start = static_cast<std::size_t>(
        std::llround(static_cast<double>(k) * config_.pulse_period_s * config_.sample_rate_hz));
    for (std::size_t i = 0; i < segment_len; ++i) {
      const std::size_t src = start + i;
      segment[i] = src < block.samples.size() ? block.samples[src] : 0.0;
    }
    const auto& tmpl = (k % 2 == 0) ? up_spectrum_ : down_spectrum_;
    const std::vector<double> corr = fft_correlate(segment, tmpl, pulse, fft_size_);
    for (std::size_t lag = 0; lag < period; ++lag) frame.values[lag] += std::abs(corr[lag]);
  }
  return frame;
}

CorrelationFrame block_correlate(const Waveform& block, const PulseTrainConfig& config,
                                 std::size_t block_index) {
  return BlockCorrelator(config)(block, block_index);
}

MotionFrame gate_frame(const CorrelationFrame& frame, LagGate gate) {
  MotionFrame out;
  out.gate = gate;
  out.values.assign(frame.values.size(), 0.0);
  const std::size_t hi = std::min<std::size_t>(gate.max_lag + 1, frame.values.size());
  for (std::size_t lag = gate.min_lag; lag < hi; ++lag)
    out.values[lag] = std::abs(frame.values[lag]);
  return out;
}

MotionFrame declutter(DeclutterState& state, const CorrelationFrame& frame, LagGate gate) {
  MotionFrame out;
  out.gate = gate;
  out.values.assign(frame.values.size(), 0.0);

  if (state.frames_seen == 0) {
    state.background = frame.values;
    state.frames_seen = 1;
    return out;  // all zeros by construction
  }
  if (state.background.size() != frame.values.size())
    throw DataError("declutter: frame length changed mid-stream");

  const std::size_t hi = std::min<std::size_t>(gate.max_lag + 1, frame.values.size());
  for (std::size_t lag = gate.min_lag; lag < hi; ++lag)
    out.values[lag] = std::max(0.0, frame.values[lag] - state.background[lag]);

  const double c = state.clutter_factor;
  for (std::size_t i = 0; i < frame.values.size(); ++i)
    state.background[i] = c * state.background[i] + (1.0 - c) * frame.values[i];
  ++state.frames_seen;
  return out;
}

RangeEstimate estimate_tof_rss(const MotionFrame& frame, const PulseTrainConfig& pulse,
                               const DspConfig& dsp) {
  std::size_t best_lag = 0;
  double best = 0.0;
  const std::size_t hi = std::min<std::size_t>(frame.gate.max_lag + 1, frame.values.size());
  for (std::size_t lag = frame.gate.min_lag; lag < hi; ++lag) {
    if (frame.values[lag] > best) {  // strict: ties keep the smaller lag
      best = frame.values[lag];
      best_lag = lag;
    }
  }
  if (best <= 0.0) throw DataError("empty-frame: no nonzero gated value");

  RangeEstimate est;
  est.range_m = dsp.speed_of_sound_mps * static_cast<double>(best_lag) /
                (2.0 * pulse.sample_rate_hz);
  est.rss = best;
  return est;
}

}  // namespace ultragest
