#include "ultragest/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ultragest/errors.hpp"
#include "ultragest/rng.hpp"

namespace ultragest {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

struct Keyframe {
  double t;
  Position pos;
};

bool is_swipe(GestureKind g) {
  return g == GestureKind::SwipeLTR || g == GestureKind::SwipeRTL;
}

// Rest/move schedule for one gesture. The motion window is the middle
// (1 - hold_fraction) of the duration, shifted by time_skew and kept inside
// [0.02, 0.98] of the gesture.
std::vector<Keyframe> keyframes_for(const Trajectory& tr) {
  const double d = tr.duration_s;
  const double idle = std::clamp(tr.hold_fraction, 0.0, 1.0);
  const double shift = tr.time_skew * 0.25 * d;
  double a = idle / 2.0 * d + shift;
  double b = d - idle / 2.0 * d + shift;
  a = std::clamp(a, 0.02 * d, 0.98 * d);
  b = std::clamp(b, a, 0.98 * d);

  switch (tr.gesture) {
    case GestureKind::Fwd:
    case GestureKind::SwipeLTR:
    case GestureKind::SwipeRTL:
      return {{0.0, tr.start}, {a, tr.start}, {b, tr.end}, {d, tr.end}};
    case GestureKind::FwdBwd: {
      const double mid = 0.5 * (a + b);
      return {{0.0, tr.start}, {a, tr.start}, {mid, tr.end}, {b, tr.start}, {d, tr.start}};
    }
    case GestureKind::HoldHand: {
      // entry -> hold -> exit; entry and exit each take 45% of the non-hold time
      double e = 0.45 * d * (1.0 - tr.hold_fraction);
      if (e <= 0.01 * d) return {{0.0, tr.end}, {d, tr.end}};  // held throughout
      const double h0 = std::clamp(0.05 * d + shift, 0.02 * d, 0.5 * d);
      const double h1 = std::clamp(d - 0.05 * d + shift, 0.5 * d, 0.98 * d);
      return {{0.0, tr.start}, {h0, tr.start},     {h0 + e, tr.end},
              {h1 - e, tr.end}, {h1, tr.start}, {d, tr.start}};
    }
    case GestureKind::NoGesture:
      return {{0.0, tr.start}, {d, tr.start}};
  }
  return {{0.0, tr.start}, {d, tr.start}};
}

}  // namespace

std::string to_string(GestureKind kind) {
  switch (kind) {
    case GestureKind::Fwd: return "fwd";
    case GestureKind::FwdBwd: return "fwd_bwd";
    case GestureKind::SwipeLTR: return "swipe_ltr";
    case GestureKind::SwipeRTL: return "swipe_rtl";
    case GestureKind::HoldHand: return "hold_hand";
    case GestureKind::NoGesture: return "no_gesture";
  }
  return "unknown";
}

GestureKind gesture_from_string(const std::string& name) {
  if (name == "fwd") return GestureKind::Fwd;
  if (name == "fwd_bwd") return GestureKind::FwdBwd;
  if (name == "swipe_ltr") return GestureKind::SwipeLTR;
  if (name == "swipe_rtl") return GestureKind::SwipeRTL;
  if (name == "hold_hand") return GestureKind::HoldHand;
  if (name == "no_gesture") return GestureKind::NoGesture;
  throw ConfigError("unknown gesture '" + name + "'");
}

const std::vector<GestureKind>& gesture_classes() {
  static const std::vector<GestureKind> classes = {
      GestureKind::Fwd, GestureKind::FwdBwd, GestureKind::SwipeLTR,
      GestureKind::SwipeRTL, GestureKind::HoldHand};
  return classes;
}

Position Trajectory::position_at(double t) const {
  t = std::clamp(t, 0.0, duration_s);
  const auto frames = keyframes_for(*this);

  auto base_at = [&](double tq) {
    Position pos = frames.back().pos;
    for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
      if (tq <= frames[i + 1].t) {
        const double span = frames[i + 1].t - frames[i].t;
        const double u = span > 0.0 ? (tq - frames[i].t) / span : 1.0;
        const double s = smoothstep(u);
        pos.depth_m =
            frames[i].pos.depth_m + s * (frames[i + 1].pos.depth_m - frames[i].pos.depth_m);
        pos.lateral_m =
            frames[i].pos.lateral_m + s * (frames[i + 1].pos.lateral_m - frames[i].pos.lateral_m);
        break;
      }
    }
    return pos;
  };

  Position pos = base_at(t);

  if (wave_amp_m > 0.0) {
    // undulation follows the base path's speed so rest segments stay still
    const double dt = 2e-3;
    const Position ahead = base_at(std::min(t + dt, duration_s));
    const double speed =
        std::hypot(ahead.depth_m - pos.depth_m, ahead.lateral_m - pos.lateral_m) / dt;
    const double factor = std::clamp(speed / 0.15, 0.0, 1.0);
    pos.depth_m += factor * wave_amp_m * std::sin(kTwoPi * wave_freq_hz * t + wave_phase);
  }

  if (is_swipe(gesture)) pos.depth_m += swipe_tilt * pos.lateral_m;

  if (tremor_amp_m > 0.0) {
    pos.depth_m += tremor_amp_m * std::sin(kTwoPi * tremor_freq_hz * t + tremor_phase);
    pos.lateral_m +=
        0.6 * tremor_amp_m * std::sin(kTwoPi * 1.37 * tremor_freq_hz * t + tremor_phase2);
  }

  pos.depth_m = std::clamp(pos.depth_m, kMinDepthM, kMaxDepthM);
  pos.lateral_m = std::clamp(pos.lateral_m, -kMaxLateralM, kMaxLateralM);
  return pos;
}

double Trajectory::max_speed_mps() const {
  const double dt = 1e-3;
  double max_speed = 0.0;
  Position prev = position_at(0.0);
  for (double t = dt; t <= duration_s + dt / 2; t += dt) {
    const Position cur = position_at(t);
    const double dd = cur.depth_m - prev.depth_m;
    const double dl = cur.lateral_m - prev.lateral_m;
    max_speed = std::max(max_speed, std::sqrt(dd * dd + dl * dl) / dt);
    prev = cur;
  }
  return max_speed;
}

void Trajectory::validate() const {
  if (!(duration_s > 0.0)) throw ConfigError("trajectory: duration_s must be positive");
  if (hold_fraction < 0.0 || hold_fraction > 1.0)
    throw ConfigError("trajectory: hold_fraction must be in [0, 1]");
  if (std::abs(time_skew) > 0.3) throw ConfigError("trajectory: |time_skew| must be <= 0.3");
  if (tremor_amp_m < 0.0 || tremor_amp_m > 0.01)
    throw ConfigError("trajectory: tremor_amp_m must be in [0, 0.01]");
  if (!(peak_speed_mps > 0.0) || peak_speed_mps > 1.0)
    throw ConfigError("trajectory: peak_speed_mps must be in (0, 1]");
  const double realised = max_speed_mps();
  if (realised > peak_speed_mps + 1e-6)
    throw ConfigError("trajectory: realised speed " + std::to_string(realised) +
                      " m/s exceeds cap " + std::to_string(peak_speed_mps));
}

Trajectory Trajectory::for_gesture(GestureKind kind) {
  Trajectory tr;
  tr.gesture = kind;
  switch (kind) {
    case GestureKind::Fwd:
      tr.start = {0.42, 0.02};
      tr.end = {0.15, 0.0};
      tr.hold_fraction = 0.35;
      break;
    case GestureKind::FwdBwd:
      tr.start = {0.42, 0.0};
      tr.end = {0.14, 0.0};
      tr.hold_fraction = 0.25;
      break;
    case GestureKind::SwipeLTR:
      // depth fields carry the mid-depth; the tilt adds the lateral dependence
      tr.start = {0.23, -0.17};
      tr.end = {0.23, 0.17};
      tr.hold_fraction = 0.30;
      break;
    case GestureKind::SwipeRTL:
      tr.start = {0.23, 0.17};
      tr.end = {0.23, -0.17};
      tr.hold_fraction = 0.30;
      break;
    case GestureKind::HoldHand:
      tr.start = {0.33, 0.02};
      tr.end = {0.19, 0.0};
      tr.hold_fraction = 0.50;
      break;
    case GestureKind::NoGesture:
      tr.start = {0.30, 0.0};
      tr.end = {0.30, 0.0};
      tr.hold_fraction = 1.0;
      break;
  }
  return tr;
}

void Scene::validate() const {
  trajectory.validate();
  if (!(reflection_coeff > 0.0) || reflection_coeff > 1.0)
    throw ConfigError("scene: reflection_coeff must be in (0, 1]");
  if (tx_rx_baseline_m < 0.0) throw ConfigError("scene: tx_rx_baseline_m must be >= 0");
  if (!std::isfinite(self_interference_gain))
    throw ConfigError("scene: self_interference_gain must be finite");
  for (const auto& c : static_clutter)
    if (!(c.range_m > 0.0) || !std::isfinite(c.gain))
      throw ConfigError("scene: clutter entries need range > 0 and finite gain");
  for (const auto& m : multipath)
    if (m.extra_delay_s < 0.0 || !std::isfinite(m.gain))
      throw ConfigError("scene: multipath entries need delay >= 0 and finite gain");
  if (noise_std < 0.0) throw ConfigError("scene: noise_std must be >= 0");
  if (!(speed_of_sound_mps > 0.0)) throw ConfigError("scene: speed_of_sound_mps must be positive");
  if (sub_reflectors > 3) throw ConfigError("scene: sub_reflectors must be <= 3");
}

double range_to_delay(Position position, double baseline_m, double c_mps) {
  if (!(position.depth_m > 0.0)) throw DataError("range_to_delay: depth must be positive");
  const double half = baseline_m / 2.0;
  const double to_tx = std::hypot(position.depth_m, position.lateral_m + half);
  const double to_rx = std::hypot(position.depth_m, position.lateral_m - half);
  return (to_tx + to_rx) / c_mps;
}

Waveform simulate_block(const Scene& scene, const PulseTrainConfig& config,
                        std::size_t block_index) {
  config.validate();
  scene.validate();

  const double fs = config.sample_rate_hz;
  const std::size_t block_len = config.samples_per_block();
  Waveform out;
  out.sample_rate_hz = fs;
  out.samples.assign(block_len, 0.0);

  const Waveform up = make_chirp(config, ChirpDirection::Up);
  const Waveform down = make_chirp(config, ChirpDirection::Down);
  const double c = scene.speed_of_sound_mps;

  auto add_echo = [&](const Waveform& pulse, std::size_t pulse_offset, double delay_s,
                      double gain) {
    if (delay_s >= config.pulse_period_s)
      throw DataError("delay-exceeds-frame: echo delay " + std::to_string(delay_s) +
                      " s >= pulse period");
    const auto shift = static_cast<std::size_t>(std::llround(delay_s * fs));
    const std::size_t offset = pulse_offset + shift;
    for (std::size_t i = 0; i < pulse.samples.size() && offset + i < block_len; ++i)
      out.samples[offset + i] += gain * pulse.samples[i];
  };

  // Secondary reflectors riding along with the hand, fixed small offsets.
  static constexpr Position kSubOffsets[3] = {{0.020, 0.012}, {-0.016, 0.018}, {0.010, -0.020}};
  constexpr double kSubCoeff = 0.35;

  const bool has_hand = scene.trajectory.gesture != GestureKind::NoGesture;
  const double si_delay = scene.tx_rx_baseline_m / c;

  for (std::size_t k = 0; k < config.pulses_per_block; ++k) {
    const auto pulse_offset = static_cast<std::size_t>(
        std::llround(static_cast<double>(k) * config.pulse_period_s * fs));
    const Waveform& pulse = (k % 2 == 0) ? up : down;

    if (scene.self_interference_gain != 0.0)
      add_echo(pulse, pulse_offset, si_delay, scene.self_interference_gain);

    for (const auto& cl : scene.static_clutter)
      add_echo(pulse, pulse_offset, 2.0 * cl.range_m / c, cl.gain);

    if (has_hand) {
      const double t_emit =
          (static_cast<double>(block_index) * static_cast<double>(config.pulses_per_block) +
           static_cast<double>(k)) *
          config.pulse_period_s;
      const Position hand = scene.trajectory.position_at(t_emit);

      for (std::size_t r = 0; r < 1 + scene.sub_reflectors; ++r) {
        Position p = hand;
        double coeff = scene.reflection_coeff;
        if (r > 0) {
          p.depth_m += kSubOffsets[r - 1].depth_m;
          p.lateral_m += kSubOffsets[r - 1].lateral_m;
          coeff *= kSubCoeff;
        }
        const double delay = range_to_delay(p, scene.tx_rx_baseline_m, c);
        const double one_way = c * delay / 2.0;
        const double alpha = coeff / (one_way * one_way);
        add_echo(pulse, pulse_offset, delay, alpha);
        for (const auto& mp : scene.multipath)
          add_echo(pulse, pulse_offset, delay + mp.extra_delay_s, alpha * mp.gain);
      }
    }
  }

  if (scene.noise_std > 0.0) {
    Rng rng(derive_seed(scene.rng_seed, block_index));
    for (auto& s : out.samples) s += scene.noise_std * rng.gaussian();
  }
  return out;
}

std::vector<Waveform> simulate_gesture(const Scene& scene, const PulseTrainConfig& config) {
  config.validate();
  const double blocks_exact = scene.trajectory.duration_s / config.block_len_s();
  const auto n_blocks = static_cast<std::size_t>(std::llround(blocks_exact));
  if (n_blocks < 1 || std::abs(blocks_exact - static_cast<double>(n_blocks)) > 1e-6)
    throw ConfigError("trajectory duration must be a whole number of pulse blocks (got " +
                      std::to_string(blocks_exact) + ")");
  std::vector<Waveform> blocks;
  blocks.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) blocks.push_back(simulate_block(scene, config, b));
  return blocks;
}

}  // namespace ultragest
