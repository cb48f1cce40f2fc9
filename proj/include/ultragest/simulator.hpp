#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ultragest/signal.hpp"

namespace ultragest {

enum class GestureKind { Fwd, FwdBwd, SwipeLTR, SwipeRTL, HoldHand, NoGesture };

std::string to_string(GestureKind kind);
GestureKind gesture_from_string(const std::string& name);
/// The five gesture classes (excluding NoGesture).
const std::vector<GestureKind>& gesture_classes();

/// Position of the hand in the sensing plane: depth away from the transducer
/// pair, lateral offset along the axis joining transmitter and receiver.
struct Position {
  double depth_m = 0.0;
  double lateral_m = 0.0;
};

/// Operating box the hand moves in.
inline constexpr double kMinDepthM = 0.10;
inline constexpr double kMaxDepthM = 0.50;
inline constexpr double kMaxLateralM = 0.20;

/// Parametric hand path for one gesture repetition.
///
/// Every gesture is a sequence of eased moves between rest positions:
///   Fwd      start -> end, then held at end
///   FwdBwd   start -> end -> start, motion centred in the window
///   Swipe*   lateral sweep start -> end (depth follows the tilted swipe
///            plane: depth = mid-depth + swipe_tilt * lateral)
///   HoldHand start -> end, hold, back to start
/// `hold_fraction` is the fraction of the duration spent stationary,
/// `time_skew` shifts the motion window inside the gesture. A small smooth
/// tremor (two sinusoids) is superimposed so a "held" hand is never perfectly
/// static; amplitude 0 disables it.
struct Trajectory {
  GestureKind gesture = GestureKind::Fwd;
  double duration_s = 2.0;
  Position start{0.42, 0.0};
  Position end{0.15, 0.0};
  double peak_speed_mps = 1.0;  // declared cap, checked by validate()
  double hold_fraction = 0.3;
  double time_skew = 0.0;       // [-0.3, 0.3] of duration
  double swipe_tilt = 0.18;     // m of depth per m of lateral travel (swipes only)
  double tremor_amp_m = 0.0;
  double tremor_freq_hz = 4.3;
  double tremor_phase = 0.0;
  double tremor_phase2 = 0.0;
  /// Slow depth undulation while the hand is in motion (ballistic moves are
  /// never perfectly straight); scaled down as the base path slows.
  double wave_amp_m = 0.0;
  double wave_freq_hz = 1.7;
  double wave_phase = 0.0;

  /// Hand position at time t, clamped to the operating box.
  Position position_at(double t) const;

  /// Numerically scanned maximum speed over the gesture.
  double max_speed_mps() const;

  /// Throws ConfigError when parameters are out of range or the realised path
  /// exceeds min(peak_speed_mps, 1 m/s).
  void validate() const;

  /// Gesture-appropriate default shape.
  static Trajectory for_gesture(GestureKind kind);
};

struct ClutterEcho {
  double range_m = 0.0;
  double gain = 0.0;
};

struct MultipathEcho {
  double extra_delay_s = 0.0;
  double gain = 0.0;
};

/// Full description of one rendered recording: hand path plus propagation
/// parameters. The seed fully determines the noise realisation.
struct Scene {
  Trajectory trajectory;
  double reflection_coeff = 0.005;        // alpha = reflection_coeff / r^2
  double tx_rx_baseline_m = 0.011;
  double self_interference_gain = 0.8;
  std::vector<ClutterEcho> static_clutter;
  std::vector<MultipathEcho> multipath;
  double noise_std = 0.0;
  double speed_of_sound_mps = 343.0;
  std::uint64_t rng_seed = 0;
  /// Extra point reflectors around the hand (0..3), for less idealised echoes.
  std::size_t sub_reflectors = 0;

  void validate() const;
};

/// Round-trip time of flight transmitter -> position -> receiver, with the
/// transducers placed at lateral +/- baseline/2, depth 0.
double range_to_delay(Position position, double baseline_m, double c_mps);

/// Renders the received waveform for one pulse block: hand echo (position
/// sampled at each pulse's emission time), self-interference, static clutter,
/// multipath copies of the hand echo, and white Gaussian noise. Deterministic
/// given (scene.rng_seed, block_index).
Waveform simulate_block(const Scene& scene, const PulseTrainConfig& config,
                        std::size_t block_index);

/// Renders all blocks of one gesture; trajectory.duration_s must be a whole
/// number of blocks.
std::vector<Waveform> simulate_gesture(const Scene& scene, const PulseTrainConfig& config);

}  // namespace ultragest
