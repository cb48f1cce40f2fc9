#pragma once

#include <filesystem>
#include <vector>

#include "ultragest/dsp.hpp"

namespace ultragest {

/// Binary container for a sequence of equally sized MotionFrames.
///
/// Layout (little-endian):
///   0  char[4]  magic "UGFS"
///   4  u16      version (1)
///   6  u16      frame_len (lags per frame)
///   8  u32      frame_count
///  12  u32      sample_rate (Hz, rounded)
///  16  f32[frame_count * frame_len] values, frame-major
/// followed by two u32 with the gate (min_lag, max_lag).
void write_framestack(const std::filesystem::path& path, const std::vector<MotionFrame>& frames,
                      double sample_rate_hz);

struct FrameStack {
  std::vector<MotionFrame> frames;
  double sample_rate_hz = 0.0;
};

FrameStack read_framestack(const std::filesystem::path& path);

/// One frame as CSV rows of `lag_s,value`.
void write_motion_frame_csv(const std::filesystem::path& path, const MotionFrame& frame,
                            double sample_rate_hz);

}  // namespace ultragest
