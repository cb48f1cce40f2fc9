#include "ultragest/framestack.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "ultragest/errors.hpp"

namespace ultragest {

namespace {

constexpr char kMagic[4] = {'U', 'G', 'F', 'S'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put(std::ofstream& f, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  f.write(buf, sizeof(T));
}

template <typename T>
T get(std::ifstream& f, const std::filesystem::path& path) {
  char buf[sizeof(T)];
  f.read(buf, sizeof(T));
  if (!f) throw DataError("truncated frame stack: " + path.string());
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void write_framestack(const std::filesystem::path& path, const std::vector<MotionFrame>& frames,
                      double sample_rate_hz) {
  if (frames.empty()) throw DataError("frame stack: nothing to write");
  const std::size_t frame_len = frames.front().values.size();
  if (frame_len > 0xFFFF) throw DataError("frame stack: frame too long for format");
  for (const auto& fr : frames)
    if (fr.values.size() != frame_len) throw DataError("frame stack: inconsistent frame lengths");

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f.write(kMagic, 4);
  put(f, kVersion);
  put(f, static_cast<std::uint16_t>(frame_len));
  put(f, static_cast<std::uint32_t>(frames.size()));
  put(f, static_cast<std::uint32_t>(std::llround(sample_rate_hz)));
  for (const auto& fr : frames)
    for (double v : fr.values) put(f, static_cast<float>(v));
  put(f, static_cast<std::uint32_t>(frames.front().gate.min_lag));
  put(f, static_cast<std::uint32_t>(frames.front().gate.max_lag));
  if (!f) throw IoError("write failed: " + path.string());
}

FrameStack read_framestack(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());

  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("not a frame stack file: " + path.string());
  const auto version = get<std::uint16_t>(f, path);
  if (version != kVersion)
    throw DataError("unsupported frame stack version " + std::to_string(version));
  const auto frame_len = get<std::uint16_t>(f, path);
  const auto frame_count = get<std::uint32_t>(f, path);
  const auto rate = get<std::uint32_t>(f, path);

  FrameStack stack;
  stack.sample_rate_hz = static_cast<double>(rate);
  stack.frames.resize(frame_count);
  for (auto& fr : stack.frames) {
    fr.values.resize(frame_len);
    for (auto& v : fr.values) v = static_cast<double>(get<float>(f, path));
  }
  const auto gate_min = get<std::uint32_t>(f, path);
  const auto gate_max = get<std::uint32_t>(f, path);
  for (auto& fr : stack.frames) fr.gate = LagGate{gate_min, gate_max};
  return stack;
}

void write_motion_frame_csv(const std::filesystem::path& path, const MotionFrame& frame,
                            double sample_rate_hz) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << "lag_s,value\n";
  char buf[64];
  for (std::size_t lag = 0; lag < frame.values.size(); ++lag) {
    auto [e1, ec1] =
        std::to_chars(buf, buf + sizeof(buf), static_cast<double>(lag) / sample_rate_hz);
    f.write(buf, e1 - buf);
    f.put(',');
    auto [e2, ec2] = std::to_chars(buf, buf + sizeof(buf), frame.values[lag]);
    f.write(buf, e2 - buf);
    f.put('\n');
  }
  if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace ultragest
