#include "ultragest/wav.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "ultragest/errors.hpp"

namespace ultragest {

namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

struct ChunkReader {
  const std::string& data;
  std::size_t pos = 0;

  bool at_end() const { return pos + 8 > data.size(); }

  // Returns chunk id and payload range; advances past the chunk (with padding).
  bool next(std::string& id, std::size_t& payload_pos, std::uint32_t& payload_size) {
    if (at_end()) return false;
    id = data.substr(pos, 4);
    std::uint32_t size;
    std::memcpy(&size, data.data() + pos + 4, 4);
    payload_pos = pos + 8;
    payload_size = size;
    pos = payload_pos + size + (size % 2);  // chunks are word-aligned
    return true;
  }
};

}  // namespace

void write_wav(const std::filesystem::path& path, const Waveform& wf, WavFormat format) {
  const auto n = static_cast<std::uint32_t>(wf.samples.size());
  const auto rate = static_cast<std::uint32_t>(std::llround(wf.sample_rate_hz));
  const std::uint16_t channels = 1;
  const std::uint16_t bits = format == WavFormat::Pcm16 ? 16 : 32;
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const std::uint32_t data_bytes = n * block_align;

  std::string out;
  out.reserve(64 + data_bytes);
  out += "RIFF";
  const bool is_float = format == WavFormat::Float32;
  // float fmt chunk carries cbSize and a fact chunk per the spec of the format
  const std::uint32_t fmt_size = is_float ? 18 : 16;
  const std::uint32_t riff_size =
      4 + (8 + fmt_size) + (is_float ? 8 + 4 : 0) + 8 + data_bytes;
  put(out, riff_size);
  out += "WAVE";

  out += "fmt ";
  put(out, fmt_size);
  put(out, static_cast<std::uint16_t>(is_float ? 3 : 1));  // format tag
  put(out, channels);
  put(out, rate);
  put(out, rate * block_align);  // byte rate
  put(out, block_align);
  put(out, bits);
  if (is_float) put(out, static_cast<std::uint16_t>(0));  // cbSize

  if (is_float) {
    out += "fact";
    put(out, static_cast<std::uint32_t>(4));
    put(out, n);
  }

  out += "data";
  put(out, data_bytes);
  if (format == WavFormat::Pcm16) {
    for (double s : wf.samples) {
      const double clamped = std::clamp(s, -1.0, 1.0);
      put(out, static_cast<std::int16_t>(std::lround(clamped * 32767.0)));
    }
  } else {
    for (double s : wf.samples) put(out, static_cast<float>(s));
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  if (data.size() < 12 || data.compare(0, 4, "RIFF") != 0 || data.compare(8, 4, "WAVE") != 0)
    throw DataError("malformed WAV (missing RIFF/WAVE header): " + path.string());

  std::uint16_t format_tag = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;

  ChunkReader chunks{data, 12};
  std::string id;
  std::size_t payload = 0;
  std::uint32_t size = 0;
  while (chunks.next(id, payload, size)) {
    if (id == "fmt ") {
      if (size < 16 || payload + 16 > data.size())
        throw DataError("malformed WAV (truncated fmt chunk): " + path.string());
      std::memcpy(&format_tag, data.data() + payload, 2);
      std::memcpy(&channels, data.data() + payload + 2, 2);
      std::memcpy(&rate, data.data() + payload + 4, 4);
      std::memcpy(&bits, data.data() + payload + 14, 2);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw DataError("malformed WAV (data before fmt): " + path.string());
      if (payload + size > data.size())
        throw DataError("malformed WAV (truncated data chunk): " + path.string());
      if (channels != 1) throw DataError("unsupported WAV: expected mono, got " +
                                         std::to_string(channels) + " channels");
      Waveform wf;
      wf.sample_rate_hz = static_cast<double>(rate);
      if (format_tag == 1 && bits == 16) {
        const std::size_t n = size / 2;
        wf.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          std::int16_t v;
          std::memcpy(&v, data.data() + payload + 2 * i, 2);
          wf.samples[i] = static_cast<double>(v) / 32767.0;
        }
      } else if (format_tag == 3 && bits == 32) {
        const std::size_t n = size / 4;
        wf.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          float v;
          std::memcpy(&v, data.data() + payload + 4 * i, 4);
          if (!std::isfinite(v))
            throw DataError("malformed WAV (non-finite sample): " + path.string());
          wf.samples[i] = static_cast<double>(v);
        }
      } else {
        throw DataError("unsupported WAV encoding (tag " + std::to_string(format_tag) + ", " +
                        std::to_string(bits) + " bits)");
      }
      return wf;
    }
    // other chunks (fact, LIST, ...) are skipped
  }
  throw DataError("malformed WAV (no data chunk): " + path.string());
}

void write_waveform_csv(const std::filesystem::path& path, const Waveform& wf) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  char buf[64];
  for (double s : wf.samples) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), s);
    f.write(buf, end - buf);
    f.put('\n');
  }
  if (!f) throw IoError("write failed: " + path.string());
}

WavFormat wav_format_from_string(const std::string& s) {
  if (s == "pcm16") return WavFormat::Pcm16;
  if (s == "float32") return WavFormat::Float32;
  throw ConfigError("unknown wav format '" + s + "' (expected pcm16 or float32)");
}

std::string to_string(WavFormat format) {
  return format == WavFormat::Pcm16 ? "pcm16" : "float32";
}

}  // namespace ultragest
