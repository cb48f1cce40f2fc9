#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>

#include "ultragest/errors.hpp"
#include "ultragest/rng.hpp"
#include "ultragest/wav.hpp"

using namespace ultragest;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "ultragest_wav_tests";
  fs::create_directories(dir);
  return dir / name;
}

Waveform ramp_waveform(std::size_t n) {
  Waveform wf;
  wf.sample_rate_hz = 192000.0;
  wf.samples.resize(n);
  Rng rng(42);
  for (auto& s : wf.samples) s = rng.uniform(-0.9, 0.9);
  return wf;
}

}  // namespace

TEST_SUITE("wav") {
  TEST_CASE("float32 round trip keeps float-rounded samples") {
    const Waveform wf = ramp_waveform(1000);
    const fs::path path = temp_file("f32.wav");
    write_wav(path, wf, WavFormat::Float32);
    const Waveform back = read_wav(path);
    REQUIRE(back.samples.size() == wf.samples.size());
    CHECK(back.sample_rate_hz == doctest::Approx(192000.0));
    for (std::size_t i = 0; i < wf.samples.size(); ++i)
      CHECK(back.samples[i] == static_cast<double>(static_cast<float>(wf.samples[i])));
  }

  TEST_CASE("pcm16 round trip within one quantisation step") {
    const Waveform wf = ramp_waveform(1000);
    const fs::path path = temp_file("pcm16.wav");
    write_wav(path, wf, WavFormat::Pcm16);
    const Waveform back = read_wav(path);
    REQUIRE(back.samples.size() == wf.samples.size());
    for (std::size_t i = 0; i < wf.samples.size(); ++i)
      CHECK(std::abs(back.samples[i] - wf.samples[i]) <= 1.0 / 32767.0);
  }

  TEST_CASE("pcm16 clamps out-of-range samples") {
    Waveform wf;
    wf.sample_rate_hz = 48000.0;
    wf.samples = {2.0, -3.0, 0.5};
    const fs::path path = temp_file("clamp.wav");
    write_wav(path, wf, WavFormat::Pcm16);
    const Waveform back = read_wav(path);
    CHECK(back.samples[0] == doctest::Approx(1.0));
    CHECK(back.samples[1] == doctest::Approx(-1.0));
  }

  TEST_CASE("truncated data chunk is rejected") {
    const Waveform wf = ramp_waveform(500);
    const fs::path path = temp_file("trunc.wav");
    write_wav(path, wf, WavFormat::Float32);
    const auto full_size = fs::file_size(path);
    fs::resize_file(path, full_size - 64);
    CHECK_THROWS_AS(read_wav(path), DataError);
  }

  TEST_CASE("garbage file is rejected") {
    const fs::path path = temp_file("garbage.wav");
    std::ofstream(path) << "this is not audio";
    CHECK_THROWS_AS(read_wav(path), DataError);
  }

  TEST_CASE("missing file raises IoError") {
    CHECK_THROWS_AS(read_wav(temp_file("nope_does_not_exist.wav")), IoError);
  }

  TEST_CASE("non-finite float samples are rejected") {
    Waveform wf;
    wf.sample_rate_hz = 48000.0;
    wf.samples = {0.1, std::numeric_limits<double>::infinity(), 0.2};
    const fs::path path = temp_file("inf.wav");
    write_wav(path, wf, WavFormat::Float32);
    CHECK_THROWS_AS(read_wav(path), DataError);
  }

  TEST_CASE("csv export writes one line per sample") {
    Waveform wf;
    wf.sample_rate_hz = 1000.0;
    wf.samples = {0.25, -0.5, 1.0};
    const fs::path path = temp_file("samples.csv");
    write_waveform_csv(path, wf);
    std::ifstream f(path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(f, line)) ++lines;
    CHECK(lines == 3);
  }

  TEST_CASE("format name parsing") {
    CHECK(wav_format_from_string("pcm16") == WavFormat::Pcm16);
    CHECK(wav_format_from_string("float32") == WavFormat::Float32);
    CHECK_THROWS_AS(wav_format_from_string("mp3"), ConfigError);
  }
}
