#pragma once

#include <filesystem>
#include <string>

#include "ultragest/signal.hpp"

namespace ultragest {

enum class WavFormat { Pcm16, Float32 };

/// Writes a mono WAV file. Pcm16 clamps samples to [-1, 1] before quantising;
/// Float32 stores them as-is.
void write_wav(const std::filesystem::path& path, const Waveform& wf, WavFormat format);

/// Reads a mono WAV file (16-bit PCM or 32-bit float). Throws DataError on
/// malformed or truncated files, IoError when the file cannot be opened.
Waveform read_wav(const std::filesystem::path& path);

/// Writes samples as CSV, one value per line.
void write_waveform_csv(const std::filesystem::path& path, const Waveform& wf);

WavFormat wav_format_from_string(const std::string& s);
std::string to_string(WavFormat format);

}  // namespace ultragest
