#pragma once

#include <filesystem>

#include "mmvib/signal_core.hpp"

namespace mmvib {

/// Reads a RIFF/WAVE file (PCM 8/16/24/32-bit, IEEE float 32/64, including
/// WAVE_FORMAT_EXTENSIBLE). Multi-channel input is averaged down to mono.
AudioBuffer read_wav(const std::filesystem::path& path);

/// Writes mono IEEE float32. The sample rate is rounded to the nearest Hz.
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio);

}  // namespace mmvib
