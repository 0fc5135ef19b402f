#pragma once

// IFCapture container. All fields little-endian:
//
//   offset  size  field
//   0       8     magic "MMVIBIF1"
//   8       4     u32 format version (1)
//   12      4     u32 adc_samples_per_chirp
//   16      4     u32 chirps_per_frame
//   20      4     u32 num_frames
//   24      8     f64 carrier_freq (Hz)
//   32      8     f64 slope (Hz/s)
//   40      8     f64 chirp_duration (s)
//   48      8     f64 frame_period (s)
//   56      ...   frames * chirps_per_frame * adc_samples_per_chirp complex
//                 samples, frame-major then chirp then fast time, each as
//                 f32 real followed by f32 imaginary.
//
// The artifact log travels in a JSON sidecar (<capture>.json).

#include <filesystem>

#include <json.hpp>

#include "mmvib/radar_sim.hpp"

namespace mmvib {

inline constexpr std::size_t kCaptureHeaderBytes = 56;

void write_capture(const std::filesystem::path& path, const IFCapture& cap);
/// Throws "corrupt capture header" on bad magic, version, sizes or length.
IFCapture read_capture(const std::filesystem::path& path);

nlohmann::json artifact_log_to_json(const ArtifactLog& log);
ArtifactLog artifact_log_from_json(const nlohmann::json& j);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

/// Writes `j` pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace mmvib
