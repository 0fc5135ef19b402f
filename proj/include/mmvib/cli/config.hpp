#pragma once

#include <filesystem>

#include "mmvib/pipeline.hpp"

namespace mmvib::cli {

/// INI-style configuration:
///
///   [radar]      carrier_freq slope chirp_duration adc_samples_per_chirp
///                chirps_per_frame frame_period
///   [material]   preset mass stiffness damping reflectivity force_scale
///   [scene]      range_m noise_floor_db
///   [artifacts]  beginning_sigma periodic_sigma
///   [synthesis]  alpha beta
///   [extract]    neighbor_half_window
///   [run]        seed score_rate
///
/// Missing keys keep their defaults; `preset` is applied before the explicit
/// material fields. Unknown sections or keys are errors.
PipelineConfig load_config(const std::filesystem::path& path);

/// MMVIB_SEED, when set, replaces `seed`. Throws on a malformed value.
std::uint64_t seed_from_env(std::uint64_t seed);

}  // namespace mmvib::cli
