#pragma once

// End-to-end composition used by the CLI and the sweeps: audio -> surface
// displacement -> IF capture (with artifacts) -> recovered vibration -> scores.

#include <cstdint>
#include <string>

#include "mmvib/metrics.hpp"
#include "mmvib/radar_sim.hpp"
#include "mmvib/synth.hpp"
#include "mmvib/vib_extract.hpp"

namespace mmvib {

struct PipelineConfig {
  ChirpConfig radar = ChirpConfig::defaults();
  std::string material_name = "pet";
  SurfaceMaterial material = material_preset("pet");
  double force_scale = 50.0;  ///< N per unit audio amplitude
  double range_m = 1.5;
  double noise_floor_db = -40.0;
  double beginning_sigma = 10.0;
  double periodic_sigma = 6.0;
  SynthesisConfig synthesis;
  Index neighbor_half_window = 2;
  double score_rate = 8000.0;
  std::uint64_t seed = 0;

  /// Throws Error with a "section.key: reason" message.
  void validate() const;
  TargetScene scene() const { return TargetScene{range_m, material.reflectivity, noise_floor_db}; }
};

/// Seed streams derived from PipelineConfig::seed.
inline constexpr std::uint64_t kNoiseStream = 10;
inline constexpr std::uint64_t kArtifactStream = 11;
inline constexpr std::uint64_t kSynthesisStream = 12;

/// Resamples to the chirp rate, applies the surface response, simulates the
/// capture and injects the configured artifacts.
IFCapture simulate_capture(const PipelineConfig& cfg, const AudioBuffer& audio);

/// Source audio as compared in scoring: resampled to `score_rate` (which band
/// limits it to score_rate / 2).
AudioBuffer scoring_reference(const AudioBuffer& source, double score_rate);

/// Z-scores both sides at `score_rate` and runs every signal metric.
MetricsReport score_recovered(const AudioBuffer& source, const VibrationTrace& trace, double score_rate);

}  // namespace mmvib
