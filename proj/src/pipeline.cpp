#include "mmvib/pipeline.hpp"

#include <cmath>

#include "mmvib/resample.hpp"
#include "mmvib/seed.hpp"

namespace mmvib {

void PipelineConfig::validate() const {
  radar.validate();
  material.validate();
  if (!(force_scale > 0.0) || !std::isfinite(force_scale)) throw Error("material.force_scale: must be > 0");
  if (!(range_m > 0.0)) throw Error("scene.range_m: must be > 0");
  if (range_m >= radar.max_range()) throw Error("scene.range_m: range aliasing (max " + std::to_string(radar.max_range()) + " m)");
  if (!std::isfinite(noise_floor_db)) throw Error("scene.noise_floor_db: must be finite");
  if (!(beginning_sigma >= 0.0)) throw Error("artifacts.beginning_sigma: must be >= 0");
  if (!(periodic_sigma >= 0.0)) throw Error("artifacts.periodic_sigma: must be >= 0");
  synthesis.validate();
  if (neighbor_half_window < 1) throw Error("extract.neighbor_half_window: must be >= 1");
  if (!(score_rate > 0.0)) throw Error("run.score_rate: must be > 0");
}

IFCapture simulate_capture(const PipelineConfig& cfg, const AudioBuffer& audio) {
  cfg.validate();
  if (audio.size() == 0) throw Error("empty audio");
  audio.validate();
  const AudioBuffer at_chirp_rate = resample(audio, cfg.radar.sampling_rate());
  const VibrationTrace vib = displacement_from_audio(at_chirp_rate, cfg.material, cfg.force_scale);
  IFCapture cap = simulate_if_frames(cfg.radar, vib, cfg.scene(), derive_seed(cfg.seed, kNoiseStream));
  cap = inject_artifacts(std::move(cap), cfg.beginning_sigma, cfg.periodic_sigma,
                         derive_seed(cfg.seed, kArtifactStream));
  return cap;
}

AudioBuffer scoring_reference(const AudioBuffer& source, double score_rate) { return resample(source, score_rate); }

MetricsReport score_recovered(const AudioBuffer& source, const VibrationTrace& trace, double score_rate) {
  const AudioBuffer ref = zscore_normalize(scoring_reference(source, score_rate));
  const AudioBuffer deg = zscore_normalize(resample(AudioBuffer{trace.displacement, trace.sample_rate}, score_rate));
  return score_pair(ref, deg);
}

}  // namespace mmvib
