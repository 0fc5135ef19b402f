#include "mmvib/radar_sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <unsupported/Eigen/FFT>

#include "mmvib/vib_extract.hpp"

namespace mmvib {

ChirpConfig ChirpConfig::defaults(double duty) {
  ChirpConfig cfg;
  cfg.chirp_duration = duty * cfg.frame_period / double(cfg.chirps_per_frame);
  cfg.slope = kMaxBandwidth / cfg.chirp_duration;
  return cfg;
}

ChirpConfig ChirpConfig::with_chirps_per_frame(Index chirps) const {
  ChirpConfig out = *this;
  out.chirps_per_frame = chirps;
  out.chirp_duration = chirp_duration * double(chirps_per_frame) / double(chirps);
  return out;
}

double ChirpConfig::max_range() const { return range_resolution(*this) * double(adc_samples_per_chirp / 2); }

void ChirpConfig::validate() const {
  if (!(carrier_freq > 0.0)) throw Error("radar.carrier_freq: must be > 0");
  if (!(slope > 0.0)) throw Error("radar.slope: must be > 0");
  if (!(chirp_duration > 0.0)) throw Error("radar.chirp_duration: must be > 0");
  if (adc_samples_per_chirp < 2) throw Error("radar.adc_samples_per_chirp: must be >= 2");
  if (chirps_per_frame < 2) throw Error("radar.chirps_per_frame: must be >= 2");
  if (!(frame_period > 0.0)) throw Error("radar.frame_period: must be > 0");
  if (double(chirps_per_frame) * chirp_duration > frame_period * (1.0 + 1e-12))
    throw Error("radar.chirp_duration: chirps_per_frame * chirp_duration exceeds frame_period");
  if (bandwidth() > kMaxBandwidth * (1.0 + 1e-9)) throw Error("radar.slope: swept bandwidth exceeds 4 GHz");
}

double range_resolution(const ChirpConfig& cfg) {
  if (!(cfg.slope > 0.0 && cfg.chirp_duration > 0.0)) throw Error("slope and chirp_duration must be > 0");
  return kSpeedOfLight / (2.0 * cfg.slope * cfg.chirp_duration);
}

void SurfaceMaterial::validate() const {
  if (!(mass > 0.0)) throw Error("material.mass: must be > 0");
  if (!(stiffness > 0.0)) throw Error("material.stiffness: must be > 0");
  if (!(damping >= 0.0)) throw Error("material.damping: must be >= 0");
  if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) throw Error("material.reflectivity: must be in [0, 1]");
}

namespace {

// Built from natural frequency (Hz), damping ratio and mass.
SurfaceMaterial make_material(double mass, double natural_hz, double damping_ratio, double reflectivity) {
  const double wn = 2.0 * std::numbers::pi * natural_hz;
  SurfaceMaterial m;
  m.mass = mass;
  m.stiffness = mass * wn * wn;
  m.damping = 2.0 * damping_ratio * std::sqrt(m.stiffness * mass);
  m.reflectivity = reflectivity;
  return m;
}

const std::map<std::string, SurfaceMaterial>& presets() {
  static const std::map<std::string, SurfaceMaterial> table{
      {"pet", make_material(2.0e-3, 3000.0, 0.5, 0.8)},
      {"tinfoil", make_material(6.0e-3, 900.0, 0.15, 1.0)},
      {"cardboard", make_material(8.0e-3, 500.0, 0.4, 0.4)},
      {"glass", make_material(5.0e-2, 2500.0, 0.05, 0.5)},
  };
  return table;
}

}  // namespace

SurfaceMaterial material_preset(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw Error("unknown material preset: " + name);
  return it->second;
}

std::vector<std::string> material_preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : presets()) names.push_back(name);
  return names;
}

double forced_response_amplitude(const SurfaceMaterial& mat, double force_amplitude, double w) {
  const double elastic = mat.stiffness - mat.mass * w * w;
  const double viscous = mat.damping * w;
  const double denom = std::sqrt(elastic * elastic + viscous * viscous);
  if (denom == 0.0) throw Error("unbounded resonance");
  return force_amplitude / denom;
}

VibrationTrace displacement_from_audio(const AudioBuffer& audio, const SurfaceMaterial& mat, double force_scale) {
  if (audio.size() == 0) throw Error("empty audio");
  mat.validate();
  const Index n = audio.size();
  Index n_fft = 1;
  while (n_fft < 2 * n) n_fft <<= 1;

  Eigen::VectorXcd spectrum = rfft(audio.samples, n_fft);
  for (Index k = 0; k < spectrum.size(); ++k) {
    const double w = 2.0 * std::numbers::pi * double(k) * audio.sample_rate / double(n_fft);
    spectrum[k] *= forced_response_amplitude(mat, force_scale, w);
  }

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  Eigen::VectorXd filtered;
  fft.inv(filtered, spectrum, n_fft);
  return VibrationTrace{filtered.head(n), audio.sample_rate};
}

IFCapture simulate_if_frames(const ChirpConfig& cfg, const VibrationTrace& vib, const TargetScene& scene,
                             std::uint64_t seed) {
  cfg.validate();
  if (std::abs(vib.sample_rate - cfg.sampling_rate()) > 1e-9 * cfg.sampling_rate())
    throw Error("sample rate mismatch");
  if (!(scene.range_m > 0.0)) throw Error("scene.range_m: must be > 0");
  if (scene.range_m >= cfg.max_range()) throw Error("range aliasing");
  if (!(scene.reflectivity >= 0.0)) throw Error("scene.reflectivity: must be >= 0");

  const double lambda = cfg.wavelength();
  if (!vib.displacement.allFinite()) throw Error("non-finite displacement");
  if (vib.size() > 0 && vib.displacement.cwiseAbs().maxCoeff() >= lambda / 4.0)
    throw Error("displacement exceeds small-vibration regime");

  const Index n = cfg.adc_samples_per_chirp;
  const Index frames = vib.size() / cfg.chirps_per_frame;
  if (frames == 0) throw Error("input too short");

  IFCapture cap;
  cap.config = cfg;
  cap.num_frames = frames;
  cap.samples.resize(n, frames * cfg.chirps_per_frame);

  // Beat tone along fast time: f_b / adc_rate cycles per sample.
  const double beat = 2.0 * cfg.slope * scene.range_m / kSpeedOfLight;
  const double step = 2.0 * std::numbers::pi * beat / cfg.adc_rate();
  Eigen::VectorXcd fast(n);
  for (Index i = 0; i < n; ++i) fast[i] = std::polar(scene.reflectivity, step * double(i));

  const double noise_power = std::pow(10.0, scene.noise_floor_db / 10.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));
  const bool noisy = noise_power > 0.0;

  const double k = 4.0 * std::numbers::pi / lambda;
  const double base_phase = std::fmod(k * scene.range_m, 2.0 * std::numbers::pi);
  for (Index g = 0; g < cap.total_chirps(); ++g) {
    const std::complex<double> rot = std::polar(1.0, base_phase + k * vib.displacement[g]);
    for (Index i = 0; i < n; ++i) {
      std::complex<double> s = rot * fast[i];
      if (noisy) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        s += std::complex<double>(re, im);
      }
      cap.samples(i, g) = IFSample(static_cast<float>(s.real()), static_cast<float>(s.imag()));
    }
  }
  return cap;
}

IFCapture inject_artifacts(IFCapture cap, double beginning_sigma, double periodic_sigma, std::uint64_t seed) {
  if (!(beginning_sigma >= 0.0 && periodic_sigma >= 0.0)) throw Error("artifact magnitudes must be >= 0");
  cap.artifact_log.seed = seed;
  if (beginning_sigma == 0.0 && periodic_sigma == 0.0) return cap;

  const RangeProfile profile = range_fft(cap);
  const Eigen::VectorXd phase = extract_phase_series(profile, select_target_bin(profile));
  const double sigma = mean_std(phase).second;
  cap.artifact_log.sigma_rad = sigma;

  // One sign per artifact kind, shared by every periodic spike.
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution positive(0.5);
  const double beginning_sign = positive(rng) ? 1.0 : -1.0;
  const double periodic_sign = positive(rng) ? 1.0 : -1.0;
  auto rotate = [&](ArtifactKind kind, Index frame, double magnitude) {
    const double sign = kind == ArtifactKind::beginning ? beginning_sign : periodic_sign;
    const double angle = sign * magnitude * sigma;
    const std::complex<float> r(static_cast<float>(std::cos(angle)), static_cast<float>(std::sin(angle)));
    cap.chirp(frame, 0) *= r;
    cap.artifact_log.events.push_back(ArtifactEvent{kind, frame, 0, magnitude, angle});
  };

  if (beginning_sigma > 0.0) rotate(ArtifactKind::beginning, 0, beginning_sigma);
  if (periodic_sigma > 0.0)
    for (Index f = 0; f < cap.num_frames; ++f) rotate(ArtifactKind::periodic, f, periodic_sigma);
  return cap;
}

}  // namespace mmvib
