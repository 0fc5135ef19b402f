#pragma once

// FMCW capture simulator: a surface driven by sound (damped forced vibration)
// observed by a single-channel chirp radar, with the duty-cycle artifacts the
// hardware imprints on the phase stream.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmvib/signal_core.hpp"

namespace mmvib {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kMaxBandwidth = 4.0e9;

/// Radar waveform. Chirps are laid out on a uniform grid of
/// frame_period / chirps_per_frame; each chirp occupies chirp_duration of its
/// slot, and the remainder is idle time.
struct ChirpConfig {
  double carrier_freq = 60.0e9;  ///< sweep start, Hz
  double slope = 0.0;            ///< Hz/s
  double chirp_duration = 0.0;   ///< s
  Index adc_samples_per_chirp = 256;
  Index chirps_per_frame = 256;
  double frame_period = 0.032;   ///< s

  /// 60 GHz start, 4 GHz sweep, 256 chirps in a 32 ms frame, chirps
  /// occupying `duty` of the frame.
  static ChirpConfig defaults(double duty = 0.9);

  /// Same frame period and slope with a different chirp count; chirp
  /// duration (and with it the swept bandwidth) scales inversely.
  ChirpConfig with_chirps_per_frame(Index chirps) const;

  double sampling_rate() const { return double(chirps_per_frame) / frame_period; }
  double bandwidth() const { return slope * chirp_duration; }
  double wavelength() const { return kSpeedOfLight / carrier_freq; }
  double adc_rate() const { return double(adc_samples_per_chirp) / chirp_duration; }
  double max_range() const;

  /// Throws Error naming the offending field.
  void validate() const;
};

/// c / (2 * slope * chirp_duration).
double range_resolution(const ChirpConfig& cfg);

struct SurfaceMaterial {
  double mass = 1.0;       ///< kg
  double stiffness = 1.0;  ///< N/m
  double damping = 0.0;    ///< N s/m
  double reflectivity = 1.0;

  double natural_frequency() const { return std::sqrt(stiffness / mass); }  ///< rad/s
  void validate() const;
};

/// Named surfaces used by the CLI and sweeps: "pet", "tinfoil", "cardboard",
/// "glass". Throws for unknown names.
SurfaceMaterial material_preset(const std::string& name);
std::vector<std::string> material_preset_names();

/// Steady-state amplitude of a damped oscillator driven at w (rad/s):
/// F0 / sqrt((k - m w^2)^2 + (c w)^2). Throws "unbounded resonance" when the
/// denominator vanishes.
double forced_response_amplitude(const SurfaceMaterial& mat, double force_amplitude, double w);

struct VibrationTrace {
  Eigen::VectorXd displacement;  ///< metres
  double sample_rate = 0.0;

  Index size() const { return displacement.size(); }
};

/// Zero-phase filtering of the forcing signal by |X(w)| / F0, scaled by
/// `force_scale` newtons per unit audio amplitude.
VibrationTrace displacement_from_audio(const AudioBuffer& audio, const SurfaceMaterial& mat, double force_scale);

enum class ArtifactKind { beginning, periodic };

struct ArtifactEvent {
  ArtifactKind kind;
  Index frame = 0;
  Index chirp = 0;
  double magnitude_sigma = 0.0;
  double phase_rad = 0.0;  ///< signed rotation applied to the chirp
};

struct ArtifactLog {
  double sigma_rad = 0.0;  ///< std of the clean extracted phase
  std::uint64_t seed = 0;
  std::vector<ArtifactEvent> events;
};

using IFSample = std::complex<float>;
using IFMatrix = Eigen::Matrix<IFSample, Eigen::Dynamic, Eigen::Dynamic>;

/// Complex IF samples, [adc_samples_per_chirp x (frames * chirps_per_frame)],
/// one column per chirp in frame-major order.
struct IFCapture {
  ChirpConfig config;
  Index num_frames = 0;
  IFMatrix samples;
  ArtifactLog artifact_log;

  Index total_chirps() const { return samples.cols(); }
  auto frame(Index f) { return samples.middleCols(f * config.chirps_per_frame, config.chirps_per_frame); }
  auto frame(Index f) const { return samples.middleCols(f * config.chirps_per_frame, config.chirps_per_frame); }
  auto chirp(Index f, Index c) { return samples.col(f * config.chirps_per_frame + c); }
};

struct TargetScene {
  double range_m = 1.5;
  double reflectivity = 1.0;      ///< linear IF amplitude
  double noise_floor_db = -40.0;  ///< complex noise power per sample, dB re unit amplitude
};

/// One chirp per vibration sample; whole frames only (a trailing partial frame
/// is dropped). Each chirp is reflectivity * exp(j(2 pi f_b t + 4 pi (R + d) / lambda))
/// plus circular Gaussian noise. Throws "range aliasing" past the unambiguous
/// range and "sample rate mismatch" when the trace is not at the chirp rate.
IFCapture simulate_if_frames(const ChirpConfig& cfg, const VibrationTrace& vib, const TargetScene& scene,
                             std::uint64_t seed);

/// Rotates the phase of the first chirp of the capture by beginning_sigma * sigma
/// and chirp 0 of every frame by periodic_sigma * sigma, where sigma is the
/// standard deviation of the clean extracted phase series. One sign per
/// artifact kind is drawn from `seed`; all periodic spikes share it.
IFCapture inject_artifacts(IFCapture cap, double beginning_sigma, double periodic_sigma, std::uint64_t seed);

}  // namespace mmvib
