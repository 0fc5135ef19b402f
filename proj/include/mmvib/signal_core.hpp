#pragma once

// Time-frequency primitives shared by the simulator, the extractor and the
// metrics: Hann-windowed STFT, HTK mel filterbanks, z-score normalization and
// phase unwrapping.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

#include <Eigen/Dense>

#include "mmvib/error.hpp"

namespace mmvib {

using Index = Eigen::Index;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Mono audio; `samples` are dimensionless amplitudes.
struct AudioBuffer {
  Eigen::VectorXd samples;
  double sample_rate = 0.0;

  Index size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
  /// Throws if the rate is not positive or a sample is non-finite.
  void validate() const;
};

/// STFT output, [freq_bins x time_frames] with freq_bins = window_len/2 + 1.
/// Scalar is std::complex<double> before taking magnitudes, double after.
template <typename Scalar>
struct BasicSpectrogram {
  Mat<Scalar> values;
  Index window_len = 0;
  Index hop = 0;
  double sample_rate = 0.0;

  Index freq_bins() const { return values.rows(); }
  Index frames() const { return values.cols(); }
};

using ComplexSpectrogram = BasicSpectrogram<std::complex<double>>;
using Spectrogram = BasicSpectrogram<double>;

struct MelConfig {
  Index n_mels = 80;
  Index window_len = 1024;
  Index hop = 256;
  double fmin = 0.0;
  /// Unset means Nyquist of the signal being analysed.
  std::optional<double> fmax;

  /// hop = window_len / 4.
  static MelConfig with_window(Index n_mels, Index window_len);
  double resolved_fmax(double sample_rate) const { return fmax.value_or(sample_rate / 2.0); }
  void validate(double sample_rate) const;
};

/// The seven (n_mels, window) pairs of the multi-resolution mel loss.
std::array<MelConfig, 7> multi_resolution_mel_configs();

// ---------------------------------------------------------------------------
// Windows and scales

/// Periodic Hann window: w[n] = 0.5 - 0.5 cos(2 pi n / N).
template <typename Scalar = double>
Vec<Scalar> hann_window(Index n) {
  Vec<Scalar> w(n);
  for (Index i = 0; i < n; ++i)
    w[i] = Scalar(0.5) - Scalar(0.5) * std::cos(Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(i) / Scalar(n));
  return w;
}

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular HTK-mel filterbank, [n_mels x (n_fft/2 + 1)], unit peak per
/// triangle. Throws "over-resolved filterbank" when n_mels exceeds the number
/// of FFT bins.
Eigen::MatrixXd mel_filterbank(Index n_mels, Index n_fft, double sample_rate, double fmin, double fmax);

// ---------------------------------------------------------------------------
// Transforms

/// Complex one-sided STFT with a periodic Hann window and no padding:
/// frames = floor((len - window_len) / hop) + 1.
ComplexSpectrogram stft(const AudioBuffer& audio, Index window_len, Index hop);

Spectrogram magnitude(const ComplexSpectrogram& spec);

/// Mel filterbank applied to the magnitude STFT, [n_mels x frames].
Eigen::MatrixXd mel_spectrogram(const AudioBuffer& audio, const MelConfig& cfg);

/// One-sided spectrum of a real signal, zero-padded (or truncated) to n_fft.
Eigen::VectorXcd rfft(const Eigen::Ref<const Eigen::VectorXd>& x, Index n_fft);

// ---------------------------------------------------------------------------
// Normalization and phase

/// Z-score with population statistics. Throws "degenerate normalization" for
/// fewer than two samples or (numerically) zero variance.
template <typename Derived>
Vec<typename Derived::Scalar> zscore(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Index n = x.size();
  if (n < 2) throw Error("degenerate normalization");
  const Scalar mean = x.mean();
  Vec<Scalar> centered = x.array() - mean;
  const Scalar sd = std::sqrt(centered.squaredNorm() / Scalar(n));
  const Scalar scale = x.cwiseAbs().maxCoeff();
  if (!(sd > Scalar(1e-12) * scale) || !std::isfinite(sd)) throw Error("degenerate normalization");
  return centered / sd;
}

AudioBuffer zscore_normalize(const AudioBuffer& audio);

/// Removes 2*pi jumps so that successive differences lie in (-pi, pi].
/// The correction is accumulated as an integer count of turns, so the output
/// differs from the input by exact multiples of 2*pi.
template <typename Derived>
Vec<typename Derived::Scalar> unwrap_phase(const Eigen::MatrixBase<Derived>& phases) {
  using Scalar = typename Derived::Scalar;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  constexpr Scalar two_pi = 2 * pi;
  Vec<Scalar> out(phases.size());
  if (phases.size() == 0) return out;
  out[0] = phases[0];
  long long turns = 0;
  for (Index i = 1; i < phases.size(); ++i) {
    const Scalar d = phases[i] - phases[i - 1];
    turns -= static_cast<long long>(std::ceil((d - pi) / two_pi));
    out[i] = phases[i] + two_pi * Scalar(turns);
  }
  return out;
}

/// Population mean and standard deviation.
template <typename Derived>
std::pair<double, double> mean_std(const Eigen::MatrixBase<Derived>& x) {
  const double mean = x.mean();
  const double var = (x.array() - mean).square().mean();
  return {mean, std::sqrt(var)};
}

}  // namespace mmvib
