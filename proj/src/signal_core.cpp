#include "mmvib/signal_core.hpp"

#include <unsupported/Eigen/FFT>

namespace mmvib {

void AudioBuffer::validate() const {
  if (!(sample_rate > 0.0)) throw Error("sample rate must be positive");
  if (!samples.allFinite()) throw Error("non-finite sample");
}

MelConfig MelConfig::with_window(Index n_mels, Index window_len) {
  MelConfig cfg;
  cfg.n_mels = n_mels;
  cfg.window_len = window_len;
  cfg.hop = window_len / 4;
  return cfg;
}

void MelConfig::validate(double sample_rate) const {
  if (n_mels < 1) throw Error("n_mels must be positive");
  if (window_len < 2 || hop < 1) throw Error("invalid window/hop");
  const double hi = resolved_fmax(sample_rate);
  if (!(fmin >= 0.0 && fmin < hi && hi <= sample_rate / 2.0)) throw Error("invalid mel frequency range");
}

std::array<MelConfig, 7> multi_resolution_mel_configs() {
  constexpr std::array<Index, 7> mels{5, 10, 20, 40, 80, 160, 320};
  constexpr std::array<Index, 7> windows{32, 64, 128, 256, 512, 1024, 2048};
  std::array<MelConfig, 7> out;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = MelConfig::with_window(mels[j], windows[j]);
  return out;
}

Eigen::MatrixXd mel_filterbank(Index n_mels, Index n_fft, double sample_rate, double fmin, double fmax) {
  const Index bins = n_fft / 2 + 1;
  if (n_mels > bins) throw Error("over-resolved filterbank");
  if (n_mels < 1) throw Error("n_mels must be positive");

  const double mel_lo = hz_to_mel(fmin);
  const double mel_hi = hz_to_mel(fmax);
  Eigen::VectorXd edges(n_mels + 2);
  for (Index i = 0; i < n_mels + 2; ++i)
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * double(i) / double(n_mels + 1));

  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(n_mels, bins);
  for (Index m = 0; m < n_mels; ++m) {
    const double left = edges[m], centre = edges[m + 1], right = edges[m + 2];
    for (Index k = 0; k < bins; ++k) {
      const double f = double(k) * sample_rate / double(n_fft);
      const double rise = (f - left) / (centre - left);
      const double fall = (right - f) / (right - centre);
      fb(m, k) = std::max(0.0, std::min(rise, fall));
    }
  }
  return fb;
}

Eigen::VectorXcd rfft(const Eigen::Ref<const Eigen::VectorXd>& x, Index n_fft) {
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(n_fft);
  const Index n = std::min<Index>(n_fft, x.size());
  padded.head(n) = x.head(n);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  Eigen::VectorXcd out;
  fft.fwd(out, padded);
  return out;
}

ComplexSpectrogram stft(const AudioBuffer& audio, Index window_len, Index hop) {
  if (hop < 1 || window_len < 2) throw Error("invalid window/hop");
  if (audio.size() < window_len) throw Error("input too short");

  const Index frames = (audio.size() - window_len) / hop + 1;
  const Index bins = window_len / 2 + 1;
  const Eigen::VectorXd window = hann_window(window_len);

  ComplexSpectrogram spec;
  spec.values.resize(bins, frames);
  spec.window_len = window_len;
  spec.hop = hop;
  spec.sample_rate = audio.sample_rate;

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  Eigen::VectorXd frame(window_len);
  Eigen::VectorXcd out;
  for (Index t = 0; t < frames; ++t) {
    frame = audio.samples.segment(t * hop, window_len).cwiseProduct(window);
    fft.fwd(out, frame);
    spec.values.col(t) = out;
  }
  return spec;
}

Spectrogram magnitude(const ComplexSpectrogram& spec) {
  Spectrogram out;
  out.values = spec.values.cwiseAbs();
  out.window_len = spec.window_len;
  out.hop = spec.hop;
  out.sample_rate = spec.sample_rate;
  return out;
}

Eigen::MatrixXd mel_spectrogram(const AudioBuffer& audio, const MelConfig& cfg) {
  cfg.validate(audio.sample_rate);
  const Eigen::MatrixXd fb =
      mel_filterbank(cfg.n_mels, cfg.window_len, audio.sample_rate, cfg.fmin, cfg.resolved_fmax(audio.sample_rate));
  return fb * magnitude(stft(audio, cfg.window_len, cfg.hop)).values;
}

AudioBuffer zscore_normalize(const AudioBuffer& audio) {
  return AudioBuffer{zscore(audio.samples), audio.sample_rate};
}

}  // namespace mmvib
