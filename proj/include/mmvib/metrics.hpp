#pragma once

// Reference/degraded speech scoring: FWSegSNR, STOI, MCD, multi-resolution
// MEL distance, magnitude-spectrogram L1 and WER/CER.
//
// Every pairwise metric requires equal sample rates and truncates both
// signals to the shorter length.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmvib/signal_core.hpp"

namespace mmvib {

/// Frequency-weighted segmental SNR in dB. 25 ms Hann frames every 10 ms,
/// 25 Gaussian-shaped critical-band filters on the area-normalized magnitude
/// spectrum, band weights = reference band energy^0.2, frame values clamped to
/// [-10, 35] and averaged.
double fwsegsnr(const AudioBuffer& ref, const AudioBuffer& deg);

/// Short-time objective intelligibility, unclipped (the correlation average
/// may be slightly negative). Needs 30 frames (384 ms) of non-silent speech.
double stoi(const AudioBuffer& ref, const AudioBuffer& deg);

struct MfccConfig {
  double frame_sec = 0.025;
  double hop_sec = 0.010;
  Index n_filters = 26;
  Index n_coeffs = 13;  ///< c1..c13; c0 is never returned
};

/// [n_coeffs x frames] cepstra c1..cN: Hamming window, power spectrum, HTK mel
/// bank over 0..Nyquist, natural log (floored at 1e-10), DCT-II scaled by 1/M
/// (cepstra of the log amplitude, as in SPTK).
Eigen::MatrixXd mfcc(const AudioBuffer& audio, const MfccConfig& cfg = {});

/// Mel-cepstral distortion, (10 / ln 10) * sqrt(2 * sum_i (c_i - c'_i)^2)
/// averaged over index-aligned frames.
double mcd(const AudioBuffer& ref, const AudioBuffer& deg);

/// Sum over the seven multi-resolution mel configurations of the mean
/// absolute difference of log mel spectrograms (floor 1e-5).
double mel_loss(const AudioBuffer& ref, const AudioBuffer& deg);

/// Mean absolute difference of two magnitude spectrograms of equal shape.
double mag_l1(const Spectrogram& ref_spec, const Spectrogram& deg_spec);

/// Window and hop used for mag_l1 inside score_pair.
inline constexpr Index kMagWindow = 512;
inline constexpr Index kMagHop = 128;

struct ErrorRates {
  double wer = 0.0;
  double cer = 0.0;
};

/// Unit-cost Levenshtein distance.
template <typename T>
std::size_t edit_distance(std::span<const T> ref, std::span<const T> hyp) {
  std::vector<std::size_t> prev(hyp.size() + 1), cur(hyp.size() + 1);
  for (std::size_t j = 0; j <= hyp.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[hyp.size()];
}

std::vector<std::string> split_words(const std::string& text);
/// UTF-8 code points of the whitespace-normalized text (single spaces kept).
std::u32string text_chars(const std::string& text);

/// Word and character error rates. Throws "empty reference" when the
/// reference has no words.
ErrorRates wer_cer(const std::string& ref_text, const std::string& hyp_text);

struct MetricsReport {
  double fwsegsnr = 0.0;
  double stoi = 0.0;      ///< clamped to [0, 1]
  double stoi_raw = 0.0;
  double mcd = 0.0;
  double mel_loss = 0.0;
  double mag_l1 = 0.0;
  std::optional<double> wer;
  std::optional<double> cer;
};

/// All signal metrics for one pair; text metrics when both transcripts are
/// supplied.
MetricsReport score_pair(const AudioBuffer& ref, const AudioBuffer& deg,
                         const std::optional<std::string>& ref_text = std::nullopt,
                         const std::optional<std::string>& hyp_text = std::nullopt);

}  // namespace mmvib
