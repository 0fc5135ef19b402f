#include "mmvib/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include "mmvib/resample.hpp"

namespace mmvib {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::pair<Eigen::VectorXd, Eigen::VectorXd> aligned_pair(const AudioBuffer& ref, const AudioBuffer& deg) {
  ref.validate();
  deg.validate();
  if (ref.sample_rate != deg.sample_rate) throw Error("sample rate mismatch");
  const Index n = std::min(ref.size(), deg.size());
  return {ref.samples.head(n), deg.samples.head(n)};
}

Index next_pow2(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

// ---------------------------------------------------------------------------
// FWSegSNR

// Critical-band centres and widths (Hz).
constexpr std::array<double, 25> kCritCentre{
    50.0,     120.0,    190.0,    260.0,    330.0,    400.0,    470.0,    540.0,    617.372,
    703.378,  798.717,  904.128,  1020.38,  1148.30,  1288.72,  1442.54,  1610.70,  1794.16,
    1993.93,  2211.08,  2446.71,  2701.97,  2978.04,  3276.17,  3597.63};
constexpr std::array<double, 25> kCritWidth{
    70.0,     70.0,     70.0,     70.0,     70.0,     70.0,     70.0,     77.3724,  86.0056,
    95.3398,  105.411,  116.256,  127.914,  140.423,  153.823,  168.154,  183.457,  199.776,
    217.153,  235.631,  255.255,  276.072,  298.126,  321.465,  346.136};

Eigen::MatrixXd critical_band_filters(double sample_rate, Index half_fft) {
  const double max_freq = sample_rate / 2.0;
  const double bw_min = kCritWidth[0];
  const double min_factor = std::exp(-30.0 / (2.0 * 2.303));
  Index bands = 0;
  while (bands < Index(kCritCentre.size()) && kCritCentre[bands] < max_freq) ++bands;

  Eigen::MatrixXd filters = Eigen::MatrixXd::Zero(bands, half_fft);
  for (Index i = 0; i < bands; ++i) {
    const double f0 = std::floor(kCritCentre[i] / max_freq * double(half_fft));
    const double bw = kCritWidth[i] / max_freq * double(half_fft);
    const double norm = std::log(bw_min) - std::log(kCritWidth[i]);
    for (Index j = 0; j < half_fft; ++j) {
      const double v = std::exp(-11.0 * (double(j) - f0) * (double(j) - f0) / (bw * bw) + norm);
      filters(i, j) = v > min_factor ? v : 0.0;
    }
  }
  return filters;
}

// MATLAB-style symmetric Hann: 0.5 (1 - cos(2 pi n / (N + 1))), n = 1..N.
Eigen::VectorXd hanning_symmetric(Index n) {
  Eigen::VectorXd w(n);
  for (Index i = 0; i < n; ++i) w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * double(i + 1) / double(n + 1)));
  return w;
}

// ---------------------------------------------------------------------------
// STOI

constexpr double kStoiRate = 10000.0;
constexpr Index kStoiFrame = 256;
constexpr Index kStoiFft = 512;
constexpr Index kStoiBands = 15;
constexpr double kStoiMinFreq = 150.0;
constexpr Index kStoiSegment = 30;
constexpr double kStoiBeta = -15.0;
constexpr double kStoiDynRange = 40.0;

std::pair<Eigen::VectorXd, Eigen::VectorXd> remove_silent_frames(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                                                  const Eigen::VectorXd& w) {
  const Index hop = kStoiFrame / 2;
  std::vector<Index> starts;
  for (Index i = 0; i + kStoiFrame <= x.size(); i += hop) starts.push_back(i);
  if (starts.empty()) throw Error("input too short");

  std::vector<double> energy(starts.size());
  for (std::size_t f = 0; f < starts.size(); ++f)
    energy[f] = 20.0 * std::log10(x.segment(starts[f], kStoiFrame).cwiseProduct(w).norm() + kEps);
  const double top = *std::max_element(energy.begin(), energy.end());

  std::vector<Index> kept;
  for (std::size_t f = 0; f < starts.size(); ++f)
    if (top - kStoiDynRange - energy[f] < 0.0) kept.push_back(starts[f]);

  const Index len = (Index(kept.size()) - 1) * hop + kStoiFrame;
  Eigen::VectorXd xs = Eigen::VectorXd::Zero(len), ys = Eigen::VectorXd::Zero(len);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    xs.segment(Index(k) * hop, kStoiFrame) += x.segment(kept[k], kStoiFrame).cwiseProduct(w);
    ys.segment(Index(k) * hop, kStoiFrame) += y.segment(kept[k], kStoiFrame).cwiseProduct(w);
  }
  return {xs, ys};
}

// Power spectra, [257 x frames]; frame starts run over [0, len - 256).
Eigen::MatrixXd stoi_power_spectra(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  const Index hop = kStoiFrame / 2;
  const Index frames = x.size() > kStoiFrame ? (x.size() - kStoiFrame + hop - 1) / hop : 0;
  Eigen::MatrixXd out(kStoiFft / 2 + 1, frames);
  for (Index t = 0; t < frames; ++t) {
    const Eigen::VectorXd frame = x.segment(t * hop, kStoiFrame).cwiseProduct(w);
    out.col(t) = rfft(frame, kStoiFft).cwiseAbs2();
  }
  return out;
}

Eigen::MatrixXd third_octave_matrix() {
  const Index bins = kStoiFft / 2 + 1;
  Eigen::MatrixXd obm = Eigen::MatrixXd::Zero(kStoiBands, bins);
  auto nearest = [&](double f) {
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < bins; ++k) {
      const double d = std::abs(double(k) * kStoiRate / double(kStoiFft) - f);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  };
  for (Index i = 0; i < kStoiBands; ++i) {
    const double lo = kStoiMinFreq * std::pow(2.0, (2.0 * double(i) - 1.0) / 6.0);
    const double hi = kStoiMinFreq * std::pow(2.0, (2.0 * double(i) + 1.0) / 6.0);
    const Index a = nearest(lo), b = nearest(hi);
    for (Index k = a; k < b; ++k) obm(i, k) = 1.0;
  }
  return obm;
}

// ---------------------------------------------------------------------------
// MFCC

Eigen::VectorXd hamming(Index n) {
  Eigen::VectorXd w(n);
  for (Index i = 0; i < n; ++i) w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * double(i) / double(n - 1));
  return w;
}

}  // namespace

double fwsegsnr(const AudioBuffer& ref, const AudioBuffer& deg) {
  const auto [x, y] = aligned_pair(ref, deg);
  const double fs = ref.sample_rate;
  const auto win = static_cast<Index>(std::lround(0.025 * fs));
  const auto hop = static_cast<Index>(std::lround(0.010 * fs));
  if (x.size() < win) throw Error("input too short");

  const Index n_fft = next_pow2(2 * win);
  const Index half = n_fft / 2;
  const Eigen::MatrixXd filters = critical_band_filters(fs, half);
  const Eigen::VectorXd window = hanning_symmetric(win);
  constexpr double gamma = 0.2;

  const Index frames = (x.size() - win) / hop + 1;
  double total = 0.0;
  Index counted = 0;
  for (Index t = 0; t < frames; ++t) {
    Eigen::VectorXd xs = rfft(x.segment(t * hop, win).cwiseProduct(window), n_fft).head(half).cwiseAbs();
    Eigen::VectorXd ys = rfft(y.segment(t * hop, win).cwiseProduct(window), n_fft).head(half).cwiseAbs();
    const double xsum = xs.sum();
    if (!(xsum > 0.0)) continue;
    xs /= xsum;
    if (const double ysum = ys.sum(); ysum > 0.0) ys /= ysum;

    const Eigen::VectorXd ex = filters * xs;
    const Eigen::VectorXd ey = filters * ys;
    double num = 0.0, den = 0.0;
    for (Index b = 0; b < ex.size(); ++b) {
      if (!(ex[b] > 0.0)) continue;
      const double err = std::max((ex[b] - ey[b]) * (ex[b] - ey[b]), kEps);
      const double weight = std::pow(ex[b], gamma);
      num += weight * 10.0 * std::log10(ex[b] * ex[b] / err);
      den += weight;
    }
    if (!(den > 0.0)) continue;
    total += std::clamp(num / den, -10.0, 35.0);
    ++counted;
  }
  if (counted == 0) throw Error("silent reference");
  return total / double(counted);
}

double stoi(const AudioBuffer& ref, const AudioBuffer& deg) {
  auto [x, y] = aligned_pair(ref, deg);
  if (ref.sample_rate != kStoiRate) {
    x = resample(x, ref.sample_rate, kStoiRate);
    y = resample(y, ref.sample_rate, kStoiRate);
  }
  // np.hanning(258)[1:-1]
  Eigen::VectorXd w(kStoiFrame);
  for (Index i = 0; i < kStoiFrame; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i + 1) / double(kStoiFrame + 1));

  const auto [xs, ys] = remove_silent_frames(x, y, w);
  const Eigen::MatrixXd obm = third_octave_matrix();
  const Eigen::MatrixXd xt = (obm * stoi_power_spectra(xs, w)).cwiseSqrt();
  const Eigen::MatrixXd yt = (obm * stoi_power_spectra(ys, w)).cwiseSqrt();
  const Index frames = xt.cols();
  if (frames < kStoiSegment) throw Error("input too short");

  const double clip = std::pow(10.0, -kStoiBeta / 20.0);
  double acc = 0.0;
  Index segments = 0;
  for (Index m = kStoiSegment; m <= frames; ++m, ++segments) {
    for (Index j = 0; j < kStoiBands; ++j) {
      Eigen::VectorXd xseg = xt.row(j).segment(m - kStoiSegment, kStoiSegment).transpose();
      Eigen::VectorXd yseg = yt.row(j).segment(m - kStoiSegment, kStoiSegment).transpose();
      yseg *= xseg.norm() / (yseg.norm() + kEps);
      yseg = yseg.cwiseMin(xseg * (1.0 + clip));
      yseg.array() -= yseg.mean();
      xseg.array() -= xseg.mean();
      yseg /= yseg.norm() + kEps;
      xseg /= xseg.norm() + kEps;
      acc += xseg.dot(yseg);
    }
  }
  return acc / double(kStoiBands * segments);
}

Eigen::MatrixXd mfcc(const AudioBuffer& audio, const MfccConfig& cfg) {
  const double fs = audio.sample_rate;
  const auto win = static_cast<Index>(std::lround(cfg.frame_sec * fs));
  const auto hop = static_cast<Index>(std::lround(cfg.hop_sec * fs));
  if (audio.size() < win) throw Error("input too short");
  const Index n_fft = next_pow2(win);
  const Eigen::MatrixXd fb = mel_filterbank(cfg.n_filters, n_fft, fs, 0.0, fs / 2.0);
  const Eigen::VectorXd window = hamming(win);

  // DCT-II rows 1..n_coeffs scaled by 1/M on log power, i.e. the cosine-series
  // coefficients of the log amplitude; MCD is then an RMS log-spectral distance in dB.
  const Index m = cfg.n_filters;
  Eigen::MatrixXd dct(cfg.n_coeffs, m);
  for (Index i = 0; i < cfg.n_coeffs; ++i)
    for (Index k = 0; k < m; ++k)
      dct(i, k) = std::cos(std::numbers::pi * double(i + 1) * (double(k) + 0.5) / double(m)) / double(m);

  const Index frames = (audio.size() - win) / hop + 1;
  Eigen::MatrixXd out(cfg.n_coeffs, frames);
  for (Index t = 0; t < frames; ++t) {
    const Eigen::VectorXd power = rfft(audio.samples.segment(t * hop, win).cwiseProduct(window), n_fft).cwiseAbs2();
    const Eigen::VectorXd log_mel = (fb * power).cwiseMax(1e-10).array().log();
    out.col(t) = dct * log_mel;
  }
  return out;
}

double mcd(const AudioBuffer& ref, const AudioBuffer& deg) {
  const auto [x, y] = aligned_pair(ref, deg);
  const Eigen::MatrixXd cx = mfcc(AudioBuffer{x, ref.sample_rate});
  const Eigen::MatrixXd cy = mfcc(AudioBuffer{y, ref.sample_rate});
  const double k = 10.0 / std::log(10.0);
  const Eigen::VectorXd per_frame = ((cx - cy).colwise().squaredNorm() * 2.0).cwiseSqrt().transpose() * k;
  return per_frame.mean();
}

double mel_loss(const AudioBuffer& ref, const AudioBuffer& deg) {
  const auto [x, y] = aligned_pair(ref, deg);
  const AudioBuffer a{x, ref.sample_rate}, b{y, ref.sample_rate};
  double total = 0.0;
  for (const MelConfig& cfg : multi_resolution_mel_configs()) {
    if (a.size() < cfg.window_len) throw Error("input too short");
    const Eigen::MatrixXd la = mel_spectrogram(a, cfg).cwiseMax(1e-5).array().log();
    const Eigen::MatrixXd lb = mel_spectrogram(b, cfg).cwiseMax(1e-5).array().log();
    total += (la - lb).cwiseAbs().mean();
  }
  return total;
}

double mag_l1(const Spectrogram& ref_spec, const Spectrogram& deg_spec) {
  if (ref_spec.values.rows() != deg_spec.values.rows() || ref_spec.values.cols() != deg_spec.values.cols())
    throw Error("shape mismatch");
  if (ref_spec.values.size() == 0) throw Error("empty spectrogram");
  return (ref_spec.values - deg_spec.values).cwiseAbs().mean();
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::string cur;
  for (const char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

std::u32string text_chars(const std::string& text) {
  std::string joined;
  for (const auto& w : split_words(text)) {
    if (!joined.empty()) joined.push_back(' ');
    joined += w;
  }
  std::u32string out;
  for (std::size_t i = 0; i < joined.size();) {
    const auto c = static_cast<unsigned char>(joined[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
    if (i + len > joined.size()) len = 1;
    char32_t cp = len == 1 ? c : c & (0x7F >> len);
    for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(joined[i + k]) & 0x3F);
    out.push_back(cp);
    i += len;
  }
  return out;
}

ErrorRates wer_cer(const std::string& ref_text, const std::string& hyp_text) {
  const auto ref_words = split_words(ref_text);
  if (ref_words.empty()) throw Error("empty reference");
  const auto hyp_words = split_words(hyp_text);
  const auto ref_chars = text_chars(ref_text);
  const auto hyp_chars = text_chars(hyp_text);
  ErrorRates r;
  r.wer = double(edit_distance<std::string>(ref_words, hyp_words)) / double(ref_words.size());
  r.cer = double(edit_distance<char32_t>(ref_chars, hyp_chars)) / double(ref_chars.size());
  return r;
}

MetricsReport score_pair(const AudioBuffer& ref, const AudioBuffer& deg, const std::optional<std::string>& ref_text,
                         const std::optional<std::string>& hyp_text) {
  const auto [x, y] = aligned_pair(ref, deg);
  const AudioBuffer a{x, ref.sample_rate}, b{y, ref.sample_rate};
  MetricsReport r;
  r.fwsegsnr = fwsegsnr(a, b);
  r.stoi_raw = stoi(a, b);
  r.stoi = std::clamp(r.stoi_raw, 0.0, 1.0);
  r.mcd = mcd(a, b);
  r.mel_loss = mel_loss(a, b);
  r.mag_l1 = mag_l1(magnitude(stft(a, kMagWindow, kMagHop)), magnitude(stft(b, kMagWindow, kMagHop)));
  if (ref_text && hyp_text) {
    const ErrorRates e = wer_cer(*ref_text, *hyp_text);
    r.wer = e.wer;
    r.cer = e.cer;
  }
  return r;
}

}  // namespace mmvib
