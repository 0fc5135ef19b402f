#include "mmvib/resample.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace mmvib {
namespace {

// Tabulated h(u) for u in [0, half_width] input samples, linearly
// interpolated. h is the ideal low-pass at `fc` cycles/sample times a Kaiser
// taper.
class KernelTable {
 public:
  KernelTable(double fc, double half_width, double beta) : half_width_(half_width) {
    const auto n = static_cast<std::size_t>(std::ceil(half_width * kStepsPerSample)) + 2;
    table_.resize(n);
    const double norm = std::cyl_bessel_i(0.0, beta);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = double(i) / kStepsPerSample;
      const double r = u / half_width;
      const double taper = r >= 1.0 ? 0.0 : std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / norm;
      const double arg = 2.0 * fc * u;
      const double sinc = arg == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
      table_[i] = 2.0 * fc * sinc * taper;
    }
  }

  double operator()(double u) const {
    u = std::abs(u);
    if (u >= half_width_) return 0.0;
    const double pos = u * kStepsPerSample;
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - double(i);
    return table_[i] + frac * (table_[i + 1] - table_[i]);
  }

  double half_width() const { return half_width_; }

 private:
  static constexpr double kStepsPerSample = 512.0;
  double half_width_;
  std::vector<double> table_;
};

Eigen::VectorXd sinc_filter(const Eigen::Ref<const Eigen::VectorXd>& x, double from_rate, double to_rate,
                            double cutoff_hz, int zero_crossings, double beta) {
  const double fc = cutoff_hz / from_rate;
  const KernelTable h(fc, zero_crossings / (2.0 * fc), beta);
  const Index n = x.size();
  const auto n_out = static_cast<Index>(std::llround(double(n) * to_rate / from_rate));
  Eigen::VectorXd y(n_out);
  const double step = from_rate / to_rate;
  for (Index m = 0; m < n_out; ++m) {
    const double pos = double(m) * step;
    const Index lo = std::max<Index>(0, static_cast<Index>(std::ceil(pos - h.half_width())));
    const Index hi = std::min<Index>(n - 1, static_cast<Index>(std::floor(pos + h.half_width())));
    double acc = 0.0;
    for (Index k = lo; k <= hi; ++k) acc += x[k] * h(pos - double(k));
    y[m] = acc;
  }
  return y;
}

}  // namespace

Eigen::VectorXd resample(const Eigen::Ref<const Eigen::VectorXd>& x, double from_rate, double to_rate,
                         const SincKernel& kernel) {
  if (!(from_rate > 0.0 && to_rate > 0.0)) throw Error("sample rate must be positive");
  if (from_rate == to_rate) return x;
  const double cutoff = 0.5 * std::min(from_rate, to_rate) * kernel.cutoff_ratio;
  return sinc_filter(x, from_rate, to_rate, cutoff, kernel.zero_crossings, kernel.kaiser_beta);
}

AudioBuffer resample(const AudioBuffer& audio, double to_rate, const SincKernel& kernel) {
  return AudioBuffer{resample(audio.samples, audio.sample_rate, to_rate, kernel), to_rate};
}

AudioBuffer lowpass(const AudioBuffer& audio, double cutoff_hz, int zero_crossings, double kaiser_beta) {
  if (!(cutoff_hz > 0.0 && cutoff_hz < audio.sample_rate / 2.0)) throw Error("cutoff outside (0, Nyquist)");
  return AudioBuffer{sinc_filter(audio.samples, audio.sample_rate, audio.sample_rate, cutoff_hz, zero_crossings,
                                 kaiser_beta),
                     audio.sample_rate};
}

}  // namespace mmvib
