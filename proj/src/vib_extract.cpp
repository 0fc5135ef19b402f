#include "mmvib/vib_extract.hpp"

#include <cmath>

#include <unsupported/Eigen/FFT>

namespace mmvib {

RangeProfile range_fft(const IFCapture& cap) {
  if (cap.total_chirps() == 0) throw Error("empty capture");
  const Index n = cap.samples.rows();
  const Index bins = n / 2 + 1;

  RangeProfile profile;
  profile.bins.resize(bins, cap.total_chirps());
  profile.bin_size_m = range_resolution(cap.config);
  profile.wavelength = cap.config.wavelength();
  profile.sample_rate = cap.config.sampling_rate();
  profile.chirps_per_frame = cap.config.chirps_per_frame;

  Eigen::FFT<double> fft;
  Eigen::VectorXcd in(n), out(n);
  for (Index g = 0; g < cap.total_chirps(); ++g) {
    in = cap.samples.col(g).cast<std::complex<double>>();
    fft.fwd(out, in);
    profile.bins.col(g) = out.head(bins);
  }
  return profile;
}

Index select_target_bin(const RangeProfile& profile) {
  if (profile.bins.size() == 0) throw Error("empty profile");
  const Eigen::VectorXd strength = profile.bins.cwiseAbs().rowwise().mean();
  Index best = 0;
  double best_strength = 0.0;
  for (Index b = 1; b < strength.size(); ++b) {
    if (strength[b] > best_strength) {
      best = b;
      best_strength = strength[b];
    }
  }
  if (best == 0) throw Error("no target");
  return best;
}

Eigen::VectorXd extract_phase_series(const RangeProfile& profile, Index bin) {
  if (bin < 0 || bin >= profile.bins.rows()) throw Error("range bin out of bounds");
  const Eigen::VectorXd wrapped = profile.bins.row(bin).transpose().unaryExpr([](std::complex<double> z) {
    return std::arg(z);
  });
  return unwrap_phase(wrapped);
}

Eigen::VectorXd phase_to_displacement(const Eigen::Ref<const Eigen::VectorXd>& phase, double wavelength) {
  if (!(wavelength > 0.0)) throw Error("wavelength must be > 0");
  if (phase.size() == 0) return phase;
  return (phase.array() - phase.mean()) * (wavelength / (4.0 * std::numbers::pi));
}

Eigen::VectorXd remove_beginning_outlier(const Eigen::Ref<const Eigen::VectorXd>& x, Index guard_len) {
  if (x.size() < 3) throw Error("trace too short");
  Eigen::VectorXd out = x;
  // Keep at least two samples for the statistics.
  const Index guard = std::clamp<Index>(guard_len, 1, x.size() - 2);
  const auto [mean, sd] = mean_std(x.tail(x.size() - guard));
  for (Index i = 0; i < guard; ++i)
    if (std::abs(x[i] - mean) > 3.0 * sd) out[i] = mean;
  return out;
}

VibrationTrace remove_beginning_outlier(const VibrationTrace& trace, Index guard_len) {
  return VibrationTrace{remove_beginning_outlier(trace.displacement, guard_len), trace.sample_rate};
}

Eigen::VectorXd remove_periodic_outliers(const Eigen::Ref<const Eigen::VectorXd>& x, Index chirps_per_frame,
                                         Index half_window) {
  if (chirps_per_frame < 2) throw Error("chirps_per_frame must be >= 2");
  if (half_window < 1) throw Error("neighbor window must be >= 1");
  Eigen::VectorXd out = x;
  const Index n = x.size();
  for (Index start = 0; start < n; start += chirps_per_frame) {
    double sum = 0.0;
    Index count = 0;
    for (Index d = -half_window; d <= half_window; ++d) {
      const Index j = start + d;
      if (j < 0 || j >= n || j % chirps_per_frame == 0) continue;
      sum += x[j];
      ++count;
    }
    if (count > 0) out[start] = sum / double(count);
  }
  return out;
}

VibrationTrace remove_periodic_outliers(const VibrationTrace& trace, Index chirps_per_frame, Index half_window) {
  return VibrationTrace{remove_periodic_outliers(trace.displacement, chirps_per_frame, half_window),
                        trace.sample_rate};
}

Extraction extract_vibration_detailed(const IFCapture& cap, const ExtractOptions& opts) {
  const RangeProfile profile = range_fft(cap);
  Extraction result;
  result.target_bin = select_target_bin(profile);
  result.target_range_m = double(result.target_bin) * profile.bin_size_m;

  Eigen::VectorXd phase = extract_phase_series(profile, result.target_bin);
  if (opts.preprocess && phase.size() >= 3) {
    const Index guard = opts.guard_len > 0 ? opts.guard_len : cap.config.chirps_per_frame;
    const Eigen::VectorXd raw = phase;
    phase = remove_beginning_outlier(phase, guard);
    phase = remove_periodic_outliers(phase, cap.config.chirps_per_frame, opts.neighbor_half_window);
    result.samples_replaced = (raw.array() != phase.array()).count();
  }
  result.trace = VibrationTrace{phase_to_displacement(phase, profile.wavelength), profile.sample_rate};
  return result;
}

}  // namespace mmvib
