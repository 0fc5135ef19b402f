#pragma once

// Vibration recovery from IF captures: Range-FFT, strongest-bin selection,
// phase tracking and the two-stage outlier cleanup.

#include <Eigen/Dense>

#include "mmvib/radar_sim.hpp"

namespace mmvib {

/// [range_bins x total_chirps] with range_bins = adc_samples_per_chirp/2 + 1.
struct RangeProfile {
  Eigen::MatrixXcd bins;
  double bin_size_m = 0.0;
  double wavelength = 0.0;
  double sample_rate = 0.0;  ///< chirp rate
  Index chirps_per_frame = 0;
};

RangeProfile range_fft(const IFCapture& cap);

/// Argmax of mean magnitude over chirps, DC excluded, lowest index on ties.
/// Throws "no target" when every non-DC bin is zero.
Index select_target_bin(const RangeProfile& profile);

/// Unwrapped per-chirp argument of one range bin.
Eigen::VectorXd extract_phase_series(const RangeProfile& profile, Index bin);

/// lambda * phase / (4 pi).
inline double phase_to_displacement(double phase_rad, double wavelength) {
  return wavelength * phase_rad / (4.0 * std::numbers::pi);
}
/// Series form: the mean is removed before conversion.
Eigen::VectorXd phase_to_displacement(const Eigen::Ref<const Eigen::VectorXd>& phase, double wavelength);

/// 3-sigma rule on the first `guard_len` samples. Mean and population
/// standard deviation come from the samples after the guard; guard samples
/// further than 3 sd from that mean are replaced by it.
Eigen::VectorXd remove_beginning_outlier(const Eigen::Ref<const Eigen::VectorXd>& x, Index guard_len);
VibrationTrace remove_beginning_outlier(const VibrationTrace& trace, Index guard_len);

/// Replaces every sample at k * chirps_per_frame with the mean of up to
/// `half_window` neighbours per side, skipping frame starts. The window
/// shrinks at the edges.
Eigen::VectorXd remove_periodic_outliers(const Eigen::Ref<const Eigen::VectorXd>& x, Index chirps_per_frame,
                                         Index half_window = 2);
VibrationTrace remove_periodic_outliers(const VibrationTrace& trace, Index chirps_per_frame, Index half_window = 2);

struct ExtractOptions {
  bool preprocess = true;
  Index guard_len = 0;  ///< 0 means one frame
  Index neighbor_half_window = 2;
};

struct Extraction {
  VibrationTrace trace;
  Index target_bin = 0;
  double target_range_m = 0.0;
  Index samples_replaced = 0;
};

Extraction extract_vibration_detailed(const IFCapture& cap, const ExtractOptions& opts = {});

/// range_fft -> select_target_bin -> extract_phase_series ->
/// remove_beginning_outlier -> remove_periodic_outliers -> phase_to_displacement.
inline VibrationTrace extract_vibration(const IFCapture& cap, const ExtractOptions& opts = {}) {
  return extract_vibration_detailed(cap, opts).trace;
}

}  // namespace mmvib
