#pragma once

#include <Eigen/Dense>

#include "mmvib/signal_core.hpp"

namespace mmvib {

/// Kaiser-windowed sinc kernel parameters.
struct SincKernel {
  /// Cutoff as a fraction of the lower Nyquist frequency.
  double cutoff_ratio = 0.95;
  int zero_crossings = 24;
  double kaiser_beta = 8.6;
};

/// Band-limited rate conversion between arbitrary rates. Output length is
/// round(n * to / from). Equal rates return the input unchanged.
Eigen::VectorXd resample(const Eigen::Ref<const Eigen::VectorXd>& x, double from_rate, double to_rate,
                         const SincKernel& kernel = {});
AudioBuffer resample(const AudioBuffer& audio, double to_rate, const SincKernel& kernel = {});

/// Zero-phase windowed-sinc low-pass at `cutoff_hz`, same rate and length.
AudioBuffer lowpass(const AudioBuffer& audio, double cutoff_hz, int zero_crossings = 24, double kaiser_beta = 8.6);

}  // namespace mmvib
