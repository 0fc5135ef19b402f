#include <catch_amalgamated.hpp>

#include <random>

#include <unsupported/Eigen/FFT>

#include "mmvib/vib_extract.hpp"
#include "oracles.hpp"

using namespace mmvib;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

IFCapture tone_capture(double f, double amp, Index frames, double noise_db = -40.0, std::uint64_t seed = 1) {
  const ChirpConfig cfg = ChirpConfig::defaults();
  const VibrationTrace v{oracle::tone(f, amp, cfg.sampling_rate(), frames * cfg.chirps_per_frame),
                         cfg.sampling_rate()};
  return simulate_if_frames(cfg, v, TargetScene{1.5, 0.8, noise_db}, seed);
}

RangeProfile profile_with(const Eigen::VectorXd& strengths, Index chirps = 4) {
  RangeProfile p;
  p.bins = strengths.cast<std::complex<double>>().replicate(1, chirps);
  return p;
}

}  // namespace

TEST_CASE("range fft shape and target bin") {
  const IFCapture cap = tone_capture(500.0, 1e-6, 2);
  const RangeProfile p = range_fft(cap);
  CHECK(p.bins.rows() == cap.config.adc_samples_per_chirp / 2 + 1);
  CHECK(p.bins.cols() == cap.total_chirps());
  CHECK_THAT(p.bin_size_m, WithinRel(range_resolution(cap.config), 1e-15));
  CHECK(p.sample_rate == cap.config.sampling_rate());
  Index peak = 0;
  p.bins.cwiseAbs().rowwise().mean().maxCoeff(&peak);
  CHECK(peak == 40);
  CHECK(select_target_bin(p) == 40);
}

TEST_CASE("range fft of a zero capture is zero") {
  IFCapture cap = tone_capture(500.0, 1e-6, 1);
  cap.samples.setZero();
  const RangeProfile p = range_fft(cap);
  CHECK(p.bins.cwiseAbs().maxCoeff() == 0.0);
  CHECK(error_of([&] { select_target_bin(p); }) == "no target");
}

TEST_CASE("global rotation leaves magnitudes unchanged") {
  const IFCapture cap = tone_capture(500.0, 1e-6, 1);
  IFCapture rotated = cap;
  rotated.samples *= IFSample(std::cos(1.1f), std::sin(1.1f));
  const Eigen::MatrixXd a = range_fft(cap).bins.cwiseAbs();
  const Eigen::MatrixXd b = range_fft(rotated).bins.cwiseAbs();
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-5 * a.maxCoeff());
}

TEST_CASE("range fft preserves frame-major chirp order") {
  IFCapture cap = tone_capture(500.0, 1e-6, 2);
  cap.samples.setZero();
  cap.samples(0, 300) = IFSample(1.0f, 0.0f);
  const RangeProfile p = range_fft(cap);
  CHECK(p.bins.col(300).cwiseAbs().minCoeff() == 1.0);
  CHECK(p.bins.col(299).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("target bin selection rules") {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(33);
  s[10] = 2.0;
  s[20] = 2.0;
  CHECK(select_target_bin(profile_with(s)) == 10);
  s[0] = 50.0;
  CHECK(select_target_bin(profile_with(s)) == 10);
  s.setZero();
  s[0] = 1.0;
  CHECK(error_of([&] { select_target_bin(profile_with(s)); }) == "no target");
}

TEST_CASE("static target gives a constant phase") {
  const ChirpConfig cfg = ChirpConfig::defaults();
  const IFCapture cap =
      simulate_if_frames(cfg, VibrationTrace{Eigen::VectorXd::Zero(512), 8000.0}, TargetScene{1.5, 1.0, -40.0}, 4);
  const RangeProfile p = range_fft(cap);
  const Eigen::VectorXd ph = extract_phase_series(p, select_target_bin(p));
  CHECK(ph.size() == 512);
  CHECK(mean_std(ph).second < 5e-3);
}

TEST_CASE("receding target gives a linear phase ramp") {
  const ChirpConfig cfg = ChirpConfig::defaults();
  const Index n = 1024;
  Eigen::VectorXd d(n);
  for (Index i = 0; i < n; ++i) d[i] = 1e-6 * double(i);  // 1 mm over the capture, many turns of phase
  const IFCapture cap = simulate_if_frames(cfg, VibrationTrace{d, 8000.0}, TargetScene{1.5, 1.0, -60.0}, 4);
  const RangeProfile p = range_fft(cap);
  const Eigen::VectorXd ph = extract_phase_series(p, 40);
  const double slope = 4.0 * std::numbers::pi / cfg.wavelength() * 1e-6;
  for (Index i = 1; i < n; ++i) CHECK_THAT(ph[i] - ph[i - 1], WithinAbs(slope, 2e-3));
  CHECK_THROWS_AS(extract_phase_series(p, 500), Error);
}

TEST_CASE("phase to displacement") {
  CHECK_THAT(phase_to_displacement(4.0 * std::numbers::pi, 5e-3), WithinRel(5e-3, 1e-15));
  CHECK(phase_to_displacement(0.0, 5e-3) == 0.0);
  const Eigen::VectorXd ph = oracle::tone(500.0, 0.00251, 8000.0, 8000) + Eigen::VectorXd::Constant(8000, 3.0);
  const Eigen::VectorXd d = phase_to_displacement(ph, 5e-3);
  CHECK(std::abs(d.mean()) < 1e-15);
  CHECK_THAT(oracle::fitted_amplitude(d, 8000.0, 500.0), WithinRel(0.999e-6, 1e-3));
  CHECK_THROWS_AS(phase_to_displacement(ph, 0.0), Error);
}

TEST_CASE("beginning outlier removal") {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(100);
  x[0] = 100.0;
  const Eigen::VectorXd y = remove_beginning_outlier(x, 10);
  CHECK(y[0] == 0.0);
  CHECK(y.tail(99) == x.tail(99));

  const Eigen::VectorXd clean = oracle::tone(100.0, 1.0, 8000.0, 1000);
  CHECK(remove_beginning_outlier(clean, 256) == clean);
  CHECK_THROWS_AS(remove_beginning_outlier(Eigen::Vector2d(1.0, 2.0), 1), Error);
}

TEST_CASE("beginning outlier uses statistics from outside the guard") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::VectorXd x(2000);
  for (auto& v : x) v = g(rng);
  x[3] = 40.0;
  x[1500] = 40.0;  // outside the guard: untouched
  const Eigen::VectorXd y = remove_beginning_outlier(x, 256);
  const auto [mean, sd] = mean_std(x.tail(2000 - 256));
  CHECK(y[3] == mean);
  CHECK(y[1500] == 40.0);
  for (Index i = 0; i < 256; ++i)
    if (i != 3) CHECK(y[i] == (std::abs(x[i] - mean) > 3.0 * sd ? mean : x[i]));
}

TEST_CASE("outlier removal is idempotent") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(256 * 8);
    for (auto& v : x) v = g(rng);
    for (Index f = 0; f < 8; ++f) x[f * 256] += 20.0 * g(rng);
    x[0] += 80.0;
    const Eigen::VectorXd b1 = remove_beginning_outlier(x, 256);
    CHECK(remove_beginning_outlier(b1, 256) == b1);
    const Eigen::VectorXd p1 = remove_periodic_outliers(x, 256, 2);
    CHECK(remove_periodic_outliers(p1, 256, 2) == p1);
    const Eigen::VectorXd p8 = remove_periodic_outliers(x, 256, 8);
    CHECK(remove_periodic_outliers(p8, 256, 8) == p8);
  }
}

TEST_CASE("periodic outlier removal") {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(256 * 4);
  for (Index f = 0; f < 4; ++f) x[f * 256] = 5.0;
  CHECK(remove_periodic_outliers(x, 256).cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(20, 0.0, 19.0);
  const Eigen::VectorXd z = remove_periodic_outliers(y, 5, 2);
  CHECK(z[0] == 1.5);    // neighbours 1, 2 only
  CHECK(z[5] == 5.0);    // 3, 4, 6, 7
  CHECK(z[10] == 10.0);
  CHECK(z[15] == 15.0);
  CHECK(z[1] == 1.0);
  CHECK((z - y).cwiseAbs().maxCoeff() == 1.5);

  // Frame starts inside the window are skipped.
  const Eigen::VectorXd w = remove_periodic_outliers(y, 2, 3);
  CHECK(w[2] == 3.0);  // mean of 1, 3, 5

  CHECK_THROWS_AS(remove_periodic_outliers(y, 1), Error);
  CHECK_THROWS_AS(remove_periodic_outliers(y, 5, 0), Error);
}

TEST_CASE("periodic removal on a clean 500 Hz tone replaces frame starts by the neighbour mean") {
  const double w = 2.0 * std::numbers::pi * 500.0 / 8000.0;
  for (double phase : {0.0, 0.4, 1.3, 2.9}) {
    const Eigen::VectorXd x = oracle::tone(500.0, 1.0, 8000.0, 256 * 10, phase);
    const Eigen::VectorXd y = remove_periodic_outliers(x, 256, 2);
    for (Index f = 1; f < 10; ++f) {
      // 500 Hz completes 16 cycles per frame, so every frame start has phase `phase`.
      const double expect = std::sin(phase) * (std::cos(w) + std::cos(2.0 * w)) / 2.0;
      CHECK_THAT(y[f * 256], WithinAbs(expect, 1e-9));
    }
    const double bound = 1.0 - (std::cos(w) + std::cos(2.0 * w)) / 2.0;
    // Sample 0 has neighbours on one side only.
    CHECK((y - x).tail(x.size() - 1).cwiseAbs().maxCoeff() <= bound + 1e-12);
    // Only one sample in 256 moves, so the RMS distortion stays small.
    CHECK(oracle::rms(y - x) < 0.05 * oracle::rms(x));
  }
}

TEST_CASE("round trip recovers a 500 Hz, 1 um vibration through artifacts") {
  const IFCapture cap = inject_artifacts(tone_capture(500.0, 1e-6, 125), 10.0, 6.0, 3);
  const Extraction ex = extract_vibration_detailed(cap);
  CHECK(ex.target_bin == 40);
  CHECK_THAT(ex.target_range_m, WithinAbs(1.5, range_resolution(cap.config)));
  CHECK(ex.trace.sample_rate == 8000.0);
  CHECK(ex.trace.size() == cap.total_chirps());
  const auto peak = oracle::dominant_frequency(ex.trace.displacement, 8000.0);
  CHECK(std::abs(peak.freq - 500.0) <= peak.bin_hz);
  CHECK_THAT(oracle::fitted_amplitude(ex.trace.displacement, 8000.0, 500.0), WithinRel(1e-6, 0.10));
  CHECK(ex.samples_replaced <= cap.num_frames + cap.config.chirps_per_frame);
  CHECK(ex.samples_replaced >= cap.num_frames);
}

TEST_CASE("frequency fidelity across the band") {
  for (double f : {50.0, 250.0, 1234.0, 2750.0, 3900.0}) {
    const IFCapture cap = tone_capture(f, 1e-6, 32, -40.0, 5);
    const VibrationTrace tr = extract_vibration(cap);
    const auto peak = oracle::dominant_frequency(tr.displacement, 8000.0);
    CHECK(std::abs(peak.freq - f) <= peak.bin_hz);
  }
}

TEST_CASE("extraction is linear in vibration amplitude") {
  const VibrationTrace a = extract_vibration(tone_capture(700.0, 1e-6, 32, -60.0, 9));
  const VibrationTrace b = extract_vibration(tone_capture(700.0, 2e-6, 32, -60.0, 9));
  const double ra = oracle::fitted_amplitude(a.displacement, 8000.0, 700.0);
  const double rb = oracle::fitted_amplitude(b.displacement, 8000.0, 700.0);
  CHECK_THAT(rb / ra, WithinRel(2.0, 0.02));
}

TEST_CASE("silence extracts to noise-level displacement") {
  const ChirpConfig cfg = ChirpConfig::defaults();
  const IFCapture cap = simulate_if_frames(cfg, VibrationTrace{Eigen::VectorXd::Zero(256 * 20), 8000.0},
                                           TargetScene{1.5, 0.8, -40.0}, 12);
  const VibrationTrace tr = extract_vibration(cap);
  // Phase noise of a coherent sum over N samples: sqrt(P / (2 N A^2)) rad.
  const double phase_sd = std::sqrt(1e-4 / (2.0 * 256.0 * 0.64));
  const double bound = 1.5 * phase_sd * cfg.wavelength() / (4.0 * std::numbers::pi);
  CHECK(oracle::rms(tr.displacement) < bound);
}

TEST_CASE("preprocessing touches at most frames plus the guard") {
  const IFCapture cap = inject_artifacts(tone_capture(300.0, 1e-6, 20), 10.0, 6.0, 3);
  const Extraction on = extract_vibration_detailed(cap);
  ExtractOptions off_opts;
  off_opts.preprocess = false;
  const Extraction off = extract_vibration_detailed(cap, off_opts);
  CHECK(off.samples_replaced == 0);
  CHECK(on.samples_replaced >= cap.num_frames);
  CHECK(on.samples_replaced <= cap.num_frames + cap.config.chirps_per_frame);
}
