#include "speech_corpus.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "mmvib/seed.hpp"

namespace mmvib::testing {
namespace {

struct Vowel {
  std::array<double, 3> formant;
  std::array<double, 3> bandwidth;
};

constexpr std::array<Vowel, 6> kVowels{{
    {{730, 1090, 2440}, {90, 110, 170}},  // a
    {{270, 2290, 3010}, {60, 100, 170}},  // i
    {{300, 870, 2240}, {60, 90, 150}},    // u
    {{530, 1840, 2480}, {70, 110, 160}},  // e
    {{570, 840, 2410}, {80, 100, 160}},   // o
    {{660, 1720, 2410}, {90, 120, 170}},  // ae
}};

// Two-pole resonator with unit gain at DC.
class Resonator {
 public:
  double step(double x, double freq, double bw, double fs) {
    const double r = std::exp(-std::numbers::pi * bw / fs);
    const double a1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq / fs);
    const double a2 = -r * r;
    const double g = 1.0 - a1 - a2;
    const double y = g * x + a1 * y1_ + a2 * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double y1_ = 0.0, y2_ = 0.0;
};

enum class Segment { silence, fricative, vowel };

}  // namespace

AudioBuffer synthetic_utterance(int clip, double sample_rate, double duration_sec) {
  std::mt19937_64 rng(derive_seed(0x5EEC4ULL, std::uint64_t(clip)));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto n = static_cast<Index>(duration_sec * sample_rate);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);

  // Segment plan: (kind, length in samples, vowel index).
  struct Plan {
    Segment kind;
    Index len;
    int vowel;
  };
  std::vector<Plan> plan;
  Index planned = 0;
  auto push = [&](Segment k, double sec, int v) {
    const auto len = static_cast<Index>(sec * sample_rate);
    plan.push_back({k, len, v});
    planned += len;
  };
  push(Segment::silence, 0.12 + 0.08 * uni(rng), 0);
  while (planned < n) {
    const int syllables = 1 + int(uni(rng) * 3.0);
    for (int s = 0; s < syllables; ++s) {
      if (uni(rng) < 0.45) push(Segment::fricative, 0.05 + 0.07 * uni(rng), 0);
      push(Segment::vowel, 0.10 + 0.16 * uni(rng), int(uni(rng) * kVowels.size()) % int(kVowels.size()));
    }
    push(Segment::silence, 0.06 + 0.18 * uni(rng), 0);
  }

  const double f0_base = 95.0 + 120.0 * uni(rng);
  const double intonation_rate = 0.7 + 1.2 * uni(rng);
  std::array<Resonator, 3> formants;
  Resonator fric_shape;
  std::array<double, 3> cur_f = kVowels[0].formant, cur_bw = kVowels[0].bandwidth;
  double glottal_phase = 0.0, tilt1 = 0.0;
  const double fric_centre = 3500.0 + 1500.0 * uni(rng);

  Index pos = 0;
  for (const Plan& seg : plan) {
    const double ramp = std::min<double>(0.02 * sample_rate, double(seg.len) / 2.0);
    for (Index i = 0; i < seg.len && pos < n; ++i, ++pos) {
      const double env_in = std::min(1.0, double(i) / ramp);
      const double env_out = std::min(1.0, double(seg.len - 1 - i) / ramp);
      const double env = 0.5 - 0.5 * std::cos(std::numbers::pi * std::min(env_in, env_out));
      const double t = double(pos) / sample_rate;
      double sample = 0.0;

      if (seg.kind == Segment::vowel) {
        const Vowel& target = kVowels[std::size_t(seg.vowel)];
        for (int k = 0; k < 3; ++k) {
          cur_f[k] += 0.004 * (target.formant[k] - cur_f[k]);
          cur_bw[k] += 0.004 * (target.bandwidth[k] - cur_bw[k]);
        }
        const double f0 = f0_base * (1.0 - 0.08 * t / duration_sec) *
                          (1.0 + 0.12 * std::sin(2.0 * std::numbers::pi * intonation_rate * t)) *
                          (1.0 + 0.01 * gauss(rng));
        glottal_phase += f0 / sample_rate;
        double pulse = 0.0;
        if (glottal_phase >= 1.0) {
          glottal_phase -= 1.0;
          pulse = 1.0;
        }
        // Leaky integrator for glottal spectral tilt, plus aspiration.
        tilt1 = 0.95 * tilt1 + pulse;
        double v = tilt1 + 0.02 * gauss(rng);
        for (int k = 0; k < 3; ++k) v = formants[std::size_t(k)].step(v, cur_f[k], cur_bw[k], sample_rate);
        sample = 0.6 * v;
      } else if (seg.kind == Segment::fricative) {
        sample = 0.05 * fric_shape.step(gauss(rng), std::min(fric_centre, 0.45 * sample_rate), 1800.0, sample_rate);
        sample *= 6.0;
      }
      out[pos] = env * sample;
    }
  }

  const double peak = out.cwiseAbs().maxCoeff();
  if (peak > 0.0) out *= 0.5 / peak;
  // Recording noise floor, about 60 dB below peak.
  for (Index i = 0; i < n; ++i) out[i] += 5e-4 * gauss(rng);
  return AudioBuffer{out, sample_rate};
}

std::vector<AudioBuffer> speech_corpus(int count, double sample_rate, double duration_sec) {
  std::vector<AudioBuffer> clips;
  for (int c = 0; c < count; ++c) clips.push_back(synthetic_utterance(c, sample_rate, duration_sec));
  return clips;
}

}  // namespace mmvib::testing
