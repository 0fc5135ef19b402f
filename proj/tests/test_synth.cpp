#include <catch_amalgamated.hpp>

#include <fstream>

#include <json.hpp>

#include "mmvib/resample.hpp"
#include "mmvib/seed.hpp"
#include "mmvib/synth.hpp"
#include "mmvib/wav.hpp"
#include "oracles.hpp"
#include "speech_corpus.hpp"

using namespace mmvib;
namespace fs = std::filesystem;
using Catch::Matchers::WithinAbs;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mmvib_test_synth" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

double band_energy(const Eigen::VectorXd& f, const Eigen::VectorXd& psd, double lo, double hi) {
  double e = 0.0;
  for (Index i = 0; i < f.size(); ++i)
    if (f[i] >= lo && f[i] < hi) e += psd[i];
  return e;
}

std::vector<nlohmann::json> read_rows(const fs::path& manifest) {
  std::ifstream in(manifest);
  std::vector<nlohmann::json> rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
  return rows;
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("noise generators are z-scored and deterministic") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (const AudioBuffer& a : {gen_gaussian_noise(4000, seed), gen_purple_noise(4000, seed)}) {
      const auto [m, s] = mean_std(a.samples);
      CHECK(std::abs(m) < 1e-9);
      CHECK(std::abs(s * s - 1.0) < 1e-9);
    }
  }
  CHECK(gen_gaussian_noise(100, 3).samples == gen_gaussian_noise(100, 3).samples);
  CHECK(gen_purple_noise(100, 3).samples == gen_purple_noise(100, 3).samples);
  CHECK(gen_purple_noise(100, 3).samples != gen_purple_noise(100, 4).samples);
  CHECK_THROWS_AS(gen_gaussian_noise(1, 0), Error);
  CHECK_THROWS_AS(gen_purple_noise(3, 0), Error);
}

TEST_CASE("gaussian noise is spectrally flat") {
  const double fs = 8000.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto [f, psd] = oracle::welch_psd(gen_gaussian_noise(1 << 16, seed, fs).samples, fs);
    const double lo = band_energy(f, psd, 0.05 * fs, 0.25 * fs);
    const double hi = band_energy(f, psd, 0.25 * fs, 0.45 * fs);
    CHECK(hi / lo > 0.8);
    CHECK(hi / lo < 1.25);
  }
}

TEST_CASE("purple noise rises 20 dB per decade") {
  const double fs = 8000.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto [f, psd] = oracle::welch_psd(gen_purple_noise(1 << 16, seed, fs).samples, fs);
    const double slope = oracle::psd_slope_db_per_decade(f, psd, 0.05 * fs, 0.45 * fs);
    CHECK_THAT(slope, WithinAbs(20.0, 2.0));
    CHECK(band_energy(f, psd, 0.25 * fs, 0.5 * fs) > 3.0 * band_energy(f, psd, 0.0, 0.25 * fs));
  }
}

TEST_CASE("synthesis with no noise is the z-scored speech") {
  const AudioBuffer speech = testing::synthetic_utterance(0, 8000.0, 2.0);
  const AudioBuffer out = synthesize_mmvib(speech, SynthesisConfig{0.0, 0.0, 7});
  CHECK(out.samples == zscore(speech.samples));
  CHECK(out.sample_rate == 8000.0);
}

TEST_CASE("synthesis adds unit-variance noise streams") {
  const AudioBuffer speech = testing::synthetic_utterance(1, 8000.0, 3.0);
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{1.0, 0.3}, {0.5, 0.0}, {0.0, 2.0}, {2.0, 1.0}}) {
    const AudioBuffer out = synthesize_mmvib(speech, SynthesisConfig{a, b, 11});
    const double var = mean_std(out.samples).second * mean_std(out.samples).second;
    CHECK(std::abs(var / (1.0 + a * a + b * b) - 1.0) < 0.05);
  }
}

TEST_CASE("synthesis is the exact sum of its parts") {
  const AudioBuffer speech = testing::synthetic_utterance(2, 8000.0, 1.0);
  const SynthesisConfig cfg{0.7, 0.4, 5};
  const AudioBuffer out = synthesize_mmvib(speech, cfg);
  const Index n = speech.size();
  const Eigen::VectorXd expect = zscore(speech.samples) +
                                 0.7 * gen_purple_noise(n, derive_seed(5, 1)).samples +
                                 0.4 * gen_gaussian_noise(n, derive_seed(5, 2)).samples;
  CHECK((out.samples - expect).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(synthesize_mmvib(speech, cfg).samples == out.samples);
  CHECK(synthesize_mmvib(speech, SynthesisConfig{0.7, 0.4, 6}).samples != out.samples);
}

TEST_CASE("purple noise degrades the high band more than the low band") {
  const double fs = 8000.0;
  const AudioBuffer speech = testing::synthetic_utterance(3, fs, 4.0);
  const Eigen::VectorXd clean = zscore(speech.samples);
  const Eigen::VectorXd noise = synthesize_mmvib(speech, SynthesisConfig{1.0, 0.3, 2}).samples - clean;
  const auto [f, ps] = oracle::welch_psd(clean, fs, 512);
  const auto [g, pn] = oracle::welch_psd(noise, fs, 512);
  const double snr_low = band_energy(f, ps, 0.0, 1000.0) / band_energy(g, pn, 0.0, 1000.0);
  const double snr_high = band_energy(f, ps, 2000.0, 4000.0) / band_energy(g, pn, 2000.0, 4000.0);
  CHECK(snr_high < snr_low);
}

TEST_CASE("synthesis preconditions") {
  const AudioBuffer flat{Eigen::VectorXd::Constant(100, 0.2), 8000.0};
  CHECK(error_of([&] { synthesize_mmvib(flat, SynthesisConfig{}); }) == "degenerate normalization");
  const AudioBuffer speech = testing::synthetic_utterance(0, 8000.0, 0.5);
  CHECK_THROWS_AS(synthesize_mmvib(speech, SynthesisConfig{-1.0, 0.3, 0}), Error);
  CHECK_THROWS_AS(synthesize_mmvib(speech, SynthesisConfig{1.0, -0.1, 0}), Error);
}

TEST_CASE("dataset builder") {
  const fs::path dir = scratch("dataset");
  const fs::path src = dir / "src";
  fs::create_directories(src);
  for (int i = 0; i < 3; ++i)
    write_wav(src / ("clip" + std::to_string(i) + ".wav"), testing::synthetic_utterance(i, 16000.0, 1.0));
  {
    std::ofstream m(dir / "in.jsonl");
    m << (src / "clip0.wav").string() << "\n\n";
    m << nlohmann::json{{"path", (src / "clip1.wav").string()}}.dump() << "\n";
    m << nlohmann::json{{"clean_path", (src / "clip2.wav").string()}}.dump() << "\n";
  }
  const SynthesisConfig cfg{1.0, 0.3, 42};
  const DatasetSummary s = build_dataset(dir / "in.jsonl", dir / "out", cfg);
  CHECK(s.rows == 3);
  CHECK(s.failures == 0);
  const auto rows = read_rows(s.manifest);
  REQUIRE(rows.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(rows[i]["index"] == i);
    CHECK(rows[i]["seed"] == derive_seed(42, std::uint64_t(i)));
    CHECK_FALSE(rows[i].contains("error"));
    const AudioBuffer clean = read_wav(rows[i]["clean_path"].get<std::string>());
    const AudioBuffer deg = read_wav(rows[i]["degraded_path"].get<std::string>());
    CHECK(clean.sample_rate == 8000.0);
    CHECK(clean.size() == deg.size());
    CHECK(clean.size() == 8000);
  }

  // An item depends only on (seed, index), so rebuilding it alone reproduces it.
  fs::create_directories(dir / "alone");
  const DatasetRow again = build_dataset_item((src / "clip1.wav").string(), 1, dir / "alone", cfg, {});
  REQUIRE_FALSE(again.error.has_value());
  CHECK(read_wav(again.degraded_path).samples == read_wav(rows[1]["degraded_path"].get<std::string>()).samples);

  const DatasetSummary s2 = build_dataset(dir / "in.jsonl", dir / "out2", cfg);
  const auto rows2 = read_rows(s2.manifest);
  for (int i = 0; i < 3; ++i)
    CHECK(read_wav(rows2[i]["degraded_path"].get<std::string>()).samples ==
          read_wav(rows[i]["degraded_path"].get<std::string>()).samples);
}

TEST_CASE("dataset builder records failures per row") {
  const fs::path dir = scratch("failures");
  write_wav(dir / "ok.wav", testing::synthetic_utterance(0, 8000.0, 0.5));
  {
    std::ofstream m(dir / "in.txt");
    m << (dir / "missing.wav").string() << "\n" << (dir / "ok.wav").string() << "\n{broken\n";
  }
  const DatasetSummary s = build_dataset(dir / "in.txt", dir / "out", SynthesisConfig{});
  CHECK(s.rows == 3);
  CHECK(s.failures == 2);
  const auto rows = read_rows(s.manifest);
  CHECK(rows[0].contains("error"));
  CHECK_FALSE(rows[1].contains("error"));
  CHECK(rows[2].contains("error"));

  {
    std::ofstream m(dir / "bad.txt");
    m << (dir / "missing.wav").string() << "\n";
  }
  CHECK(error_of([&] { build_dataset(dir / "bad.txt", dir / "out_bad", SynthesisConfig{}); }) ==
        "all manifest entries failed");
}

TEST_CASE("dataset jitter") {
  const fs::path dir = scratch("jitter");
  write_wav(dir / "a.wav", testing::synthetic_utterance(0, 8000.0, 0.5));
  const SynthesisConfig cfg{1.0, 0.3, 9};
  for (Index i = 0; i < 20; ++i) {
    const DatasetRow r = build_dataset_item((dir / "a.wav").string(), i, dir, cfg, DatasetOptions{8000.0, 0.2});
    CHECK(r.alpha >= 0.8);
    CHECK(r.alpha <= 1.2);
    CHECK(r.beta >= 0.3 * 0.8);
    CHECK(r.beta <= 0.3 * 1.2);
  }
  const DatasetRow plain = build_dataset_item((dir / "a.wav").string(), 0, dir, cfg, {});
  CHECK(plain.alpha == 1.0);
  CHECK(plain.beta == 0.3);
  CHECK_THROWS_AS(build_dataset(dir / "none.txt", dir / "o", cfg, DatasetOptions{8000.0, 1.5}), Error);
}
