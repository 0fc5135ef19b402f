#include "mmvib/synth.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include <unsupported/Eigen/FFT>

#include <json.hpp>

#include "mmvib/resample.hpp"
#include "mmvib/seed.hpp"
#include "mmvib/wav.hpp"

namespace mmvib {
namespace {

constexpr std::uint64_t kPurpleStream = 1;
constexpr std::uint64_t kGaussianStream = 2;
constexpr std::uint64_t kJitterStream = 3;

Eigen::VectorXd white(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd x(n);
  for (Index i = 0; i < n; ++i) x[i] = gauss(rng);
  return x;
}

std::string item_name(const char* stem, Index index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%05lld.wav", stem, static_cast<long long>(index));
  return buf;
}

nlohmann::json row_to_json(const DatasetRow& row) {
  nlohmann::json j{{"index", row.index},
                   {"source_path", row.source_path},
                   {"clean_path", row.clean_path},
                   {"degraded_path", row.degraded_path},
                   {"seed", row.seed},
                   {"alpha", row.alpha},
                   {"beta", row.beta},
                   {"sample_rate", row.sample_rate}};
  if (row.error) j["error"] = *row.error;
  return j;
}

}  // namespace

void SynthesisConfig::validate() const {
  if (!(alpha >= 0.0)) throw Error("synthesis.alpha: must be >= 0");
  if (!(beta >= 0.0)) throw Error("synthesis.beta: must be >= 0");
}

AudioBuffer gen_gaussian_noise(Index n, std::uint64_t seed, double sample_rate) {
  if (n < 2) throw Error("noise length must be >= 2");
  return AudioBuffer{zscore(white(n, seed)), sample_rate};
}

AudioBuffer gen_purple_noise(Index n, std::uint64_t seed, double sample_rate) {
  if (n < 4) throw Error("noise length must be >= 4");
  // White spectrum scaled by |f|, so power grows exactly as f^2.
  const Eigen::VectorXcd w = white(n, seed).cast<std::complex<double>>();
  Eigen::FFT<double> fft;
  Eigen::VectorXcd spec;
  fft.fwd(spec, w);
  for (Index k = 0; k < n; ++k) spec[k] *= double(std::min(k, n - k)) / double(n);
  Eigen::VectorXcd shaped;
  fft.inv(shaped, spec);
  return AudioBuffer{zscore(shaped.real()), sample_rate};
}

AudioBuffer synthesize_mmvib(const AudioBuffer& speech, const SynthesisConfig& cfg) {
  cfg.validate();
  if (speech.size() == 0) throw Error("empty speech");
  const Index n = speech.size();
  AudioBuffer out = zscore_normalize(speech);
  if (n < 4) throw Error("input too short");
  if (cfg.alpha != 0.0) out.samples += cfg.alpha * gen_purple_noise(n, derive_seed(cfg.seed, kPurpleStream)).samples;
  if (cfg.beta != 0.0) out.samples += cfg.beta * gen_gaussian_noise(n, derive_seed(cfg.seed, kGaussianStream)).samples;
  return out;
}

std::vector<std::string> read_input_manifest(const std::filesystem::path& manifest_in) {
  std::ifstream in(manifest_in);
  if (!in) throw Error("cannot open " + manifest_in.string());
  std::vector<std::string> paths;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line.front() == '{') {
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        paths.emplace_back();  // recorded as a failed item downstream
        continue;
      }
      paths.push_back(j.contains("path") ? j.value("path", "") : j.value("clean_path", ""));
    } else {
      paths.push_back(line);
    }
  }
  return paths;
}

DatasetRow build_dataset_item(const std::string& source_path, Index index, const std::filesystem::path& out_dir,
                              const SynthesisConfig& cfg, const DatasetOptions& opts) {
  DatasetRow row;
  row.index = index;
  row.source_path = source_path;
  row.seed = derive_seed(cfg.seed, std::uint64_t(index));
  row.alpha = cfg.alpha;
  row.beta = cfg.beta;
  row.sample_rate = opts.sample_rate;
  if (opts.jitter > 0.0) {
    std::mt19937_64 rng(derive_seed(row.seed, kJitterStream));
    std::uniform_real_distribution<double> factor(1.0 - opts.jitter, 1.0 + opts.jitter);
    row.alpha *= factor(rng);
    row.beta *= factor(rng);
  }
  try {
    if (source_path.empty()) throw Error("missing path");
    const AudioBuffer clean = resample(read_wav(source_path), opts.sample_rate);
    const AudioBuffer degraded = synthesize_mmvib(clean, SynthesisConfig{row.alpha, row.beta, row.seed});
    const auto clean_path = out_dir / item_name("clean", index);
    const auto degraded_path = out_dir / item_name("degraded", index);
    write_wav(clean_path, clean);
    write_wav(degraded_path, degraded);
    row.clean_path = clean_path.string();
    row.degraded_path = degraded_path.string();
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

DatasetSummary build_dataset(const std::filesystem::path& manifest_in, const std::filesystem::path& out_dir,
                             const SynthesisConfig& cfg, const DatasetOptions& opts) {
  cfg.validate();
  if (!(opts.jitter >= 0.0 && opts.jitter < 1.0)) throw Error("jitter must be in [0, 1)");
  const auto sources = read_input_manifest(manifest_in);
  if (sources.empty()) throw Error("empty manifest");
  std::filesystem::create_directories(out_dir);

  DatasetSummary summary;
  summary.manifest = out_dir / "manifest.jsonl";
  std::ofstream out(summary.manifest, std::ios::trunc);
  if (!out) throw Error("cannot write " + summary.manifest.string());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const DatasetRow row = build_dataset_item(sources[i], Index(i), out_dir, cfg, opts);
    out << row_to_json(row).dump() << '\n';
    ++summary.rows;
    if (row.error) ++summary.failures;
  }
  if (summary.failures == summary.rows) throw Error("all manifest entries failed");
  return summary;
}

}  // namespace mmvib
