#pragma once

// mmWave-like degradation of clean speech: z-scored speech plus unit-variance
// purple and Gaussian noise, and a dataset builder around it.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "mmvib/signal_core.hpp"

namespace mmvib {

struct SynthesisConfig {
  double alpha = 1.0;  ///< purple-noise gain
  double beta = 0.3;   ///< Gaussian-noise gain
  std::uint64_t seed = 0;

  void validate() const;
};

/// i.i.d. normal draws, z-scored. Requires n >= 2.
AudioBuffer gen_gaussian_noise(Index n, std::uint64_t seed, double sample_rate = 8000.0);

/// White Gaussian noise shaped in the frequency domain by |f| (PSD grows as
/// f^2, +20 dB/decade), z-scored. Requires n >= 4.
AudioBuffer gen_purple_noise(Index n, std::uint64_t seed, double sample_rate = 8000.0);

/// zscore(speech) + alpha * purple + beta * gaussian. The two noise streams
/// are seeded from cfg.seed independently of the speech content.
AudioBuffer synthesize_mmvib(const AudioBuffer& speech, const SynthesisConfig& cfg);

struct DatasetOptions {
  double sample_rate = 8000.0;
  /// Scale alpha and beta per item by independent uniform factors in
  /// [1 - jitter, 1 + jitter]. Zero disables.
  double jitter = 0.0;
};

/// One row of the output manifest (JSON lines).
struct DatasetRow {
  Index index = 0;
  std::string source_path;
  std::string clean_path;
  std::string degraded_path;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double sample_rate = 0.0;
  std::optional<std::string> error;
};

struct DatasetSummary {
  std::filesystem::path manifest;
  Index rows = 0;
  Index failures = 0;
};

/// Reads one input path per line, either a bare path or a JSON object with a
/// "path" (or "clean_path") field. Blank lines are skipped.
std::vector<std::string> read_input_manifest(const std::filesystem::path& manifest_in);

/// Builds item `index` on its own: resample to opts.sample_rate, synthesize
/// with seed derive_seed(cfg.seed, index), write clean_NNNNN.wav and
/// degraded_NNNNN.wav under out_dir. Failures are reported in `error`.
DatasetRow build_dataset_item(const std::string& source_path, Index index, const std::filesystem::path& out_dir,
                              const SynthesisConfig& cfg, const DatasetOptions& opts);

/// Writes out_dir/manifest.jsonl. Throws only if every entry fails.
DatasetSummary build_dataset(const std::filesystem::path& manifest_in, const std::filesystem::path& out_dir,
                             const SynthesisConfig& cfg, const DatasetOptions& opts = {});

}  // namespace mmvib
