// mmvib: simulate, extract, synthesize and score mmWave vibration speech.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmvib/cli/commands.hpp"
#include "mmvib/cli/config.hpp"

namespace {

mmvib::PipelineConfig resolve_config(const std::string& path) {
  mmvib::PipelineConfig cfg = path.empty() ? mmvib::PipelineConfig{} : mmvib::cli::load_config(path);
  cfg.seed = mmvib::cli::seed_from_env(cfg.seed);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmWave vibration speech sensing toolkit"};
  app.require_subcommand(1);

  std::string config_path, audio_in, capture_path, wav_out, manifest, out_dir, report_out, csv_out, parameter;
  bool no_preprocess = false;
  long long half_window = 2;
  double alpha = 1.0, beta = 0.3, sample_rate = 8000.0, jitter = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> values;

  auto* simulate = app.add_subcommand("simulate", "Simulate an FMCW capture of a sound-driven surface");
  simulate->add_option("--config", config_path, "INI configuration (defaults when omitted)");
  simulate->add_option("--audio", audio_in, "Source WAV")->required();
  simulate->add_option("--out", capture_path, "Capture file to write")->required();

  auto* extract = app.add_subcommand("extract", "Recover the vibration trace from a capture");
  extract->add_option("--capture", capture_path, "Capture file")->required();
  extract->add_option("--out", wav_out, "Float32 WAV to write")->required();
  extract->add_flag("--no-preprocess", no_preprocess, "Skip both outlier-removal stages");
  extract->add_option("--neighbor-window", half_window, "Neighbours per side for the periodic-outlier mean")
      ->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "Build a synthetic degraded-speech dataset");
  synth->add_option("--manifest", manifest, "Input manifest (JSON lines or one path per line)")->required();
  synth->add_option("--out-dir", out_dir, "Output directory")->required();
  synth->add_option("--alpha", alpha, "Purple-noise gain")->check(CLI::NonNegativeNumber);
  synth->add_option("--beta", beta, "Gaussian-noise gain")->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", seed, "Root seed (MMVIB_SEED overrides)");
  synth->add_option("--sample-rate", sample_rate, "Output sample rate")->check(CLI::PositiveNumber);
  synth->add_option("--jitter", jitter, "Per-item relative jitter of alpha and beta")->check(CLI::Range(0.0, 0.99));

  auto* score = app.add_subcommand("score", "Score reference/degraded pairs");
  score->add_option("--manifest", manifest, "Pair manifest (JSON lines)")->required();
  score->add_option("--out", report_out, "JSON report to write")->required();

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter through simulate, extract and score");
  sweep->add_option("--config", config_path, "INI configuration (defaults when omitted)");
  sweep->add_option("--param", parameter, "Parameter name")->required();
  sweep->add_option("--values", values, "Comma-separated values")->delimiter(',');
  sweep->add_option("--audio", audio_in, "Source WAV")->required();
  sweep->add_option("--out", report_out, "JSON report to write")->required();
  sweep->add_option("--csv", csv_out, "CSV table (default: <out>.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return mmvib::cli::cmd_simulate(resolve_config(config_path), audio_in, capture_path, std::cout, std::cerr);
    if (*extract)
      return mmvib::cli::cmd_extract(capture_path, wav_out, !no_preprocess, half_window, std::cout, std::cerr);
    if (*synth) {
      const mmvib::SynthesisConfig cfg{alpha, beta, mmvib::cli::seed_from_env(seed)};
      return mmvib::cli::cmd_synth(manifest, out_dir, cfg, mmvib::DatasetOptions{sample_rate, jitter}, std::cout,
                                   std::cerr);
    }
    if (*score) return mmvib::cli::cmd_score(manifest, report_out, std::cout, std::cerr);
    if (*sweep) {
      if (csv_out.empty()) csv_out = report_out + ".csv";
      return mmvib::cli::cmd_sweep(resolve_config(config_path), parameter, values, audio_in, report_out, csv_out,
                                   std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
