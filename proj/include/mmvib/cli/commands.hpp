#pragma once

// `mmvib` subcommands. Each returns the process exit status and reports
// progress on `out` and failures on `err`.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmvib/pipeline.hpp"

namespace mmvib::cli {

namespace fs = std::filesystem;

/// Writes <capture_out> and <capture_out>.json (artifact log, seed, config).
int cmd_simulate(const PipelineConfig& cfg, const fs::path& audio_in, const fs::path& capture_out, std::ostream& out,
                 std::ostream& err);

/// Writes the recovered displacement as float32 WAV plus <wav_out>.json.
int cmd_extract(const fs::path& capture_in, const fs::path& wav_out, bool preprocess, Index neighbor_half_window,
                std::ostream& out, std::ostream& err);

int cmd_synth(const fs::path& manifest_in, const fs::path& out_dir, const SynthesisConfig& synth,
              const DatasetOptions& opts, std::ostream& out, std::ostream& err);

/// Pair manifest: JSON lines with ref_path, deg_path and optional ref_text,
/// hyp_text. Fails only when every pair fails.
int cmd_score(const fs::path& manifest, const fs::path& report_out, std::ostream& out, std::ostream& err);

/// Names accepted by cmd_sweep.
const std::vector<std::string>& sweep_parameters();

/// For each value: simulate -> extract -> score against the band-limited
/// source (alpha/beta rows score the synthetic degradation instead). Writes a
/// JSON report and a CSV table.
int cmd_sweep(const PipelineConfig& cfg, const std::string& parameter, const std::vector<std::string>& values,
              const fs::path& audio_in, const fs::path& report_out, const fs::path& csv_out, std::ostream& out,
              std::ostream& err);

}  // namespace mmvib::cli
