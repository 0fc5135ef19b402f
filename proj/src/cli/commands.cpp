#include "mmvib/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mmvib/capture_io.hpp"
#include "mmvib/resample.hpp"
#include "mmvib/seed.hpp"
#include "mmvib/wav.hpp"

namespace mmvib::cli {
namespace {

using nlohmann::json;

json radar_json(const ChirpConfig& c) {
  return {{"carrier_freq", c.carrier_freq},
          {"slope", c.slope},
          {"chirp_duration", c.chirp_duration},
          {"adc_samples_per_chirp", c.adc_samples_per_chirp},
          {"chirps_per_frame", c.chirps_per_frame},
          {"frame_period", c.frame_period},
          {"bandwidth", c.bandwidth()},
          {"sampling_rate", c.sampling_rate()},
          {"range_resolution", range_resolution(c)}};
}

json config_json(const PipelineConfig& cfg) {
  return {{"radar", radar_json(cfg.radar)},
          {"material",
           {{"preset", cfg.material_name},
            {"mass", cfg.material.mass},
            {"stiffness", cfg.material.stiffness},
            {"damping", cfg.material.damping},
            {"reflectivity", cfg.material.reflectivity},
            {"force_scale", cfg.force_scale}}},
          {"scene", {{"range_m", cfg.range_m}, {"noise_floor_db", cfg.noise_floor_db}}},
          {"artifacts", {{"beginning_sigma", cfg.beginning_sigma}, {"periodic_sigma", cfg.periodic_sigma}}},
          {"synthesis", {{"alpha", cfg.synthesis.alpha}, {"beta", cfg.synthesis.beta}}},
          {"extract", {{"neighbor_half_window", cfg.neighbor_half_window}}},
          {"run", {{"seed", cfg.seed}, {"score_rate", cfg.score_rate}}}};
}

json report_json(const MetricsReport& r) {
  json j{{"fwsegsnr", r.fwsegsnr}, {"stoi", r.stoi},         {"stoi_raw", r.stoi_raw},
         {"mcd", r.mcd},           {"mel_loss", r.mel_loss}, {"mag_l1", r.mag_l1}};
  if (r.wer) j["wer"] = *r.wer;
  if (r.cer) j["cer"] = *r.cer;
  return j;
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<json> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(json::parse(line, nullptr, false));
  }
  return rows;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

}  // namespace

int cmd_simulate(const PipelineConfig& cfg, const fs::path& audio_in, const fs::path& capture_out, std::ostream& out,
                 std::ostream& err) {
  try {
    cfg.validate();
    const AudioBuffer audio = read_wav(audio_in);
    if (audio.size() == 0) throw Error("empty audio: " + audio_in.string());
    const IFCapture cap = simulate_capture(cfg, audio);
    write_capture(capture_out, cap);
    write_json(sidecar_path(capture_out), {{"seed", cfg.seed},
                                           {"source_audio", audio_in.string()},
                                           {"num_frames", cap.num_frames},
                                           {"config", config_json(cfg)},
                                           {"artifact_log", artifact_log_to_json(cap.artifact_log)}});
    out << "range_resolution_m: " << fmt(range_resolution(cfg.radar)) << '\n'
        << "sampling_rate_hz: " << fmt(cfg.radar.sampling_rate()) << '\n'
        << "frames: " << cap.num_frames << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "simulate: " << e.what() << '\n';
    return 1;
  }
}

int cmd_extract(const fs::path& capture_in, const fs::path& wav_out, bool preprocess, Index neighbor_half_window,
                std::ostream& out, std::ostream& err) {
  try {
    const IFCapture cap = read_capture(capture_in);
    ExtractOptions opts;
    opts.preprocess = preprocess;
    opts.neighbor_half_window = neighbor_half_window;
    const Extraction ex = extract_vibration_detailed(cap, opts);
    write_wav(wav_out, AudioBuffer{ex.trace.displacement, ex.trace.sample_rate});

    json meta{{"source_capture", capture_in.string()},
              {"units", "m"},
              {"sample_rate", ex.trace.sample_rate},
              {"num_samples", ex.trace.size()},
              {"target_bin", ex.target_bin},
              {"target_range_m", ex.target_range_m},
              {"wavelength_m", cap.config.wavelength()},
              {"preprocess", preprocess},
              {"neighbor_half_window", neighbor_half_window},
              {"samples_replaced", ex.samples_replaced}};
    if (const auto side = sidecar_path(capture_in); fs::exists(side)) {
      const json cap_meta = read_json(side);
      if (cap_meta.contains("seed")) meta["seed"] = cap_meta["seed"];
    }
    write_json(sidecar_path(wav_out), meta);
    out << "target_bin: " << ex.target_bin << '\n' << "sample_rate_hz: " << fmt(ex.trace.sample_rate) << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "extract: " << e.what() << '\n';
    return 1;
  }
}

int cmd_synth(const fs::path& manifest_in, const fs::path& out_dir, const SynthesisConfig& synth,
              const DatasetOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const DatasetSummary s = build_dataset(manifest_in, out_dir, synth, opts);
    out << "manifest: " << s.manifest.string() << '\n' << "items: " << s.rows << " failed: " << s.failures << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "synth: " << e.what() << '\n';
    return 1;
  }
}

int cmd_score(const fs::path& manifest, const fs::path& report_out, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> kFields{"fwsegsnr", "stoi", "mcd", "mel_loss", "mag_l1", "wer", "cer"};
  try {
    const auto rows = read_jsonl(manifest);
    if (rows.empty()) throw Error("empty manifest");

    json pairs = json::array();
    std::map<std::string, std::vector<double>> columns;
    std::size_t failures = 0;
    for (const json& row : rows) {
      json entry;
      try {
        if (row.is_discarded() || !row.is_object()) throw Error("malformed manifest line");
        const std::string ref_path = row.at("ref_path").get<std::string>();
        const std::string deg_path = row.at("deg_path").get<std::string>();
        entry["ref_path"] = ref_path;
        entry["deg_path"] = deg_path;
        std::optional<std::string> ref_text, hyp_text;
        if (row.contains("ref_text")) ref_text = row["ref_text"].get<std::string>();
        if (row.contains("hyp_text")) hyp_text = row["hyp_text"].get<std::string>();
        const MetricsReport r = score_pair(read_wav(ref_path), read_wav(deg_path), ref_text, hyp_text);
        const json metrics = report_json(r);
        entry.update(metrics);
        for (const auto& f : kFields)
          if (metrics.contains(f)) columns[f].push_back(metrics[f].get<double>());
      } catch (const std::exception& e) {
        entry["error"] = e.what();
        ++failures;
      }
      pairs.push_back(entry);
    }

    json mean = json::object(), stdev = json::object();
    for (const auto& f : kFields) {
      const auto it = columns.find(f);
      if (it == columns.end() || it->second.empty()) continue;
      const Eigen::Map<const Eigen::VectorXd> v(it->second.data(), Index(it->second.size()));
      const auto [m, s] = mean_std(v);
      mean[f] = m;
      stdev[f] = s;
    }
    const json report{{"pairs", pairs},
                      {"aggregate",
                       {{"count", rows.size() - failures}, {"failed", failures}, {"mean", mean}, {"std", stdev}}}};
    write_json(report_out, report);
    out << "scored: " << rows.size() - failures << " failed: " << failures << '\n';
    if (failures == rows.size()) {
      err << "score: every pair failed\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "score: " << e.what() << '\n';
    return 1;
  }
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names{"chirps_per_frame", "range_m", "noise_floor_db",
                                              "alpha",            "beta",    "material"};
  return names;
}

int cmd_sweep(const PipelineConfig& cfg, const std::string& parameter, const std::vector<std::string>& values,
              const fs::path& audio_in, const fs::path& report_out, const fs::path& csv_out, std::ostream& out,
              std::ostream& err) {
  const auto& names = sweep_parameters();
  if (std::find(names.begin(), names.end(), parameter) == names.end()) {
    err << "sweep: unknown parameter '" << parameter << "'; valid:";
    for (const auto& n : names) err << ' ' << n;
    err << '\n';
    return 2;
  }
  if (values.empty()) {
    err << "sweep: empty value list\n";
    return 2;
  }

  try {
    cfg.validate();
    const AudioBuffer source = read_wav(audio_in);
    json rows = json::array();
    std::ostringstream csv;
    csv << "value,sampling_rate_hz,bandwidth_hz,range_resolution_m,fwsegsnr,stoi,mcd,mel_loss,mag_l1,error\n";
    std::size_t failures = 0;

    for (const std::string& value : values) {
      json row{{"value", value}};
      PipelineConfig run = cfg;
      try {
        const auto number = [&] {
          std::size_t used = 0;
          const double v = std::stod(value, &used);
          if (used != value.size()) throw Error("not a number: " + value);
          return v;
        };
        if (parameter == "chirps_per_frame") {
          const double v = number();
          if (v != std::floor(v) || v < 2) throw Error("chirps_per_frame must be an integer >= 2");
          run.radar = cfg.radar.with_chirps_per_frame(static_cast<Index>(v));
        } else if (parameter == "range_m") {
          run.range_m = number();
        } else if (parameter == "noise_floor_db") {
          run.noise_floor_db = number();
        } else if (parameter == "alpha") {
          run.synthesis.alpha = number();
        } else if (parameter == "beta") {
          run.synthesis.beta = number();
        } else {
          run.material = material_preset(value);
          run.material_name = value;
        }
        run.validate();
        row["sampling_rate_hz"] = run.radar.sampling_rate();
        row["bandwidth_hz"] = run.radar.bandwidth();
        row["range_resolution_m"] = range_resolution(run.radar);

        MetricsReport r;
        if (parameter == "alpha" || parameter == "beta") {
          const AudioBuffer ref = zscore_normalize(scoring_reference(source, run.score_rate));
          SynthesisConfig s = run.synthesis;
          s.seed = derive_seed(run.seed, kSynthesisStream);
          r = score_pair(ref, synthesize_mmvib(ref, s));
        } else {
          const IFCapture cap = simulate_capture(run, source);
          ExtractOptions opts;
          opts.neighbor_half_window = run.neighbor_half_window;
          r = score_recovered(source, extract_vibration(cap, opts), run.score_rate);
        }
        row.update(report_json(r));
      } catch (const std::exception& e) {
        row["error"] = e.what();
        ++failures;
      }

      auto cell = [&](const char* key) { return row.contains(key) ? fmt(row[key].get<double>()) : std::string(); };
      csv << value << ',' << cell("sampling_rate_hz") << ',' << cell("bandwidth_hz") << ','
          << cell("range_resolution_m") << ',' << cell("fwsegsnr") << ',' << cell("stoi") << ',' << cell("mcd") << ','
          << cell("mel_loss") << ',' << cell("mag_l1") << ',' << (row.contains("error") ? row["error"].get<std::string>() : "")
          << '\n';
      rows.push_back(row);
    }

    write_json(report_out, {{"parameter", parameter}, {"seed", cfg.seed}, {"config", config_json(cfg)}, {"rows", rows}});
    std::ofstream csv_file(csv_out, std::ios::trunc);
    if (!csv_file) throw Error("cannot write " + csv_out.string());
    csv_file << csv.str();
    out << "rows: " << rows.size() << " failed: " << failures << '\n';
    return failures == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    err << "sweep: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mmvib::cli
