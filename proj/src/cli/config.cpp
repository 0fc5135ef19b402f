#include "mmvib/cli/config.hpp"

#include <cstdlib>
#include <functional>
#include <map>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace mmvib::cli {
namespace {

using Setter = std::function<void(PipelineConfig&, const std::string&)>;

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(key + ": expected a number, got '" + text + "'");
  }
}

long long parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(key + ": expected an integer, got '" + text + "'");
  }
}

std::uint64_t parse_seed(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size() || text.front() == '-') throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(key + ": expected an unsigned integer, got '" + text + "'");
  }
}

const std::map<std::string, Setter>& setters() {
  using C = PipelineConfig;
  static const std::map<std::string, Setter> table{
      {"radar.carrier_freq", [](C& c, const std::string& v) { c.radar.carrier_freq = parse_double("radar.carrier_freq", v); }},
      {"radar.slope", [](C& c, const std::string& v) { c.radar.slope = parse_double("radar.slope", v); }},
      {"radar.chirp_duration", [](C& c, const std::string& v) { c.radar.chirp_duration = parse_double("radar.chirp_duration", v); }},
      {"radar.adc_samples_per_chirp", [](C& c, const std::string& v) { c.radar.adc_samples_per_chirp = parse_int("radar.adc_samples_per_chirp", v); }},
      {"radar.chirps_per_frame", [](C& c, const std::string& v) { c.radar.chirps_per_frame = parse_int("radar.chirps_per_frame", v); }},
      {"radar.frame_period", [](C& c, const std::string& v) { c.radar.frame_period = parse_double("radar.frame_period", v); }},
      {"material.mass", [](C& c, const std::string& v) { c.material.mass = parse_double("material.mass", v); }},
      {"material.stiffness", [](C& c, const std::string& v) { c.material.stiffness = parse_double("material.stiffness", v); }},
      {"material.damping", [](C& c, const std::string& v) { c.material.damping = parse_double("material.damping", v); }},
      {"material.reflectivity", [](C& c, const std::string& v) { c.material.reflectivity = parse_double("material.reflectivity", v); }},
      {"material.force_scale", [](C& c, const std::string& v) { c.force_scale = parse_double("material.force_scale", v); }},
      {"scene.range_m", [](C& c, const std::string& v) { c.range_m = parse_double("scene.range_m", v); }},
      {"scene.noise_floor_db", [](C& c, const std::string& v) { c.noise_floor_db = parse_double("scene.noise_floor_db", v); }},
      {"artifacts.beginning_sigma", [](C& c, const std::string& v) { c.beginning_sigma = parse_double("artifacts.beginning_sigma", v); }},
      {"artifacts.periodic_sigma", [](C& c, const std::string& v) { c.periodic_sigma = parse_double("artifacts.periodic_sigma", v); }},
      {"synthesis.alpha", [](C& c, const std::string& v) { c.synthesis.alpha = parse_double("synthesis.alpha", v); }},
      {"synthesis.beta", [](C& c, const std::string& v) { c.synthesis.beta = parse_double("synthesis.beta", v); }},
      {"extract.neighbor_half_window", [](C& c, const std::string& v) { c.neighbor_half_window = parse_int("extract.neighbor_half_window", v); }},
      {"run.seed", [](C& c, const std::string& v) { c.seed = parse_seed("run.seed", v); }},
      {"run.score_rate", [](C& c, const std::string& v) { c.score_rate = parse_double("run.score_rate", v); }},
  };
  return table;
}

}  // namespace

PipelineConfig load_config(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error("config: " + std::string(e.what()));
  }

  PipelineConfig cfg;
  // The preset goes first so explicit material fields can refine it.
  if (const auto preset = tree.get_optional<std::string>("material.preset")) {
    try {
      cfg.material = material_preset(*preset);
    } catch (const Error&) {
      throw Error("material.preset: unknown preset '" + *preset + "'");
    }
    cfg.material_name = *preset;
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw Error("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (full == "material.preset") continue;
      const auto it = setters().find(full);
      if (it == setters().end()) throw Error(full + ": unknown config key");
      it->second(cfg, value.get_value<std::string>());
      if (section == "material") cfg.material_name = "custom";
    }
  }
  cfg.validate();
  return cfg;
}

std::uint64_t seed_from_env(std::uint64_t seed) {
  const char* env = std::getenv("MMVIB_SEED");
  if (env == nullptr || *env == '\0') return seed;
  return parse_seed("MMVIB_SEED", env);
}

}  // namespace mmvib::cli
