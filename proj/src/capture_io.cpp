#include "mmvib/capture_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace mmvib {
namespace {

constexpr char kMagic[8] = {'M', 'M', 'V', 'I', 'B', 'I', 'F', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}
void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}
std::uint64_t get_u64(const unsigned char* p) { return std::uint64_t(get_u32(p)) | std::uint64_t(get_u32(p + 4)) << 32; }
double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }
float get_f32(const unsigned char* p) { return std::bit_cast<float>(get_u32(p)); }

const char* kind_name(ArtifactKind k) { return k == ArtifactKind::beginning ? "beginning" : "periodic"; }

}  // namespace

void write_capture(const std::filesystem::path& path, const IFCapture& cap) {
  const auto& cfg = cap.config;
  std::string out;
  out.reserve(kCaptureHeaderBytes + std::size_t(cap.samples.size()) * 8);
  out.append(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  put_u32(out, std::uint32_t(cfg.adc_samples_per_chirp));
  put_u32(out, std::uint32_t(cfg.chirps_per_frame));
  put_u32(out, std::uint32_t(cap.num_frames));
  put_f64(out, cfg.carrier_freq);
  put_f64(out, cfg.slope);
  put_f64(out, cfg.chirp_duration);
  put_f64(out, cfg.frame_period);
  // Column-major storage is already frame-major, chirp, fast time.
  const IFSample* data = cap.samples.data();
  for (Index i = 0; i < cap.samples.size(); ++i) {
    put_f32(out, data[i].real());
    put_f32(out, data[i].imag());
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("cannot write " + path.string());
  file.write(out.data(), std::streamsize(out.size()));
  if (!file) throw Error("write failed: " + path.string());
}

IFCapture read_capture(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error("cannot open " + path.string());
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
  if (bytes.size() < kCaptureHeaderBytes || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0 ||
      get_u32(bytes.data() + 8) != kVersion)
    throw Error("corrupt capture header");

  const unsigned char* p = bytes.data();
  IFCapture cap;
  cap.config.adc_samples_per_chirp = get_u32(p + 12);
  cap.config.chirps_per_frame = get_u32(p + 16);
  cap.num_frames = get_u32(p + 20);
  cap.config.carrier_freq = get_f64(p + 24);
  cap.config.slope = get_f64(p + 32);
  cap.config.chirp_duration = get_f64(p + 40);
  cap.config.frame_period = get_f64(p + 48);
  try {
    cap.config.validate();
  } catch (const Error&) {
    throw Error("corrupt capture header");
  }

  const auto chirps = std::uint64_t(cap.num_frames) * std::uint64_t(cap.config.chirps_per_frame);
  const auto count = chirps * std::uint64_t(cap.config.adc_samples_per_chirp);
  if (cap.num_frames == 0 || bytes.size() != kCaptureHeaderBytes + count * 8) throw Error("corrupt capture header");

  cap.samples.resize(cap.config.adc_samples_per_chirp, Index(chirps));
  IFSample* data = cap.samples.data();
  const unsigned char* s = p + kCaptureHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i, s += 8) data[i] = IFSample(get_f32(s), get_f32(s + 4));
  return cap;
}

nlohmann::json artifact_log_to_json(const ArtifactLog& log) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : log.events)
    events.push_back({{"kind", kind_name(e.kind)},
                      {"frame", e.frame},
                      {"chirp", e.chirp},
                      {"magnitude_sigma", e.magnitude_sigma},
                      {"phase_rad", e.phase_rad}});
  return {{"sigma_rad", log.sigma_rad}, {"seed", log.seed}, {"events", events}};
}

ArtifactLog artifact_log_from_json(const nlohmann::json& j) {
  ArtifactLog log;
  log.sigma_rad = j.value("sigma_rad", 0.0);
  log.seed = j.value("seed", std::uint64_t{0});
  for (const auto& e : j.value("events", nlohmann::json::array())) {
    ArtifactEvent ev;
    ev.kind = e.at("kind").get<std::string>() == "beginning" ? ArtifactKind::beginning : ArtifactKind::periodic;
    ev.frame = e.at("frame").get<Index>();
    ev.chirp = e.at("chirp").get<Index>();
    ev.magnitude_sigma = e.at("magnitude_sigma").get<double>();
    ev.phase_rad = e.at("phase_rad").get<double>();
    log.events.push_back(ev);
  }
  return log;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto out = path;
  out += ".json";
  return out;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw Error("cannot write " + path.string());
  file << j.dump(2) << '\n';
  if (!file) throw Error("write failed: " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw Error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(file);
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace mmvib
