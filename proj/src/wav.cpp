#include "mmvib/wav.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace mmvib {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t le32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}
std::uint16_t le16(const unsigned char* p) { return std::uint16_t(p[0] | p[1] << 8); }

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}
void put16(std::string& out, std::uint16_t v) {
  out.push_back(char(v & 0xFF));
  out.push_back(char(v >> 8));
}

double decode_sample(const unsigned char* p, std::uint16_t format, std::uint16_t bits) {
  if (format == kFormatFloat) {
    if (bits == 32) return double(std::bit_cast<float>(le32(p)));
    if (bits == 64) {
      const std::uint64_t v = std::uint64_t(le32(p)) | std::uint64_t(le32(p + 4)) << 32;
      return std::bit_cast<double>(v);
    }
  } else {
    switch (bits) {
      case 8: return (double(p[0]) - 128.0) / 128.0;
      case 16: return double(std::int16_t(le16(p))) / 32768.0;
      case 24: {
        std::int32_t v = std::int32_t(p[0] | p[1] << 8 | p[2] << 16);
        if (v & 0x800000) v -= 0x1000000;
        return double(v) / 8388608.0;
      }
      case 32: return double(std::int32_t(le32(p))) / 2147483648.0;
    }
  }
  throw Error("unsupported WAV sample format");
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error("not a RIFF/WAVE file: " + path.string());

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t len = le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(len, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw Error("truncated fmt chunk");
      format = le16(chunk + 8);
      channels = le16(chunk + 10);
      rate = le32(chunk + 12);
      bits = le16(chunk + 22);
      if (format == kFormatExtensible && avail >= 26) format = le16(chunk + 32);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = avail;
    }
    pos = body + len + (len & 1);
  }
  if (channels == 0 || rate == 0 || bits == 0) throw Error("missing fmt chunk: " + path.string());
  if (data == nullptr) throw Error("missing data chunk: " + path.string());
  if (format != kFormatPcm && format != kFormatFloat) throw Error("unsupported WAV format tag");
  if (bits % 8 != 0) throw Error("unsupported WAV sample format");

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const auto frames = static_cast<Index>(data_len / frame_bytes);

  AudioBuffer audio;
  audio.sample_rate = double(rate);
  audio.samples.resize(frames);
  for (Index i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c)
      acc += decode_sample(data + std::size_t(i) * frame_bytes + c * bytes_per_sample, format, bits);
    audio.samples[i] = acc / double(channels);
  }
  return audio;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
  const auto rate = static_cast<std::uint32_t>(std::lround(audio.sample_rate));
  const auto data_len = static_cast<std::uint32_t>(audio.size() * 4);
  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  put32(out, 36 + data_len);
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, kFormatFloat);
  put16(out, 1);
  put32(out, rate);
  put32(out, rate * 4);
  put16(out, 4);
  put16(out, 32);
  out += "data";
  put32(out, data_len);
  for (Index i = 0; i < audio.size(); ++i) put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(audio.samples[i])));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("cannot write " + path.string());
  file.write(out.data(), std::streamsize(out.size()));
  if (!file) throw Error("write failed: " + path.string());
}

}  // namespace mmvib
