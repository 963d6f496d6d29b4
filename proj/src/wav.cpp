// wav.cpp

#include "wblcmp/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "wblcmp/errors.hpp"

namespace wblcmp {

namespace {

void put_u32(std::ofstream& f, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  f.write(b, 4);
}

void put_u16(std::ofstream& f, std::uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  f.write(b, 2);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

WavData read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open WAV file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw IoError("not a RIFF/WAVE file: " + path);

  WavData out;
  int n_channels = 0;
  int format = 0;
  int bits = 0;
  size_t pos = 12;
  bool got_fmt = false;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t chunk_size = get_u32(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) break;
    if (std::memcmp(id, "fmt ", 4) == 0 && chunk_size >= 16) {
      format = get_u16(bytes.data() + body);
      n_channels = get_u16(bytes.data() + body + 2);
      out.sample_rate = get_u32(bytes.data() + body + 4);
      bits = get_u16(bytes.data() + body + 14);
      got_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!got_fmt) throw IoError("WAV data chunk before fmt chunk: " + path);
      if (format != 3 || bits != 32)
        throw IoError("unsupported WAV encoding (need 32-bit float PCM): " + path);
      if (n_channels <= 0) throw IoError("WAV has no channels: " + path);
      const size_t n_samples = chunk_size / 4 / n_channels;
      out.channels.assign(n_channels, std::vector<double>(n_samples));
      const unsigned char* p = bytes.data() + body;
      for (size_t i = 0; i < n_samples; ++i) {
        for (int c = 0; c < n_channels; ++c) {
          float v;
          std::memcpy(&v, p + (i * n_channels + c) * 4, 4);
          out.channels[c][i] = v;
        }
      }
      return out;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }
  throw IoError("WAV file has no data chunk: " + path);
}

void write_wav(const std::string& path, const Audio& channels, double sample_rate) {
  if (channels.empty()) throw IoError("write_wav: no channels");
  const size_t n_samples = channels[0].size();
  for (const auto& ch : channels)
    if (ch.size() != n_samples) throw LengthMismatch("write_wav: channel lengths differ");
  const int n_ch = static_cast<int>(channels.size());

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot create WAV file: " + path);
  const std::uint32_t data_size = static_cast<std::uint32_t>(n_samples * n_ch * 4);
  f.write("RIFF", 4);
  put_u32(f, 36 + data_size);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  put_u32(f, 16);
  put_u16(f, 3);  // IEEE float
  put_u16(f, static_cast<std::uint16_t>(n_ch));
  put_u32(f, static_cast<std::uint32_t>(sample_rate));
  put_u32(f, static_cast<std::uint32_t>(sample_rate) * n_ch * 4);
  put_u16(f, static_cast<std::uint16_t>(n_ch * 4));
  put_u16(f, 32);
  f.write("data", 4);
  put_u32(f, data_size);
  std::vector<char> buf(n_samples > 0 ? n_ch * 4 : 0);
  for (size_t i = 0; i < n_samples; ++i) {
    for (int c = 0; c < n_ch; ++c) {
      const float v = static_cast<float>(channels[c][i]);
      std::memcpy(buf.data() + c * 4, &v, 4);
    }
    f.write(buf.data(), n_ch * 4);
  }
  if (!f) throw IoError("failed writing WAV file: " + path);
}

}  // namespace wblcmp
