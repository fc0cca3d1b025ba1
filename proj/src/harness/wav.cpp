#include "vahf/harness/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "vahf/common/error.hpp"

namespace vahf::harness {
namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

template <typename Int>
void put(std::ofstream& out, Int v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename Int>
Int get(const std::vector<char>& b, std::size_t at) {
  if (at + sizeof(Int) > b.size()) throw Error("wav-format", "truncated header");
  Int v;
  std::memcpy(&v, b.data() + at, sizeof v);
  return v;
}

}  // namespace

void write_wav(const std::filesystem::path& path, const dsp::AudioSegment& seg, WavFormat fmt) {
  require(seg.sample_rate > 0 && std::floor(seg.sample_rate) == seg.sample_rate, "wav-format", "integral sample rate required");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("wav-format", "cannot write " + path.string());
  const std::uint16_t bits = fmt == WavFormat::Pcm16 ? 16 : 32;
  const std::uint16_t tag = fmt == WavFormat::Pcm16 ? 1 : 3;
  const auto rate = static_cast<std::uint32_t>(seg.sample_rate);
  const auto data_bytes = static_cast<std::uint32_t>(seg.size() * bits / 8);
  out.write("RIFF", 4);
  put<std::uint32_t>(out, 36 + data_bytes);
  out.write("WAVEfmt ", 8);
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, tag);
  put<std::uint16_t>(out, 1);
  put<std::uint32_t>(out, rate);
  put<std::uint32_t>(out, rate * bits / 8);
  put<std::uint16_t>(out, bits / 8);
  put<std::uint16_t>(out, bits);
  out.write("data", 4);
  put<std::uint32_t>(out, data_bytes);
  if (fmt == WavFormat::Float32) {
    out.write(reinterpret_cast<const char*>(seg.samples.data()), static_cast<std::streamsize>(data_bytes));
  } else {
    std::vector<std::int16_t> pcm(seg.size());
    for (std::size_t i = 0; i < pcm.size(); ++i)
      pcm[i] = static_cast<std::int16_t>(std::lround(std::clamp(seg.samples[i], -1.0f, 1.0f) * 32767.0f));
    out.write(reinterpret_cast<const char*>(pcm.data()), static_cast<std::streamsize>(data_bytes));
  }
}

dsp::AudioSegment read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("wav-format", "cannot open " + path.string());
  const std::vector<char> b{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 || std::memcmp(b.data() + 8, "WAVE", 4) != 0)
    throw Error("wav-format", path.string() + ": not a RIFF/WAVE file");

  std::uint16_t tag = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t at = 12;
  while (at + 8 <= b.size()) {
    const std::string id(b.data() + at, 4);
    const auto size = get<std::uint32_t>(b, at + 4);
    const std::size_t body = at + 8;
    if (body + size > b.size()) throw Error("wav-format", path.string() + ": truncated chunk " + id);
    if (id == "fmt ") {
      tag = get<std::uint16_t>(b, body);
      channels = get<std::uint16_t>(b, body + 2);
      rate = get<std::uint32_t>(b, body + 4);
      bits = get<std::uint16_t>(b, body + 14);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw Error("wav-format", path.string() + ": data before fmt");
      if (channels != 1) throw Error("wav-format", path.string() + ": only mono is supported");
      dsp::AudioSegment seg;
      seg.sample_rate = rate;
      if (tag == 1 && bits == 16) {
        seg.samples.resize(size / 2);
        for (std::size_t i = 0; i < seg.samples.size(); ++i)
          seg.samples[i] = static_cast<float>(get<std::int16_t>(b, body + 2 * i)) / 32767.0f;
      } else if (tag == 3 && bits == 32) {
        seg.samples.resize(size / 4);
        std::memcpy(seg.samples.data(), b.data() + body, seg.samples.size() * 4);
      } else {
        throw Error("wav-format", path.string() + ": unsupported encoding");
      }
      return seg;
    }
    at = body + size + (size & 1u);
  }
  throw Error("wav-format", path.string() + ": no data chunk");
}

}  // namespace vahf::harness
