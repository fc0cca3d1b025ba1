#pragma once

#include <filesystem>

#include "vahf/dsp/types.hpp"

namespace vahf::harness {

enum class WavFormat { Pcm16, Float32 };

/// Mono RIFF/WAVE. PCM16 clamps to [-1, 1] and scales by 32767.
void write_wav(const std::filesystem::path& path, const dsp::AudioSegment& seg, WavFormat fmt = WavFormat::Pcm16);
/// Reads mono PCM16 or IEEE float32. Throws Error("wav-format") otherwise.
dsp::AudioSegment read_wav(const std::filesystem::path& path);

}  // namespace vahf::harness
