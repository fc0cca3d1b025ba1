#pragma once

#include <cstdint>
#include <string_view>

#include "vahf/dsp/types.hpp"

namespace vahf::sim {

inline constexpr int kNumCommands = 20;

/// Voice command `id` in 1..20. Throws Error("unknown-command").
std::string_view command_text(int id);

/// Formant pseudo-speech for a command: one syllable per vowel group of the
/// text, 1.5-3.5 s long, band-limited to 100 Hz - 6 kHz, unit RMS.
/// Deterministic in (command_id, seed).
dsp::AudioSegment synth_voice(int command_id, std::uint64_t seed, double rate = 16000.0);

}  // namespace vahf::sim
