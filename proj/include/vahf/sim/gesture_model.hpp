#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vahf/common/config.hpp"
#include "vahf/dsp/types.hpp"

namespace vahf::sim {

/// Mouth-to-microphone voice path.
struct ChannelPath {
  double delay_s = 0.0;
  double atten_db = 0.0;
  double cutoff_hz = 0.0;  // occlusion low-pass; 0 = unoccluded
  bool operator==(const ChannelPath&) const = default;
};

/// Watch-emitter-to-microphone ultrasound path.
struct UltraPath {
  double delay_s = 0.0;
  double gain = 0.0;  // linear, relative to the emitted amplitude
  bool operator==(const UltraPath&) const = default;
};

struct GestureAcousticModel {
  int label = -1;
  std::map<std::string, ChannelPath> voice;
  std::map<std::string, UltraPath> ultra;
  /// Throws Error("invalid-gesture-model"): delays in [0, 5] ms, attenuations in [0, 30] dB.
  void validate() const;
  bool operator==(const GestureAcousticModel&) const = default;
};

/// Hand-authored default for labels 0..8. Throws Error("invalid-label").
GestureAcousticModel default_gesture_model(int label);

/// Shrinks every deviation from the empty-gesture model by `scale`
/// (delays, dB, log cutoff, log gain).
GestureAcousticModel toward_empty(const GestureAcousticModel& m, double scale);

/// Fixed per-user offsets (gain +-user_gain_jitter_db, delay
/// +-user_delay_jitter_ms, uniform) drawn per channel from `user_seed`; the
/// same offsets apply to every gesture of that user.
GestureAcousticModel apply_user(const GestureAcousticModel& m, std::uint64_t user_seed, const SimConfig& cfg);

/// Small per-utterance execution variation.
GestureAcousticModel apply_execution(const GestureAcousticModel& m, std::uint64_t seed);

/// Delays by a windowed-sinc fractional-delay filter, attenuates, applies
/// the occlusion low-pass (Butterworth, order 6), then adds white Gaussian
/// noise of standard deviation noise_sd. Output length equals input length.
dsp::AudioSegment propagate(const dsp::AudioSegment& source, const ChannelPath& path, double noise_sd = 0.0,
                            std::uint64_t seed = 0);

/// Fractional delay, output length preserved (input treated as zero outside).
std::vector<float> fractional_delay(std::span<const float> x, double delay_samples);

}  // namespace vahf::sim
