#include "vahf/sim/voice.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "vahf/common/error.hpp"
#include "vahf/common/rng.hpp"
#include "vahf/dsp/iir.hpp"

namespace vahf::sim {

namespace {

constexpr std::array<std::string_view, kNumCommands> kCommands{
    "Text Mom.",
    "Read my messages.",
    "Who is calling?",
    "Set an alarm for eight o'clock.",
    "Pay with Apple Pay.",
    "Transfer 20 yuan to Amy.",
    "Remind me to pick up the clothes.",
    "What is my plan today?",
    "Play my favorite song.",
    "Turn on the living room lights.",
    "Turn the temperature up to 24 degrees.",
    "Show the photos taken today.",
    "Find the popular restaurants nearby.",
    "What is the latest movie?",
    "How to take a holiday on National Day?",
    "Buy train tickets to Beijing.",
    "How is the weather today?",
    "Open Voice Memos.",
    "How to go to the nearest metro station?",
    "Countdown 20 minutes.",
};

// F1, F2, F3 of a few vowels (Hz).
constexpr std::array<std::array<double, 3>, 5> kVowels{{
    {730, 1090, 2440},  // a
    {270, 2290, 3010},  // i
    {300, 870, 2240},   // u
    {530, 1840, 2480},  // e
    {570, 840, 2410},   // o
}};
constexpr std::array<double, 3> kBandwidths{80, 100, 130};

bool is_vowel(char c) {
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

// Vowel letter of each syllable; digit groups count as two syllables.
std::vector<int> syllables(std::string_view text) {
  std::vector<int> out;
  bool in_vowel = false, in_digit = false;
  for (char c : text) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      if (!in_digit) out.insert(out.end(), {3, 1});
      in_digit = true;
      in_vowel = false;
      continue;
    }
    in_digit = false;
    if (is_vowel(c)) {
      if (!in_vowel) {
        const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.push_back(l == 'a' ? 0 : l == 'i' || l == 'y' ? 1 : l == 'u' ? 2 : l == 'e' ? 3 : 4);
      }
      in_vowel = true;
    } else {
      in_vowel = false;
    }
  }
  if (out.empty()) out.push_back(0);
  return out;
}

struct Resonator {
  double y1 = 0, y2 = 0;
  double step(double x, double freq, double bw, double rate) {
    const double r = std::exp(-std::numbers::pi * bw / rate);
    const double a1 = 2 * r * std::cos(2 * std::numbers::pi * freq / rate);
    const double y = (1 - r) * x + a1 * y1 - r * r * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace

std::string_view command_text(int id) {
  require(id >= 1 && id <= kNumCommands, "unknown-command", std::to_string(id));
  return kCommands[id - 1];
}

dsp::AudioSegment synth_voice(int command_id, std::uint64_t seed, double rate) {
  const auto text = command_text(command_id);
  Rng rng(derive_seed(seed, command_id));
  const auto syl = syllables(text);

  const double pace = rng.uniform(0.17, 0.23);  // s per syllable
  const double duration = std::clamp(0.5 + pace * static_cast<double>(syl.size()), 1.5, 3.5);
  const auto n = static_cast<std::size_t>(duration * rate);

  const double f0 = rng.uniform(95.0, 220.0);
  const double formant_scale = rng.uniform(0.9, 1.15);
  const double vib_phase = rng.uniform(0.0, 2 * std::numbers::pi);
  const double lead = 0.03, tail = 0.04;
  const double slot = (duration - lead - tail) / static_cast<double>(syl.size());

  // Per-syllable formant targets with a little jitter, interpolated between slot centres.
  std::vector<std::array<double, 3>> targets(syl.size());
  for (std::size_t k = 0; k < syl.size(); ++k)
    for (int f = 0; f < 3; ++f) targets[k][f] = kVowels[syl[k]][f] * formant_scale * rng.uniform(0.95, 1.05);
  std::vector<double> burst_len(syl.size()), burst_amp(syl.size());
  for (std::size_t k = 0; k < syl.size(); ++k) {
    burst_len[k] = rng.uniform(0.015, 0.045);
    burst_amp[k] = rng.uniform(0.1, 0.4);
  }

  std::array<Resonator, 3> res;
  std::vector<double> y(n);
  double phase = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double u = (t - lead) / slot;  // syllable coordinate
    const auto k = static_cast<std::ptrdiff_t>(std::floor(u));
    const bool inside = u >= 0 && k < static_cast<std::ptrdiff_t>(syl.size());
    double env = 0, burst = 0;
    std::array<double, 3> fm = targets.front();
    if (inside) {
      const double within = (u - static_cast<double>(k)) * slot;  // s into the slot
      const double b = burst_len[k];
      if (within < b) burst = burst_amp[k] * std::sin(std::numbers::pi * within / b);
      const double voiced = slot - b - 0.02;
      if (within >= b && within < b + voiced) env = std::sin(std::numbers::pi * (within - b) / voiced);
      const double c = u - 0.5;  // interpolate formants between neighbouring syllables
      const auto k0 = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor(c)), 0, syl.size() - 1);
      const auto k1 = std::min<std::ptrdiff_t>(k0 + 1, syl.size() - 1);
      const double w = std::clamp(c - static_cast<double>(k0), 0.0, 1.0);
      for (int f = 0; f < 3; ++f) fm[f] = (1 - w) * targets[k0][f] + w * targets[k1][f];
    }
    const double pitch = f0 * (1 + 0.08 * std::sin(2 * std::numbers::pi * 0.8 * t + vib_phase)) * (1 - 0.12 * t / duration);
    phase += 2 * std::numbers::pi * pitch / rate;
    // Band-limited glottal source: harmonics with 1/h roll-off below 5 kHz.
    double src = 0;
    for (int h = 1; h * pitch < 5000.0; ++h) src += std::sin(h * phase) / h;
    src = env * src + 0.03 * env * rng.normal();
    double v = 0;
    for (int f = 0; f < 3; ++f) v += res[f].step(src, fm[f], kBandwidths[f], rate) * (f == 0 ? 1.0 : 0.6);
    y[i] = v + burst * rng.normal();
  }

  auto hp = dsp::butterworth(dsp::FilterKind::Highpass, 4, 100.0, rate);
  y = dsp::sosfilt(hp, y);
  if (rate > 12000.0) y = dsp::sosfilt(dsp::butterworth(dsp::FilterKind::Lowpass, 8, 6000.0, rate), y);

  double e = 0;
  for (double v : y) e += v * v;
  const double scale = e > 0 ? 1.0 / std::sqrt(e / static_cast<double>(n)) : 0.0;
  dsp::AudioSegment out;
  out.sample_rate = rate;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.samples[i] = static_cast<float>(y[i] * scale);
  return out;
}

}  // namespace vahf::sim
