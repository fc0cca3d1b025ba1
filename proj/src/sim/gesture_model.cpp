#include "vahf/sim/gesture_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vahf/common/channels.hpp"
#include "vahf/common/error.hpp"
#include "vahf/common/rng.hpp"
#include "vahf/dsp/iir.hpp"
#include "vahf/simd/kernels.hpp"

namespace vahf::sim {

namespace {

// Per label and channel (canonical order): voice delay ms, attenuation dB,
// occlusion cutoff Hz; then ultrasound delay ms and gain. Inner microphones
// hear bone-conducted voice (low-passed) and almost no ultrasound. The
// watch and ring sit on the gesturing hand.
struct Row {
  double vd, va, vc, ud, ug;
};
using Table = std::array<Row, 6>;

// clang-format off
constexpr std::array<Table, kNumLabels> kTable{{
  // 0 pinch ear rim: hand at the right ear, little mouth occlusion
  {{{0.45, 6, 0, 0.95, 0.07}, {0.30, 12, 1800, 1.00, 0.010},
    {0.50, 8, 6000, 0.35, 0.25}, {0.30, 12, 1800, 0.40, 0.030},
    {0.90, 12, 0, 0.05, 1.00}, {0.80, 9, 0, 0.30, 0.50}}},
  // 1 calling: thumb at ear, little finger at mouth
  {{{0.45, 6, 0, 0.70, 0.10}, {0.30, 12, 1800, 0.75, 0.012},
    {0.55, 8, 5000, 0.50, 0.20}, {0.30, 12, 1800, 0.55, 0.025},
    {0.70, 10, 0, 0.05, 1.00}, {0.25, 3, 0, 0.55, 0.40}}},
  // 2 support cheek with palm: right cheek shadowed
  {{{0.45, 6, 0, 1.05, 0.08}, {0.30, 12, 1800, 1.10, 0.010},
    {0.60, 10, 3500, 0.55, 0.18}, {0.30, 11, 1800, 0.60, 0.025},
    {0.60, 9, 0, 0.05, 1.00}, {0.50, 8, 0, 0.20, 0.50}}},
  // 3 cover mouth with palm (G1): both outer paths muffled
  {{{0.55, 16, 1200, 0.75, 0.12}, {0.30, 13, 1800, 0.80, 0.015},
    {0.55, 16, 1200, 0.75, 0.12}, {0.30, 13, 1800, 0.80, 0.015},
    {0.50, 14, 1500, 0.05, 1.00}, {0.15, 2, 2500, 0.20, 0.60}}},
  // 4 cover ear with arched palm (G2): right ear enclosed, inner boosted
  {{{0.45, 6, 0, 1.20, 0.06}, {0.30, 12, 1800, 1.25, 0.010},
    {0.65, 14, 2000, 0.20, 0.45}, {0.30, 9, 1800, 0.25, 0.060},
    {0.80, 11, 0, 0.05, 1.00}, {0.75, 10, 0, 0.35, 0.45}}},
  // 5 thinking face: hand under the chin
  {{{0.50, 7, 5000, 0.95, 0.10}, {0.30, 12, 1800, 1.00, 0.012},
    {0.50, 7, 5000, 0.95, 0.10}, {0.30, 12, 1800, 1.00, 0.012},
    {0.55, 8, 0, 0.05, 1.00}, {0.20, 4, 0, 0.15, 0.55}}},
  // 6 palm beside nose and mouth (G3): right side blocked, left reflected
  {{{0.45, 5, 0, 0.80, 0.09}, {0.30, 12, 1800, 0.85, 0.012},
    {0.60, 11, 2500, 0.45, 0.20}, {0.30, 12, 1800, 0.50, 0.025},
    {0.60, 9, 0, 0.05, 1.00}, {0.20, 4, 4000, 0.25, 0.50}}},
  // 7 cover mouth with fist
  {{{0.55, 11, 2200, 0.80, 0.12}, {0.30, 12, 1800, 0.85, 0.015},
    {0.55, 11, 2200, 0.85, 0.11}, {0.30, 12, 1800, 0.90, 0.015},
    {0.45, 10, 3000, 0.05, 1.00}, {0.12, 3, 3000, 0.10, 0.70}}},
  // 8 empty: hand resting
  {{{0.45, 6, 0, 1.75, 0.06}, {0.30, 12, 1800, 1.80, 0.008},
    {0.45, 6, 0, 1.55, 0.07}, {0.30, 12, 1800, 1.60, 0.008},
    {1.60, 16, 0, 0.05, 1.00}, {1.70, 17, 0, 0.25, 0.50}}},
}};
// clang-format on

// An unoccluded path behaves like a cutoff well above the voice band.
constexpr double kOpenCutoff = 12000.0;

double lerp_log(double a, double b, double s) { return std::exp(std::log(a) + s * (std::log(b) - std::log(a))); }

}  // namespace

void GestureAcousticModel::validate() const {
  for (const auto& [name, p] : voice) {
    require(p.delay_s >= 0 && p.delay_s <= 5e-3, "invalid-gesture-model", name + " voice delay");
    require(p.atten_db >= 0 && p.atten_db <= 30, "invalid-gesture-model", name + " attenuation");
    require(p.cutoff_hz >= 0, "invalid-gesture-model", name + " cutoff");
  }
  for (const auto& [name, p] : ultra)
    require(p.delay_s >= 0 && p.delay_s <= 5e-3 && p.gain >= 0, "invalid-gesture-model", name + " ultra path");
}

GestureAcousticModel default_gesture_model(int label) {
  require(label >= 0 && label < kNumLabels, "invalid-label", std::to_string(label));
  GestureAcousticModel m;
  m.label = label;
  for (std::size_t c = 0; c < kChannelNames.size(); ++c) {
    const Row& r = kTable[label][c];
    const std::string name(kChannelNames[c]);
    m.voice[name] = {r.vd * 1e-3, r.va, r.vc};
    m.ultra[name] = {r.ud * 1e-3, r.ug};
  }
  return m;
}

GestureAcousticModel toward_empty(const GestureAcousticModel& m, double scale) {
  const auto e = default_gesture_model(kEmptyLabel);
  GestureAcousticModel out = m;
  for (auto& [name, p] : out.voice) {
    const auto& b = e.voice.at(name);
    p.delay_s = b.delay_s + scale * (p.delay_s - b.delay_s);
    p.atten_db = b.atten_db + scale * (p.atten_db - b.atten_db);
    const double c = lerp_log(b.cutoff_hz > 0 ? b.cutoff_hz : kOpenCutoff, p.cutoff_hz > 0 ? p.cutoff_hz : kOpenCutoff, scale);
    p.cutoff_hz = c >= 0.99 * kOpenCutoff ? 0.0 : c;
  }
  for (auto& [name, p] : out.ultra) {
    const auto& b = e.ultra.at(name);
    p.delay_s = b.delay_s + scale * (p.delay_s - b.delay_s);
    p.gain = lerp_log(b.gain, p.gain, scale);
  }
  return out;
}

GestureAcousticModel apply_user(const GestureAcousticModel& m, std::uint64_t user_seed, const SimConfig& cfg) {
  GestureAcousticModel out = m;
  for (std::size_t c = 0; c < kChannelNames.size(); ++c) {
    const std::string name(kChannelNames[c]);
    Rng rng(derive_seed(user_seed, c));
    const double gain_db = rng.uniform(-cfg.user_gain_jitter_db, cfg.user_gain_jitter_db);
    const double delay = rng.uniform(-cfg.user_delay_jitter_ms, cfg.user_delay_jitter_ms) * 1e-3;
    const double u_gain_db = rng.uniform(-cfg.user_gain_jitter_db, cfg.user_gain_jitter_db);
    const double u_delay = rng.uniform(-cfg.user_delay_jitter_ms, cfg.user_delay_jitter_ms) * 1e-3;
    if (auto it = out.voice.find(name); it != out.voice.end()) {
      it->second.atten_db = std::clamp(it->second.atten_db - gain_db, 0.0, 30.0);
      it->second.delay_s = std::clamp(it->second.delay_s + delay, 0.0, 5e-3);
    }
    // The watch hears its own emitter directly; only other paths vary.
    if (auto it = out.ultra.find(name); it != out.ultra.end() && name != "watch") {
      it->second.gain *= std::pow(10.0, u_gain_db / 20.0);
      it->second.delay_s = std::clamp(it->second.delay_s + u_delay, 0.0, 5e-3);
    }
  }
  return out;
}

GestureAcousticModel apply_execution(const GestureAcousticModel& m, std::uint64_t seed) {
  Rng rng(seed);
  GestureAcousticModel out = m;
  for (auto& [name, p] : out.voice) {
    p.delay_s = std::clamp(p.delay_s + rng.normal(0.0, 0.03e-3), 0.0, 5e-3);
    p.atten_db = std::clamp(p.atten_db + rng.normal(0.0, 0.7), 0.0, 30.0);
    const double f = std::exp(rng.normal(0.0, 0.07));
    if (p.cutoff_hz > 0) p.cutoff_hz *= f;
  }
  for (auto& [name, p] : out.ultra) {
    if (name == "watch") continue;
    p.delay_s = std::clamp(p.delay_s + rng.normal(0.0, 0.03e-3), 0.0, 5e-3);
    p.gain *= std::pow(10.0, rng.normal(0.0, 0.7) / 20.0);
  }
  return out;
}

std::vector<float> fractional_delay(std::span<const float> x, double delay_samples) {
  // Kaiser-windowed sinc, 16 taps each side of the fractional point.
  constexpr int kHalf = 16;
  constexpr double kBeta = 6.0;
  const auto whole = static_cast<std::ptrdiff_t>(std::floor(delay_samples));
  const double frac = delay_samples - static_cast<double>(whole);
  auto bessel_i0 = [](double v) {
    double sum = 1, term = 1;
    for (int k = 1; k < 30; ++k) {
      term *= (v / (2 * k)) * (v / (2 * k));
      sum += term;
    }
    return sum;
  };
  std::vector<double> h(2 * kHalf);
  double hsum = 0;
  for (int j = 0; j < 2 * kHalf; ++j) {
    const double t = static_cast<double>(j - kHalf + 1) - frac;  // tap offset from the delayed point
    const double sinc = std::abs(t) < 1e-12 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
    const double r = t / (kHalf + 1);
    const double w = std::abs(r) < 1.0 ? bessel_i0(kBeta * std::sqrt(1 - r * r)) / bessel_i0(kBeta) : 0.0;
    h[j] = sinc * w;
    hsum += h[j];
  }
  for (double& v : h) v /= hsum;

  // y[i] = sum_q hr[q] x[i - whole - kHalf + q], hr = h reversed.
  std::vector<float> hr(h.rbegin(), h.rend());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const std::ptrdiff_t taps = 2 * kHalf;
  std::vector<float> y(x.size(), 0.0f);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = i - whole - kHalf;
    if (lo >= 0 && lo + taps <= n) {
      y[i] = simd::dot<float>({x.data() + lo, static_cast<std::size_t>(taps)}, hr);
      continue;
    }
    double acc = 0;
    for (std::ptrdiff_t q = 0; q < taps; ++q)
      if (lo + q >= 0 && lo + q < n) acc += hr[q] * x[lo + q];
    y[i] = static_cast<float>(acc);
  }
  return y;
}

dsp::AudioSegment propagate(const dsp::AudioSegment& source, const ChannelPath& path, double noise_sd,
                            std::uint64_t seed) {
  source.validate();
  dsp::AudioSegment out;
  out.sample_rate = source.sample_rate;
  out.samples = fractional_delay(source.samples, path.delay_s * source.sample_rate);
  const float g = static_cast<float>(std::pow(10.0, -path.atten_db / 20.0));
  for (float& v : out.samples) v *= g;
  if (path.cutoff_hz > 0 && path.cutoff_hz < 0.45 * source.sample_rate)
    dsp::sosfilt_inplace(dsp::butterworth(dsp::FilterKind::Lowpass, 6, path.cutoff_hz, source.sample_rate), out.samples);
  if (noise_sd > 0) {
    Rng rng(seed);
    for (float& v : out.samples) v += static_cast<float>(rng.normal(0.0, noise_sd));
  }
  return out;
}

}  // namespace vahf::sim
