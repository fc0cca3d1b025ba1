#include <algorithm>
#include <cmath>
#include <limits>

#include "vahf/common/error.hpp"
#include "vahf/dsp/iir.hpp"
#include "vahf/dsp/resample.hpp"
#include "vahf/preprocess/preprocess.hpp"

namespace vahf::preprocess {

namespace {

dsp::AudioSegment cut(const dsp::AudioSegment& seg, std::size_t a, std::size_t b) {
  a = std::min(a, seg.size());
  b = std::clamp(b, a, seg.size());
  return {{seg.samples.begin() + static_cast<std::ptrdiff_t>(a), seg.samples.begin() + static_cast<std::ptrdiff_t>(b)},
          seg.sample_rate};
}

std::size_t to_index(double t, double rate) { return static_cast<std::size_t>(std::llround(std::max(0.0, t) * rate)); }

}  // namespace

std::vector<GestureSample> segment_by_ticks(const MultiChannelRecording& rec) {
  rec.validate();
  require(!rec.ticks.empty(), "tick-out-of-range", "no ticks");
  const double rate = rec.sample_rate();
  const double duration = static_cast<double>(rec.length()) / rate;
  for (double t : rec.ticks) require(t >= 0 && t < duration, "tick-out-of-range", std::to_string(t));

  std::vector<GestureSample> out;
  for (std::size_t i = 0; i < rec.ticks.size(); ++i) {
    const double t0 = rec.ticks[i];
    const double t1 = i + 1 < rec.ticks.size() ? rec.ticks[i + 1] : duration;
    GestureSample s;
    s.start_s = t0;
    const std::size_t a = to_index(t0, rate);
    const std::size_t b = i + 1 < rec.ticks.size() ? to_index(t1, rate) : rec.length();
    for (const auto& [name, seg] : rec.channels) s.raw[name] = cut(seg, a, b);
    s.imu = rec.imu.slice(t0, i + 1 < rec.ticks.size() ? t1 : std::numeric_limits<double>::infinity());
    out.push_back(std::move(s));
  }
  return out;
}

BandPair split_bands(const dsp::AudioSegment& raw, const PreprocessConfig& cfg, int order) {
  return {dsp::butterworth_lowpass(raw, cfg.split_cutoff_hz, order), dsp::butterworth_highpass(raw, cfg.split_cutoff_hz, order)};
}

void split_bands(GestureSample& sample, const PreprocessConfig& cfg, int order) {
  sample.vocal.clear();
  sample.ultra.clear();
  for (auto& [name, seg] : sample.raw) {
    require(seg.sample_rate == cfg.raw_rate, "rate-mismatch", name + " is not at the raw rate");
    auto bands = split_bands(seg, cfg, order);
    sample.vocal[name] = dsp::resample(bands.low, cfg.vocal_rate);
    sample.ultra[name] = std::move(bands.high);
  }
  sample.raw.clear();
}

VadBounds vad_bounds(const dsp::AudioSegment& seg, const PreprocessConfig& cfg) {
  seg.validate();
  const auto frame = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.vad_frame_s * seg.sample_rate)));
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.vad_hop_s * seg.sample_rate)));
  require(seg.size() >= frame, "no-voice-activity", "sample shorter than one VAD frame");

  std::vector<double> db;
  for (std::size_t s = 0; s + frame <= seg.size(); s += hop) {
    double e = 0;
    for (std::size_t i = 0; i < frame; ++i) e += static_cast<double>(seg.samples[s + i]) * seg.samples[s + i];
    db.push_back(10.0 * std::log10(e / static_cast<double>(frame) + 1e-12));
  }
  const std::size_t edge = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(cfg.vad_edge_s / cfg.vad_hop_s)), 1, db.size());
  auto mean = [](auto first, auto last) {
    double acc = 0;
    for (auto it = first; it != last; ++it) acc += *it;
    return acc / static_cast<double>(std::distance(first, last));
  };
  const double head = mean(db.begin(), db.begin() + static_cast<std::ptrdiff_t>(edge));
  const double tail = mean(db.end() - static_cast<std::ptrdiff_t>(edge), db.end());
  // The cap keeps samples that are voiced up to their edges from being trimmed away.
  const double floor = std::min({head, tail, cfg.vad_noise_cap_db});
  const double thr = floor + cfg.vad_margin_db;

  std::size_t first = 0;
  while (first < db.size() && !(db[first] > thr)) ++first;
  require(first < db.size(), "no-voice-activity", "every frame is below the threshold");
  std::size_t last = db.size() - 1;
  while (!(db[last] > thr)) --last;

  VadBounds b;
  b.start_s = static_cast<double>(first * hop) / seg.sample_rate;
  b.end_s = std::min(static_cast<double>(last * hop + frame), static_cast<double>(seg.size())) / seg.sample_rate;
  return b;
}

void vad_trim(GestureSample& sample, const PreprocessConfig& cfg) {
  require(!sample.vocal.empty(), "missing-channel", "vad_trim needs vocal channels");
  const VadBounds b = vad_bounds(sample.vocal.at(sync_reference_channel(sample.vocal)), cfg);
  for (auto* map : {&sample.vocal, &sample.ultra}) {
    for (auto& [name, seg] : *map) seg = cut(seg, to_index(b.start_s, seg.sample_rate), to_index(b.end_s, seg.sample_rate));
  }
  // IMU rows nearest to the two bounds, inclusive.
  if (!sample.imu.empty()) {
    auto nearest = [&](double t) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < sample.imu.size(); ++i)
        if (std::abs(sample.imu.rows[i].t - t) < std::abs(sample.imu.rows[best].t - t)) best = i;
      return best;
    };
    const std::size_t a = nearest(sample.start_s + b.start_s);
    const std::size_t e = nearest(sample.start_s + b.end_s);
    sample.imu.rows = {sample.imu.rows.begin() + static_cast<std::ptrdiff_t>(a),
                       sample.imu.rows.begin() + static_cast<std::ptrdiff_t>(e) + 1};
  }
  sample.start_s += b.start_s;
}

std::vector<GestureSample> preprocess_recording(const MultiChannelRecording& rec, const Config& cfg) {
  auto samples = segment_by_ticks(align_channels(rec, cfg.preprocess));
  for (auto& s : samples) {
    split_bands(s, cfg.preprocess, cfg.dsp.butter_order);
    vad_trim(s, cfg.preprocess);
  }
  return samples;
}

}  // namespace vahf::preprocess
