#include <algorithm>
#include <cmath>
#include <vector>

#include "vahf/common/error.hpp"
#include "vahf/preprocess/preprocess.hpp"

namespace vahf::preprocess {

namespace {

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

// Index of the maximum of the first run strictly above median + k * MAD.
std::size_t first_peak(const std::vector<double>& env, double k) {
  require(!env.empty(), "no-sync-event", "empty envelope");
  const double med = median(env);
  std::vector<double> dev(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) dev[i] = std::abs(env[i] - med);
  const double thr = med + k * median(dev);
  std::size_t i = 0;
  while (i < env.size() && !(env[i] > thr)) ++i;
  require(i < env.size(), "no-sync-event", "no envelope sample above threshold");
  std::size_t best = i;
  for (; i < env.size() && env[i] > thr; ++i)
    if (env[i] > env[best]) best = i;
  return best;
}

}  // namespace

double detect_sync_peak(const dsp::AudioSegment& seg, const PreprocessConfig& cfg) {
  seg.validate();
  const auto win = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.clap_window_s * seg.sample_rate)));
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.clap_hop_s * seg.sample_rate)));
  require(seg.size() >= win, "no-sync-event", "recording shorter than the envelope window");
  // Running sum of squares gives each window's RMS in O(1).
  std::vector<double> cum(seg.size() + 1, 0.0);
  for (std::size_t i = 0; i < seg.size(); ++i) cum[i + 1] = cum[i] + static_cast<double>(seg.samples[i]) * seg.samples[i];
  std::vector<double> env;
  for (std::size_t s = 0; s + win <= seg.size(); s += hop) env.push_back(std::sqrt((cum[s + win] - cum[s]) / static_cast<double>(win)));
  const std::size_t best = first_peak(env, cfg.clap_mad_k);
  return (static_cast<double>(best * hop) + 0.5 * static_cast<double>(win)) / seg.sample_rate;
}

double detect_sync_peak(const ImuStream& imu, const PreprocessConfig& cfg) {
  require(imu.size() >= 2, "no-sync-event", "IMU stream too short");
  const double dt = (imu.rows.back().t - imu.rows.front().t) / static_cast<double>(imu.size() - 1);
  const auto win = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.clap_window_s / dt)));
  require(imu.size() >= win, "no-sync-event", "IMU stream shorter than the envelope window");
  std::vector<double> mag(imu.size());
  for (std::size_t i = 0; i < imu.size(); ++i) {
    const auto& a = imu.rows[i].accel;
    mag[i] = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
  }
  std::vector<double> env;
  for (std::size_t s = 0; s + win <= mag.size(); ++s) {
    double acc = 0;
    for (std::size_t j = 0; j < win; ++j) acc += mag[s + j];
    env.push_back(acc / static_cast<double>(win));
  }
  const std::size_t best = first_peak(env, cfg.clap_mad_k);
  return 0.5 * (imu.rows[best].t + imu.rows[best + win - 1].t);
}

std::string sync_reference_channel(const ChannelMap& channels) {
  require(!channels.empty(), "missing-channel", "recording has no audio channel");
  for (const char* name : {"re_inner", "re_outer"})
    if (channels.count(name)) return name;
  return channels.begin()->first;
}

MultiChannelRecording align_channels(const MultiChannelRecording& rec, const PreprocessConfig& cfg) {
  const double audio_t = detect_sync_peak(rec.channels.at(sync_reference_channel(rec.channels)), cfg);
  const double imu_t = detect_sync_peak(rec.imu, cfg);
  MultiChannelRecording out = rec;
  const double shift = audio_t - imu_t;
  for (auto& r : out.imu.rows) r.t += shift;
  return out;
}

}  // namespace vahf::preprocess
