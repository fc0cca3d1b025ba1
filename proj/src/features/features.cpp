#include "vahf/features/features.hpp"

#include <algorithm>
#include <cmath>

#include "vahf/common/channels.hpp"
#include "vahf/common/error.hpp"
#include "vahf/dsp/dtw.hpp"
#include "vahf/dsp/spectral.hpp"

namespace vahf::features {
namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Monitored channels then the reference: the order shared by f_amp, f_mfcc
// and the stacked difference map.
std::vector<std::string> vocal_order(SensorCombo mode) {
  auto order = monitored_channels(mode);
  order.push_back(reference_channel(harness::combo_channels(mode)));
  return order;
}

template <typename Map>
const auto& need(const Map& m, const std::string& name) {
  const auto it = m.find(name);
  if (it == m.end()) throw Error("missing-channel", name);
  return it->second;
}

dsp::Grid stack_rows(const std::vector<const dsp::Grid*>& grids) {
  const int cols = grids.front()->cols;
  int rows = 0;
  for (const auto* g : grids) {
    require(g->cols == cols, "shape-mismatch", "stacked grids differ in width");
    rows += g->rows;
  }
  dsp::Grid out(rows, cols);
  auto dst = out.data.begin();
  for (const auto* g : grids) dst = std::copy(g->data.begin(), g->data.end(), dst);
  return out;
}

}  // namespace

std::string reference_channel(const std::vector<std::string>& channels) {
  if (contains(channels, "re_inner")) return "re_inner";
  if (contains(channels, "re_outer")) return "re_outer";
  throw Error("missing-channel", "no right earbud channel");
}

std::string reference_channel(const std::vector<std::string>& available, SensorCombo mode) {
  const auto wanted = harness::combo_channels(mode);
  for (const auto& ch : wanted)
    if (!contains(available, ch)) throw Error("missing-channel", ch);
  return reference_channel(wanted);
}

std::vector<std::string> monitored_channels(SensorCombo mode) {
  auto chans = harness::combo_channels(mode);
  const auto ref = reference_channel(chans);
  chans.erase(std::find(chans.begin(), chans.end(), ref));
  return chans;
}

dsp::Grid vocal_difference_frame(const std::vector<dsp::Grid>& monitored, const dsp::Grid& ref) {
  for (const auto& m : monitored)
    require(m.rows == ref.rows && m.cols == ref.cols, "shape-mismatch", "mel maps differ in shape");
  const std::size_t plane = ref.data.size();
  dsp::Grid out(static_cast<int>(monitored.size() + 1) * ref.rows, ref.cols);
  for (std::size_t i = 0; i < monitored.size(); ++i)
    for (std::size_t k = 0; k < plane; ++k) out.data[i * plane + k] = monitored[i].data[k] - ref.data[k];
  std::copy(ref.data.begin(), ref.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(monitored.size() * plane));
  return out;
}

double segment_distance(const std::vector<dsp::MfccSeries>& a, const std::vector<dsp::MfccSeries>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  require(n > 0, "empty-sequence", "no MFCC segments");
  double sum = 0;
  for (std::size_t k = 0; k < n; ++k) sum += dsp::dtw_distance(dsp::frames_of(a[k]), dsp::frames_of(b[k]));
  return sum / static_cast<double>(n);
}

std::vector<double> pairwise_distances(const std::vector<std::vector<dsp::MfccSeries>>& segments) {
  std::vector<double> d;
  for (std::size_t i = 0; i < segments.size(); ++i)
    for (std::size_t j = i + 1; j < segments.size(); ++j) d.push_back(segment_distance(segments[i], segments[j]));
  return d;
}

std::vector<float> pairwise_mfcc_similarity(const std::vector<std::vector<dsp::MfccSeries>>& segments, double tau) {
  require(segments.size() >= 2, "too-few-channels", "need two channels for a pair");
  require(tau > 0 && std::isfinite(tau), "invalid-tau");
  std::vector<float> s;
  for (double d : pairwise_distances(segments)) s.push_back(static_cast<float>(std::exp(-d / tau)));
  return s;
}

std::vector<float> imu_window(const preprocess::ImuStream& stream, int frames) {
  require(!stream.empty(), "empty-imu", "no IMU rows");
  const int n = static_cast<int>(stream.size());
  std::vector<float> flat(static_cast<std::size_t>(frames) * 10, 0.0f);
  // Crop offset into the stream, or pad offset into the window.
  const int src0 = n > frames ? (n - frames) / 2 : 0;
  const int dst0 = n < frames ? (frames - n) / 2 : 0;
  const int count = std::min(n, frames);
  for (int k = 0; k < count; ++k) {
    const auto& r = stream.rows[static_cast<std::size_t>(src0 + k)];
    float* out = flat.data() + static_cast<std::size_t>(dst0 + k) * 10;
    for (int i = 0; i < 3; ++i) out[i] = static_cast<float>(r.accel[i]);
    for (int i = 0; i < 3; ++i) out[3 + i] = static_cast<float>(r.gyro[i]);
    for (int i = 0; i < 4; ++i) out[6 + i] = static_cast<float>(r.quat[i]);
  }
  return flat;
}

SampleAnalysis analyze_sample(const preprocess::GestureSample& sample, const Config& cfg) {
  SampleAnalysis a;
  a.label = sample.label;
  a.user_id = sample.user_id;
  a.command_id = sample.command_id;
  const auto& d = cfg.dsp;
  for (const auto& [name, seg] : sample.vocal) {
    a.mel[name] = dsp::mel_spectrogram(seg, d).values;
    a.amp[name] = dsp::amplitude_series(seg, d.amp_window, d.amp_stride, d.amp_length);
    a.mfcc[name] = dsp::resample_mfcc(dsp::mfcc(seg, d.mfcc_coeffs, d), d.mfcc_segment, d.mfcc_stride);
  }
  if (!sample.ultra.empty()) {
    const auto chirp = fmcw::ChirpConfig::from(cfg.fmcw);
    const auto& timing = sample.ultra.count("watch") ? sample.ultra.at("watch") : sample.ultra.begin()->second;
    const double offset = fmcw::estimate_period_start(timing, chirp);
    for (const auto& [name, seg] : sample.ultra)
      a.beat[name] = fmcw::beat_track(fmcw::dechirp(seg, chirp, cfg.fmcw, offset, cfg.preprocess.raw_rate), cfg.fmcw);
  }
  if (!sample.imu.empty()) a.imu = imu_window(sample.imu, cfg.features.imu_frames);
  return a;
}

dsp::Grid vocal_map(const SampleAnalysis& a, SensorCombo mode) {
  const auto order = vocal_order(mode);
  std::vector<dsp::Grid> monitored;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) monitored.push_back(need(a.mel, order[i]));
  return vocal_difference_frame(monitored, need(a.mel, order.back()));
}

dsp::Grid ultra_map(const SampleAnalysis& a, SensorCombo mode) {
  require(harness::has_watch(mode), "missing-channel", "ultrasound needs the watch");
  std::vector<const dsp::Grid*> specs;
  for (const auto& ch : harness::combo_channels(mode)) specs.push_back(&need(a.beat, ch).log_spec);
  return stack_rows(specs);
}

std::vector<double> sample_pair_distances(const SampleAnalysis& a, SensorCombo mode) {
  std::vector<std::vector<dsp::MfccSeries>> segs;
  for (const auto& ch : vocal_order(mode)) segs.push_back(need(a.mfcc, ch));
  return pairwise_distances(segs);
}

double median_distance(const std::vector<const std::vector<double>*>& per_sample) {
  std::vector<double> all;
  for (const auto* d : per_sample) all.insert(all.end(), d->begin(), d->end());
  require(!all.empty(), "empty-split", "no training distances");
  const auto mid = all.begin() + static_cast<std::ptrdiff_t>(all.size() / 2);
  std::nth_element(all.begin(), mid, all.end());
  // A zero median (identical channels) would make every similarity 0 or 1.
  return std::max(*mid, 1e-9);
}

double median_pair_distance(const std::vector<const SampleAnalysis*>& train, SensorCombo mode) {
  std::vector<std::vector<double>> d;
  for (const auto* a : train) d.push_back(sample_pair_distances(*a, mode));
  std::vector<const std::vector<double>*> ptrs;
  for (const auto& v : d) ptrs.push_back(&v);
  return median_distance(ptrs);
}

FeatureBundle extract_bundle(const SampleAnalysis& a, SensorCombo mode, ModelSelector sel, const FoldContext& ctx) {
  harness::require_valid(mode, sel);
  FeatureBundle b;
  if (harness::uses_vocal(sel)) {
    const auto order = vocal_order(mode);
    std::vector<float> f;
    if (ctx.vocal_embed) f = ctx.vocal_embed(vocal_map(a, mode));
    for (const auto& ch : order) {
      const auto& amp = need(a.amp, ch);
      f.insert(f.end(), amp.begin(), amp.end());
    }
    if (ctx.distances) {
      require(ctx.tau > 0 && std::isfinite(ctx.tau), "invalid-tau");
      require(ctx.distances->size() == order.size() * (order.size() - 1) / 2, "shape-mismatch",
              "cached distances do not match the combo");
      for (double d : *ctx.distances) f.push_back(static_cast<float>(std::exp(-d / ctx.tau)));
    } else {
      std::vector<std::vector<dsp::MfccSeries>> segs;
      for (const auto& ch : order) segs.push_back(need(a.mfcc, ch));
      const auto sim = pairwise_mfcc_similarity(segs, ctx.tau);
      f.insert(f.end(), sim.begin(), sim.end());
    }
    b.f_vol = std::move(f);
  }
  if (harness::uses_ultra(sel)) {
    std::vector<float> f;
    if (ctx.ultra_embed) f = ctx.ultra_embed(ultra_map(a, mode));
    // f_stats: peak frequency then peak amplitude series, per channel.
    for (const auto& ch : harness::combo_channels(mode)) {
      const auto& t = need(a.beat, ch);
      f.insert(f.end(), t.peak_hz.begin(), t.peak_hz.end());
      f.insert(f.end(), t.peak_amp.begin(), t.peak_amp.end());
    }
    b.f_ultra = std::move(f);
  }
  if (harness::uses_imu(sel)) {
    require(!a.imu.empty(), "missing-channel", "sample has no IMU rows");
    b.f_imu = a.imu;
  }
  return b;
}

Normalizer Normalizer::fit(const std::vector<const std::vector<float>*>& rows) {
  require(!rows.empty(), "empty-split", "no rows to normalize");
  const std::size_t dim = rows.front()->size();
  std::vector<double> sum(dim, 0.0), sq(dim, 0.0);
  for (const auto* r : rows) {
    require(r->size() == dim, "shape-mismatch", "feature rows differ in length");
    for (std::size_t i = 0; i < dim; ++i) {
      sum[i] += (*r)[i];
      sq[i] += static_cast<double>((*r)[i]) * (*r)[i];
    }
  }
  Normalizer z;
  z.mean.resize(dim);
  z.inv_sd.resize(dim);
  const double n = static_cast<double>(rows.size());
  for (std::size_t i = 0; i < dim; ++i) {
    const double m = sum[i] / n;
    const double var = std::max(0.0, sq[i] / n - m * m);
    z.mean[i] = static_cast<float>(m);
    // Constant dimensions carry nothing; map them to zero.
    z.inv_sd[i] = var > 1e-12 ? static_cast<float>(1.0 / std::sqrt(var)) : 0.0f;
  }
  return z;
}

void Normalizer::apply(std::vector<float>& v) const {
  require(v.size() == mean.size(), "shape-mismatch", "feature length differs from normalizer");
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (v[i] - mean[i]) * inv_sd[i];
}

}  // namespace vahf::features
