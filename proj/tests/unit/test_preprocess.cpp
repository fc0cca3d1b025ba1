#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "vahf/common/error.hpp"
#include "vahf/common/rng.hpp"
#include "vahf/preprocess/preprocess.hpp"
#include "vahf/sim/session.hpp"

using namespace vahf;
using namespace vahf::preprocess;

namespace {

std::vector<double> to_double(const std::vector<float>& v) { return {v.begin(), v.end()}; }

std::string error_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return {};
}

dsp::AudioSegment impulses(std::initializer_list<double> times, double seconds, double rate = 48000.0) {
  dsp::AudioSegment s{std::vector<float>(static_cast<std::size_t>(seconds * rate), 0.0f), rate};
  Rng rng(5);
  for (auto& v : s.samples) v = static_cast<float>(rng.normal(0.0, 1e-4));
  for (double t : times) {
    const auto at = static_cast<std::size_t>(t * rate);
    for (std::size_t i = 0; i < 240; ++i) s.samples[at + i] += static_cast<float>(0.8 * std::exp(-static_cast<double>(i) / 100.0));
  }
  return s;
}

sim::Session small_session(int user, int label, std::size_t utterances = 10, std::uint64_t seed = 31) {
  auto plans = sim::default_plans(user + 1, seed, 10);
  auto plan = plans[static_cast<std::size_t>(user) * 9 + label];
  plan.commands.resize(utterances);
  return sim::make_session(plan, Config{});
}

}  // namespace

TEST_CASE("sync peak detection") {
  CHECK(std::abs(detect_sync_peak(impulses({2.0}, 4.0)) - 2.0) <= 0.025);
  CHECK(std::abs(detect_sync_peak(impulses({1.0, 3.0}, 4.0)) - 1.0) <= 0.025);
  const dsp::AudioSegment silence{std::vector<float>(48000, 0.0f), 48000.0};
  CHECK(error_code([&] { detect_sync_peak(silence); }) == "no-sync-event");

  ImuStream imu;
  for (int i = 0; i < 800; ++i) {
    ImuRow r;
    r.t = i / 200.0;
    r.accel = {0, 0, 9.81 + 0.01 * std::sin(i * 0.37)};
    if (i >= 300 && i < 304) r.accel[0] = 30.0;
    imu.rows.push_back(r);
  }
  CHECK(std::abs(detect_sync_peak(imu) - 1.5) <= 0.025);
}

TEST_CASE("alignment recovers the IMU clock offset") {
  const auto s = small_session(0, 2, 2);
  const auto aligned = align_channels(s.recording);
  // t_aligned = t_imu + shift and t_imu = t_true + offset, so the residual is shift + offset.
  const double shift = aligned.imu.rows[0].t - s.recording.imu.rows[0].t;
  CHECK(std::abs(shift + s.truth.imu_offset) <= 0.025);
  // Audio untouched, alignment idempotent.
  CHECK(aligned.channels.at("re_inner").samples == s.recording.channels.at("re_inner").samples);
  const auto twice = align_channels(aligned);
  for (std::size_t i = 0; i < aligned.imu.size(); i += 50) CHECK(twice.imu.rows[i].t == doctest::Approx(aligned.imu.rows[i].t).epsilon(1e-12));

  auto no_clap = s.recording;
  for (auto& [name, seg] : no_clap.channels) std::fill(seg.samples.begin(), seg.samples.end(), 0.0f);
  CHECK(error_code([&] { align_channels(no_clap); }) == "no-sync-event");
}

TEST_CASE("segmentation partitions the recording") {
  MultiChannelRecording rec;
  rec.channels["re_inner"] = {std::vector<float>(60 * 1000, 0.0f), 1000.0};
  for (int i = 0; i < 10; ++i) rec.ticks.push_back(3.0 + 5.5 * i);
  for (int i = 0; i < 60 * 200; ++i) rec.imu.rows.push_back({i / 200.0, {}, {}, {1, 0, 0, 0}});
  const auto samples = segment_by_ticks(rec);
  REQUIRE(samples.size() == 10);
  std::size_t total = 0, imu_total = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    total += samples[i].raw.at("re_inner").size();
    imu_total += samples[i].imu.size();
    CHECK(samples[i].start_s == rec.ticks[i]);
    if (i + 1 < samples.size()) CHECK(samples[i].raw.at("re_inner").size() == 5500);
  }
  CHECK(total == 60000 - 3000);
  CHECK(imu_total == (60 - 3) * 200);

  rec.ticks = {0.0};
  const auto whole = segment_by_ticks(rec);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].raw.at("re_inner").size() == 60000);
  CHECK(whole[0].imu.size() == rec.imu.size());

  rec.ticks = {1.0, 61.0};
  CHECK(error_code([&] { segment_by_ticks(rec); }) == "tick-out-of-range");
}

TEST_CASE("band split") {
  const double rate = 48000.0;
  const std::size_t n = 1 << 16;
  dsp::AudioSegment mix{std::vector<float>(n), rate};
  std::vector<double> low(n), high(n);
  for (std::size_t i = 0; i < n; ++i) {
    low[i] = 0.3 * std::sin(2 * 3.141592653589793 * 1000.0 * i / rate);
    high[i] = 0.3 * std::sin(2 * 3.141592653589793 * 20000.0 * i / rate);
    mix.samples[i] = static_cast<float>(low[i] + high[i]);
  }
  const auto bands = split_bands(mix);
  const double e1k = oracle::band_energy(low, rate, 900, 1100), e20k = oracle::band_energy(high, rate, 19900, 20100);
  CHECK(oracle::band_energy(to_double(bands.low.samples), rate, 900, 1100) / e1k >= 0.99);
  CHECK(oracle::band_energy(to_double(bands.high.samples), rate, 19900, 20100) / e20k >= 0.99);
  CHECK(oracle::band_energy(to_double(bands.high.samples), rate, 900, 1100) / e1k < 1e-4);

  // 17.5 kHz splits evenly, -3 dB each.
  dsp::AudioSegment edge{std::vector<float>(n), rate};
  for (std::size_t i = 0; i < n; ++i) edge.samples[i] = static_cast<float>(std::sin(2 * 3.141592653589793 * 17500.0 * i / rate));
  const auto eb = split_bands(edge);
  const double in = oracle::rms(to_double(edge.samples), 4096);
  CHECK(20 * std::log10(oracle::rms(to_double(eb.low.samples), 4096) / in) == doctest::Approx(-3.01).epsilon(0.05));
  CHECK(20 * std::log10(oracle::rms(to_double(eb.high.samples), 4096) / in) == doctest::Approx(-3.01).epsilon(0.05));

  // Energy is conserved for broadband noise.
  Rng rng(8);
  dsp::AudioSegment noise{std::vector<float>(n), rate};
  for (auto& v : noise.samples) v = static_cast<float>(rng.normal(0.0, 0.1));
  const auto nb = split_bands(noise);
  auto energy = [](const std::vector<float>& v) {
    double e = 0;
    for (float x : v) e += static_cast<double>(x) * x;
    return e;
  };
  const double ratio = (energy(nb.low.samples) + energy(nb.high.samples)) / energy(noise.samples);
  CHECK(ratio >= 0.95);
  CHECK(ratio <= 1.0);

  // Sample-level split: vocal at 16 kHz, ultra at 48 kHz, silence stays silent.
  GestureSample gs;
  gs.raw["re_inner"] = mix;
  gs.raw["watch"] = dsp::AudioSegment{std::vector<float>(n, 0.0f), rate};
  split_bands(gs);
  CHECK(gs.raw.empty());
  CHECK(gs.vocal.at("re_inner").sample_rate == 16000.0);
  CHECK(gs.vocal.at("re_inner").size() == (n + 2) / 3);
  CHECK(gs.ultra.at("re_inner").sample_rate == 48000.0);
  CHECK(std::all_of(gs.vocal.at("watch").samples.begin(), gs.vocal.at("watch").samples.end(), [](float v) { return v == 0.0f; }));
  CHECK(std::all_of(gs.ultra.at("watch").samples.begin(), gs.ultra.at("watch").samples.end(), [](float v) { return v == 0.0f; }));
}

TEST_CASE("vad") {
  const double rate = 16000.0;
  Rng rng(4);
  dsp::AudioSegment s{std::vector<float>(static_cast<std::size_t>(3.5 * rate)), rate};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = i / rate;
    double v = rng.normal(0.0, 1e-3);
    if (t >= 0.8 && t < 2.9) v += 0.1 * std::sin(2 * 3.141592653589793 * 300.0 * t);
    s.samples[i] = static_cast<float>(v);
  }
  const auto b = vad_bounds(s);
  CHECK(std::abs(b.start_s - 0.8) <= 0.1);
  CHECK(std::abs(b.end_s - 2.9) <= 0.1);

  dsp::AudioSegment loud{std::vector<float>(static_cast<std::size_t>(2 * rate)), rate};
  for (std::size_t i = 0; i < loud.size(); ++i) loud.samples[i] = static_cast<float>(0.1 * std::sin(2 * 3.141592653589793 * 300.0 * i / rate));
  const auto lb = vad_bounds(loud);
  CHECK(lb.start_s == 0.0);
  CHECK(lb.end_s == doctest::Approx(2.0));

  dsp::AudioSegment quiet{std::vector<float>(static_cast<std::size_t>(rate), 0.0f), rate};
  CHECK(error_code([&] { vad_bounds(quiet); }) == "no-voice-activity");

  GestureSample gs;
  gs.vocal["re_inner"] = s;
  gs.ultra["re_inner"] = dsp::AudioSegment{std::vector<float>(s.size() * 3, 0.5f), 48000.0};
  for (int i = 0; i < 700; ++i) gs.imu.rows.push_back({i / 200.0, {}, {}, {1, 0, 0, 0}});
  vad_trim(gs);
  const auto& v = gs.vocal.at("re_inner");
  CHECK(v.size() < s.size());
  CHECK(gs.ultra.at("re_inner").size() == 3 * v.size());
  CHECK(gs.imu.rows.front().t == doctest::Approx(gs.start_s).epsilon(0.01).scale(1.0));
  CHECK(std::abs(gs.imu.rows.back().t - (gs.start_s + v.duration())) <= 0.005 + 1e-9);
}

TEST_CASE("full preprocessing of a simulated session matches ground truth") {
  for (int label : {3, 8}) {
    const auto s = small_session(1, label, 10);
    const auto samples = preprocess_recording(s.recording, Config{});
    REQUIRE(samples.size() == 10);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& u = s.truth.utterances[i];
      const auto& gs = samples[i];
      const double start = gs.start_s;
      const double end = gs.start_s + gs.vocal.at("re_inner").duration();
      CHECK(std::abs(start - u.voice_start) <= 0.1);
      CHECK(std::abs(end - u.voice_end) <= 0.1);
      CHECK(gs.vocal.size() == 6);
      CHECK(gs.ultra.size() == 6);
      CHECK(!gs.imu.empty());
    }
  }
}
