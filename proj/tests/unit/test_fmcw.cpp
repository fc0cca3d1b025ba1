#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "vahf/common/error.hpp"
#include "vahf/common/rng.hpp"
#include "vahf/fmcw/fmcw.hpp"

using namespace vahf;
using namespace vahf::fmcw;

namespace {

constexpr double kRate = 48000.0;

// A single echo A1 * x0(t - t0 - offset), evaluated analytically.
dsp::AudioSegment echo(const ChirpConfig& cfg, double t0, double a1, double seconds, double offset = 0.0,
                       double noise_sd = 0.0, std::uint64_t seed = 1) {
  Rng rng(seed);
  dsp::AudioSegment s;
  s.sample_rate = kRate;
  s.samples.resize(static_cast<std::size_t>(seconds * kRate));
  for (std::size_t n = 0; n < s.size(); ++n) {
    double v = a1 / cfg.amplitude * chirp_value(cfg, n / kRate - t0 - offset);
    if (noise_sd > 0) v += rng.normal(0.0, noise_sd);
    s.samples[n] = static_cast<float>(v);
  }
  return s;
}

std::vector<double> to_double(const std::vector<float>& v) { return {v.begin(), v.end()}; }

std::string error_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return {};
}

}  // namespace

TEST_CASE("chirp ridge sweeps f0 to f1 in every period") {
  const ChirpConfig cfg;
  const auto x = generate_chirp(cfg, 1.0, kRate);
  REQUIRE(x.size() == 48000);
  const auto xd = to_double(x.samples);
  // 20 periods of 2400 samples; track the ridge at a few points of each.
  for (int period = 0; period < 20; ++period) {
    for (double frac : {0.1, 0.5, 0.9}) {
      const std::size_t centre = static_cast<std::size_t>((period + frac) * 2400);
      const double f = oracle::peak_frequency(xd, centre - 128, 256, 4096, kRate);
      const double want = cfg.f0 + cfg.slope() * frac * cfg.period_s;
      CHECK(std::abs(f - want) < 400.0);
    }
  }
}

TEST_CASE("chirp edge cases") {
  ChirpConfig silent;
  silent.amplitude = 0.0;
  const auto z = generate_chirp(silent, 0.2, kRate);
  CHECK(std::all_of(z.samples.begin(), z.samples.end(), [](float v) { return v == 0.0f; }));

  const ChirpConfig cfg;
  const auto one = generate_chirp(cfg, cfg.period_s, kRate);
  CHECK(one.size() == 2400);
  const auto d = to_double(one.samples);
  CHECK(std::abs(oracle::peak_frequency(d, 0, 256, 4096, kRate) - (cfg.f0 + cfg.slope() * 128 / kRate)) < 400.0);
  CHECK(std::abs(oracle::peak_frequency(d, 2400 - 256, 256, 4096, kRate) - (cfg.f1 - cfg.slope() * 128 / kRate)) < 400.0);

  CHECK(error_code([&] { generate_chirp(cfg, 1.0, 44000.0); }) == "undersampled-chirp");
  ChirpConfig bad;
  bad.f1 = bad.f0;
  CHECK(error_code([&] { generate_chirp(bad, 1.0, kRate); }) == "invalid-chirp");
}

TEST_CASE("dechirp of a 1 ms echo beats at slope * t0") {
  const ChirpConfig cfg;
  const auto rx = echo(cfg, 1e-3, 0.02, 1.0);
  const auto beat = dechirp(rx, cfg);
  // Oracle: (B/T) t0 = 5000 / 0.05 * 0.001 = 100 Hz; a 2048-point bin is 23.4 Hz.
  const double want = 5000.0 / 0.05 * 1e-3;
  CHECK(want == doctest::Approx(100.0));
  const auto b = to_double(beat.samples);
  const double f = oracle::peak_frequency(b, 4800, 2048, 2048, kRate, 0.0, 2000.0);
  CHECK(std::abs(f - want) <= kRate / 2048);

  // Amplitude A0 A1 / 2 in the steady part of each period.
  const auto tr = beat_track(beat);
  double med = 0;
  std::vector<float> amps(tr.peak_amp.begin() + 25, tr.peak_amp.begin() + 38);  // 19 real frames, centred
  std::nth_element(amps.begin(), amps.begin() + 6, amps.end());
  med = amps[6];
  CHECK(med == doctest::Approx(0.5 * cfg.amplitude * 0.02).epsilon(0.15));
}

TEST_CASE("dechirp limits") {
  const ChirpConfig cfg;
  SUBCASE("zero delay puts the beat at DC") {
    const auto beat = dechirp(echo(cfg, 0.0, 0.02, 0.5), cfg);
    const auto b = to_double(beat.samples);
    const double lo = oracle::band_energy({b.begin() + 2400, b.end()}, kRate, 0.0, 30.0);
    const double all = oracle::band_energy({b.begin() + 2400, b.end()}, kRate, 0.0, kRate / 2);
    CHECK(lo / all > 0.9);
  }
  SUBCASE("no echo, no beat") {
    const auto beat = dechirp(echo(cfg, 1e-3, 0.0, 0.5), cfg);
    CHECK(std::all_of(beat.samples.begin(), beat.samples.end(), [](float v) { return v == 0.0f; }));
  }
  SUBCASE("output is band-limited") {
    for (double t0 : {0.3e-3, 1e-3, 2.5e-3}) {
      const auto b = to_double(dechirp(echo(cfg, t0, 0.02, 1.0, 0.0, 1e-3), cfg).samples);
      const double below = oracle::band_energy(b, kRate, 0.0, 4000.0);
      const double all = oracle::band_energy(b, kRate, 0.0, kRate / 2);
      CHECK(below / all >= 0.99);
    }
  }
  SUBCASE("rate mismatch") {
    auto rx = echo(cfg, 1e-3, 0.02, 0.1);
    rx.sample_rate = 44100.0;
    CHECK(error_code([&] { dechirp(rx, cfg); }) == "rate-mismatch");
  }
}

TEST_CASE("beat amplitude is linear in echo amplitude") {
  const ChirpConfig cfg;
  const auto t1 = beat_track(dechirp(echo(cfg, 1.5e-3, 0.01, 1.0), cfg));
  const auto t2 = beat_track(dechirp(echo(cfg, 1.5e-3, 0.02, 1.0), cfg));
  for (int f = 25; f < 38; ++f) CHECK(t2.peak_amp[f] == doctest::Approx(2.0 * t1.peak_amp[f]).epsilon(0.05));
}

TEST_CASE("delay recovery over the 0.1..3 ms range") {
  const ChirpConfig cfg;
  Rng rng(3);
  int ok = 0;
  for (int i = 0; i < 50; ++i) {
    const double t0 = rng.uniform(0.1e-3, 3e-3);
    const auto rx = echo(cfg, t0, 0.02, 0.5, 0.0, 2e-3, 100 + i);
    const double est = estimate_delay(rx, cfg);
    if (std::abs(est - t0) <= 0.15e-3) ++ok;
  }
  CHECK(ok >= 48);
}

TEST_CASE("period start estimate") {
  const ChirpConfig cfg;
  for (double offset : {0.0, 0.0173, 0.0421}) {
    const auto rx = echo(cfg, 0.0, 0.05, 0.3, offset, 1e-3);
    const double est = estimate_period_start(rx, cfg);
    CHECK(std::abs(est - offset) <= 0.5 / kRate);
    // Delay recovery stays accurate once the start is known.
    const auto rx2 = echo(cfg, 1.2e-3, 0.02, 0.5, offset, 1e-3);
    CHECK(std::abs(estimate_delay(rx2, cfg, {}, est) - 1.2e-3) <= 0.15e-3);
  }
  CHECK(error_code([&] { estimate_period_start(echo(cfg, 0, 0.05, 0.06), cfg); }) == "segment-too-short");
}

TEST_CASE("beat features") {
  const ChirpConfig cfg;
  const FmcwConfig fcfg;
  const double bin = kRate / fcfg.beat_window;
  NamedBeats beats;
  beats.emplace_back("a", dechirp(echo(cfg, 1.0e-3, 0.02, 3.0), cfg));
  beats.emplace_back("b", dechirp(echo(cfg, 1.5e-3, 0.02, 3.0), cfg));
  int calls = 0;
  const auto uf = beat_features(beats, fcfg, [&](const std::vector<dsp::Grid>& maps) {
    ++calls;
    CHECK(maps.size() == 2);
    return std::vector<float>(7, 1.0f);
  });
  CHECK(calls == 1);
  CHECK(uf.f_spec_u.size() == 7);
  REQUIRE(uf.f_stats.size() == 2 * 2 * 64);
  REQUIRE(uf.spectrograms.size() == 2);
  CHECK(uf.spectrograms[0].rows == 128);
  CHECK(uf.spectrograms[0].cols == 64);

  // Stationary delay: constant peak frequency; 0.5 ms apart -> 50 Hz apart.
  // 3 s holds 60 periods, centred in 64 frames.
  for (int f = 2; f < 62; ++f) {
    const float fa = uf.f_stats[f], fb = uf.f_stats[128 + f];
    CHECK(std::abs(fa - 100.0) <= bin);
    CHECK(std::abs((fb - fa) - beat_frequency(0.5e-3, cfg)) <= bin);
  }

  NamedBeats quiet;
  quiet.emplace_back("q", BeatSignal{std::vector<float>(48000, 0.0f), kRate, 0.0, 0.05});
  const auto uq = beat_features(quiet, fcfg);
  for (int f = 0; f < 64; ++f) CHECK(uq.f_stats[64 + f] < 1e-9f);
  CHECK(uq.f_spec_u.empty());
  CHECK(error_code([&] { beat_features({}, fcfg); }) == "no-beat-channel");
}

TEST_CASE("beat frequency and delay inversion round-trip") {
  const ChirpConfig cfg;
  CHECK(beat_frequency(1e-3, cfg) == doctest::Approx(100.0));
  for (double t0 : {0.1e-3, 1e-3, 3e-3}) CHECK(delay_from_beat(beat_frequency(t0, cfg), cfg) == doctest::Approx(t0));
}
