#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "vahf/common/error.hpp"
#include "vahf/common/rng.hpp"
#include "vahf/dsp/dtw.hpp"
#include "vahf/dsp/fft.hpp"
#include "vahf/dsp/iir.hpp"
#include "vahf/dsp/resample.hpp"
#include "vahf/dsp/spectral.hpp"

using namespace vahf;
using namespace vahf::dsp;

namespace {

AudioSegment tone(double hz, double rate, std::size_t n, double amp = 1.0) {
  AudioSegment s;
  s.sample_rate = rate;
  s.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.samples[i] = static_cast<float>(amp * std::sin(2 * std::numbers::pi * hz * i / rate));
  return s;
}

AudioSegment noise(std::uint64_t seed, double rate, std::size_t n, double sd = 0.1) {
  Rng rng(seed);
  AudioSegment s;
  s.sample_rate = rate;
  s.samples.resize(n);
  for (auto& v : s.samples) v = static_cast<float>(rng.normal(0.0, sd));
  return s;
}

std::vector<double> as_double(const AudioSegment& s) { return {s.samples.begin(), s.samples.end()}; }

std::string error_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return {};
}

}  // namespace

TEST_CASE("fft agrees with naive dft") {
  Rng rng(1);
  std::vector<double> x(64);
  for (auto& v : x) v = rng.normal();
  const auto mag = rfft_magnitude(x, 64);
  for (std::size_t k = 0; k < mag.size(); ++k) CHECK(mag[k] == doctest::Approx(oracle::dft_bin_magnitude(x, k)).epsilon(1e-9));
}

TEST_CASE("stft: 1 kHz tone lands in the 1 kHz bin") {
  const auto s = tone(1000.0, 16000.0, 4096);
  // Oracle: the whole-signal DFT peak sits at 1 kHz.
  const auto x = as_double(s);
  const auto power = oracle::dft_power(x);
  const auto peak = std::max_element(power.begin(), power.end()) - power.begin();
  CHECK(peak * 16000.0 / x.size() == doctest::Approx(1000.0));

  const auto spec = stft(s, 512, 256);
  CHECK(spec.frames() == (4096 - 512) / 256 + 1);
  const int bin = static_cast<int>(std::lround(1000.0 / spec.bin_hz));
  for (int f = 0; f < spec.frames(); ++f) {
    float best = 0;
    int arg = -1;
    float above2k = 0;
    for (int k = 0; k < spec.bins(); ++k) {
      const float m = spec.magnitudes.at(k, f);
      if (m > best) best = m, arg = k;
      if (k * spec.bin_hz > 2000.0) above2k = std::max(above2k, m);
    }
    CHECK(arg == bin);
    CHECK(best >= 10.0f * above2k);
  }
}

TEST_CASE("stft edge cases") {
  AudioSegment zero{std::vector<float>(2048, 0.0f), 16000.0};
  const auto spec = stft(zero, 512, 256);
  CHECK(std::all_of(spec.magnitudes.data.begin(), spec.magnitudes.data.end(), [](float v) { return v == 0.0f; }));

  AudioSegment one{std::vector<float>(512, 0.5f), 16000.0};
  CHECK(stft(one, 512, 256).frames() == 1);

  AudioSegment short_seg{std::vector<float>(100, 0.0f), 16000.0};
  CHECK(error_code([&] { stft(short_seg, 512, 256); }) == "segment-too-short");
}

TEST_CASE("mel map has fixed shape and zero padding") {
  DspConfig cfg;
  for (double secs : {0.5, 1.0, 3.0, 6.0}) {
    const auto s = noise(2, 16000.0, static_cast<std::size_t>(secs * 16000));
    const MelMap m = mel_spectrogram(s, cfg);
    CHECK(m.values.rows == 128);
    CHECK(m.values.cols == 250);
    const int frames = static_cast<int>((s.size() - 512) / 192) + 1;
    CHECK(m.real_frames == std::min(frames, 250));
    if (frames < 250) {
      for (int b = 0; b < 128; ++b) CHECK(m.values.at(b, 249) == 0.0f);
    }
  }
  CHECK(error_code([] { mel_spectrogram(AudioSegment{{}, 16000.0}); }) == "empty-segment");
}

TEST_CASE("mel map of silence is the log floor") {
  AudioSegment silence{std::vector<float>(16000 * 4, 0.0f), 16000.0};
  const MelMap m = mel_spectrogram(silence);
  const float floor = static_cast<float>(std::log(1e-10));
  CHECK(m.real_frames == 250);
  for (float v : m.values.data) CHECK(v == floor);
}

TEST_CASE("mel map of a 1 kHz tone peaks at the band bracketing 1 kHz") {
  const auto s = tone(1000.0, 16000.0, 32000, 0.5);
  const MelMap m = mel_spectrogram(s);
  // Oracle from the HTK formula: band edges are uniform on the mel axis.
  const double top = 2595.0 * std::log10(1.0 + 8000.0 / 700.0);
  auto edge_hz = [&](int i) { return 700.0 * (std::pow(10.0, top * i / 129.0 / 2595.0) - 1.0); };
  int expected = -1;
  double best_dist = 1e9;
  for (int b = 0; b < 128; ++b) {
    if (edge_hz(b) < 1000.0 && 1000.0 < edge_hz(b + 2) && std::abs(edge_hz(b + 1) - 1000.0) < best_dist) {
      best_dist = std::abs(edge_hz(b + 1) - 1000.0);
      expected = b;
    }
  }
  REQUIRE(expected >= 0);
  for (int f = 0; f < m.real_frames; f += 17) {
    int arg = 0;
    for (int b = 1; b < 128; ++b) {
      if (m.values.at(b, f) > m.values.at(arg, f)) arg = b;
    }
    // The tone sits between two bin centres of a 31.25 Hz grid; the winning
    // band is the bracketing one or its immediate neighbour.
    CHECK(std::abs(arg - expected) <= 1);
  }
}

TEST_CASE("mfcc") {
  SUBCASE("silence: c0 constant, others zero") {
    AudioSegment silence{std::vector<float>(16000, 0.0f), 16000.0};
    const auto m = mfcc(silence, 13);
    CHECK(m.n_coeffs() == 13);
    for (int f = 0; f < m.frames(); ++f) {
      CHECK(m.coeffs.at(0, f) == doctest::Approx(m.coeffs.at(0, 0)));
      for (int c = 1; c < 13; ++c) CHECK(std::abs(m.coeffs.at(c, f)) < 1e-3);
    }
  }
  SUBCASE("deterministic") {
    const auto s = noise(9, 16000.0, 16000);
    CHECK(mfcc(s, 13) == mfcc(s, 13));
  }
  SUBCASE("too many coefficients") {
    const auto s = noise(9, 16000.0, 16000);
    CHECK(error_code([&] { mfcc(s, 129); }) == "invalid-argument");
  }
  SUBCASE("matches a direct DCT of the log-mel rows") {
    for (const auto& s : {noise(4, 16000.0, 16000, 0.2), tone(1000.0, 16000.0, 16000, 0.5)}) {
      const Grid lm = log_mel_energies(s);
      const auto m = mfcc(s, 13);
      for (int f = 0; f < lm.cols; f += 7) {
        for (int c = 0; c < 13; ++c) {
          double acc = 0;
          for (int b = 0; b < 128; ++b) acc += lm.at(b, f) * std::cos(std::numbers::pi * c * (b + 0.5) / 128);
          acc *= c == 0 ? std::sqrt(1.0 / 128) : std::sqrt(2.0 / 128);
          CHECK(m.coeffs.at(c, f) == doctest::Approx(acc).epsilon(1e-4).scale(10));
        }
      }
    }
    // Noise is spectrally flat-ish, the tone concentrates energy low on the
    // mel axis: c1 (low-minus-high tilt) separates them in sign.
    const auto mn = mfcc(noise(4, 16000.0, 16000, 0.2), 13);
    const auto mt = mfcc(tone(1000.0, 16000.0, 16000, 0.5), 13);
    CHECK(mn.coeffs.at(1, 5) < 0.0f);
    CHECK(mt.coeffs.at(1, 5) > 0.0f);
  }
}

TEST_CASE("dtw matches brute-force enumeration exactly") {
  auto abs_cost = [](const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc;
  };
  CHECK(dtw_distance({{0.0}}, {{1.0}}, Metric::Manhattan) == 1.0);
  CHECK(dtw_distance({{1.0}, {2.0}, {3.0}}, {{1.0}, {3.0}}, Metric::Manhattan) == 1.0);
  CHECK(oracle::dtw_bruteforce({{1.0}, {2.0}, {3.0}}, {{1.0}, {3.0}}, abs_cost) == 1.0);

  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(7), m = 1 + rng.uniform_int(7), d = 1 + rng.uniform_int(3);
    VectorSequence a(n, std::vector<double>(d)), b(m, std::vector<double>(d));
    for (auto& v : a) for (auto& x : v) x = rng.normal();
    for (auto& v : b) for (auto& x : v) x = rng.normal();
    CHECK(dtw_distance(a, b, Metric::Manhattan) == oracle::dtw_bruteforce(a, b, abs_cost));
    CHECK(dtw_distance(a, b) == dtw_distance(b, a));
    CHECK(dtw_distance(a, a) == 0.0);
  }
}

TEST_CASE("dtw errors") {
  CHECK(error_code([] { dtw_distance({{1.0, 2.0}}, {{1.0}}); }) == "dimension-mismatch");
  CHECK(error_code([] { dtw_distance({}, {{1.0}}); }) == "empty-sequence");
}

TEST_CASE("butterworth highpass: -3 dB at cutoff") {
  for (int order : {1, 2, 5, 8}) {
    const Sos sos = butterworth(FilterKind::Highpass, order, 17500.0, 48000.0);
    const double db = 20 * std::log10(magnitude_response(sos, 17500.0, 48000.0) / magnitude_response(sos, 23999.0, 48000.0));
    CHECK(std::abs(db + 3.0103) < 0.1);
  }
  // Steady-state tone measurement, independent of the analytic response.
  const auto s = tone(17500.0, 48000.0, 48000);
  const auto y = butterworth_highpass(s, 17500.0, 8);
  const double ratio = oracle::rms(as_double(y), 24000) / oracle::rms(as_double(s), 24000);
  CHECK(std::abs(20 * std::log10(ratio) + 3.0103) < 0.1);
}

TEST_CASE("butterworth highpass rejects DC and low band") {
  AudioSegment dc{std::vector<float>(48000, 0.7f), 48000.0};
  const auto y = butterworth_highpass(dc, 17500.0, 8);
  CHECK(oracle::rms(as_double(y), 4800) < 1e-6);

  const auto n = noise(5, 48000.0, 1 << 16, 0.3);
  const auto hp = butterworth_highpass(n, 17500.0, 8);
  const double in_low = oracle::band_energy(as_double(n), 48000.0, 0.0, 8000.0);
  const double out_low = oracle::band_energy(as_double(hp), 48000.0, 0.0, 8000.0);
  CHECK(10 * std::log10(in_low / out_low) >= 40.0);
}

TEST_CASE("butterworth is linear") {
  const auto n = noise(6, 48000.0, 4800, 0.1);
  auto scaled = n;
  for (auto& v : scaled.samples) v *= 4.0f;
  const Sos sos = butterworth(FilterKind::Highpass, 8, 17500.0, 48000.0);
  const auto y1 = sosfilt(sos, as_double(n));
  const auto y2 = sosfilt(sos, as_double(scaled));
  for (std::size_t i = 0; i < y1.size(); ++i) CHECK(std::abs(y2[i] - 4.0 * y1[i]) <= 1e-9 * (std::abs(4.0 * y1[i]) + 1e-12));
}

TEST_CASE("butterworth argument errors") {
  const auto n = noise(6, 48000.0, 100);
  CHECK(error_code([&] { butterworth_highpass(n, 24000.0, 8); }) == "cutoff-out-of-range");
  CHECK(error_code([&] { butterworth_highpass(n, 30000.0, 8); }) == "cutoff-out-of-range");
  CHECK(error_code([&] { butterworth_highpass(n, 1000.0, 0); }) == "invalid-argument");
}

TEST_CASE("amplitude series") {
  AudioSegment flat{std::vector<float>(50000, 0.25f), 16000.0};
  auto a = amplitude_series(flat);
  CHECK(a.size() == 250);
  for (float v : a) CHECK(v == doctest::Approx(0.25f));

  AudioSegment three{std::vector<float>(48000, -0.5f), 16000.0};
  a = amplitude_series(three);
  CHECK(a.size() == 250);
  for (int i = 0; i < 240; ++i) CHECK(a[i] == doctest::Approx(0.5f));
  for (int i = 240; i < 250; ++i) CHECK(a[i] == 0.0f);

  AudioSegment empty{{}, 16000.0};
  a = amplitude_series(empty);
  CHECK(std::all_of(a.begin(), a.end(), [](float v) { return v == 0.0f; }));

  for (std::size_t n : {0u, 10u, 199u, 200u, 60000u, 100000u}) CHECK(amplitude_series(AudioSegment{std::vector<float>(n, 0.1f), 16000.0}).size() == 250);
}

TEST_CASE("resample_mfcc window arithmetic") {
  auto series = [](int frames) {
    MfccSeries m;
    m.coeffs = Grid(13, frames);
    for (int f = 0; f < frames; ++f)
      for (int c = 0; c < 13; ++c) m.coeffs.at(c, f) = static_cast<float>(f);
    return m;
  };
  auto segs = resample_mfcc(series(40));
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].coeffs.at(0, 0) == 0.0f);
  CHECK(segs[1].coeffs.at(0, 0) == 10.0f);
  CHECK(segs[2].coeffs.at(0, 19) == 39.0f);
  CHECK(resample_mfcc(series(20)).size() == 1);
  // Enumerated window starts for 25 frames: {0} only (start 10 would need frame 29).
  CHECK(resample_mfcc(series(25)).size() == 1);
  segs = resample_mfcc(series(7));
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].frames() == 20);
  CHECK(segs[0].coeffs.at(0, 6) == 6.0f);
  CHECK(segs[0].coeffs.at(0, 7) == 0.0f);
}

TEST_CASE("resample 48k -> 16k keeps in-band tones and removes out-of-band ones") {
  const auto s = tone(1000.0, 48000.0, 48000, 0.5);
  const auto r = resample(s, 16000.0);
  CHECK(r.size() == 16000);
  CHECK(r.sample_rate == 16000.0);
  const auto ref = tone(1000.0, 16000.0, 16000, 0.5);
  for (std::size_t i = 200; i < 15800; i += 97) CHECK(r.samples[i] == doctest::Approx(ref.samples[i]).epsilon(0.01).scale(1.0));

  const auto hi = tone(12000.0, 48000.0, 48000, 0.5);
  const auto rh = resample(hi, 16000.0);
  CHECK(oracle::rms({rh.samples.begin() + 200, rh.samples.end() - 200}) < 1e-3);

  const auto up = resample(ref, 48000.0);
  CHECK(up.size() == 48000);
  for (std::size_t i = 600; i < 47000; i += 101) CHECK(up.samples[i] == doctest::Approx(s.samples[i]).epsilon(0.01).scale(1.0));
}
