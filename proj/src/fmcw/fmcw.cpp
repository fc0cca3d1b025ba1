#include "vahf/fmcw/fmcw.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>

#include "vahf/common/error.hpp"
#include "vahf/dsp/fft.hpp"
#include "vahf/dsp/iir.hpp"
#include "vahf/dsp/spectral.hpp"
#include "vahf/simd/kernels.hpp"

namespace vahf::fmcw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLogFloor = 1e-10;

double chirp_phase(const ChirpConfig& cfg, double t) {
  const double u = t - std::floor(t / cfg.period_s) * cfg.period_s;
  return kTwoPi * cfg.f0 * u + std::numbers::pi * cfg.slope() * u * u;
}

std::size_t period_samples(const ChirpConfig& cfg, double rate) {
  return static_cast<std::size_t>(std::lround(cfg.period_s * rate));
}

// Log-magnitude parabola through three bins; returns the fractional offset in [-0.5, 0.5].
double parabolic_offset(double left, double mid, double right) {
  const double l = std::log(left + 1e-300), m = std::log(mid + 1e-300), r = std::log(right + 1e-300);
  const double denom = l - 2 * m + r;
  if (denom >= 0) return 0.0;
  return std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
}

}  // namespace

void ChirpConfig::validate() const {
  require(f0 > 0 && f1 > f0 && period_s > 0 && std::isfinite(amplitude), "invalid-chirp",
          "need f1 > f0 > 0 and period > 0");
}

ChirpConfig ChirpConfig::from(const FmcwConfig& cfg) { return {cfg.f0, cfg.f1, cfg.period_s, cfg.amplitude}; }

double chirp_value(const ChirpConfig& cfg, double t) { return cfg.amplitude * std::cos(chirp_phase(cfg, t)); }

dsp::AudioSegment generate_chirp(const ChirpConfig& cfg, double duration_s, double rate) {
  cfg.validate();
  require(rate >= 2.0 * cfg.f1, "undersampled-chirp", "rate below 2*f1");
  require(duration_s >= 0, "invalid-argument", "negative duration");
  dsp::AudioSegment out;
  out.sample_rate = rate;
  out.samples.resize(static_cast<std::size_t>(std::llround(duration_s * rate)));
  for (std::size_t n = 0; n < out.samples.size(); ++n) out.samples[n] = static_cast<float>(chirp_value(cfg, n / rate));
  return out;
}

namespace {

// Analytic signal of x (negative frequencies removed) via one zero-padded FFT.
std::vector<std::complex<double>> analytic(std::span<const float> x) {
  // A short guard keeps the circular wrap of the Hilbert kernel away from the ends.
  const std::size_t n = dsp::next_pow2(std::max<std::size_t>(x.size() + 4096, 2));
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = x[i];
  dsp::fft_inplace(buf);
  for (std::size_t k = 1; k < n / 2; ++k) buf[k] *= 2.0;
  for (std::size_t k = n / 2 + 1; k < n; ++k) buf[k] = 0.0;
  dsp::fft_inplace(buf, true);
  buf.resize(x.size());
  return buf;
}

// z_r(t) * exp(-j phi0(t - offset)): the difference-frequency term of the mix, complex.
std::vector<std::complex<double>> complex_beat(const dsp::AudioSegment& received, const ChirpConfig& cfg,
                                               double period_offset_s) {
  auto z = analytic(received.samples);
  const double rate = received.sample_rate;
  for (std::size_t n = 0; n < z.size(); ++n) {
    const double ph = chirp_phase(cfg, n / rate - period_offset_s);
    const double c = std::cos(ph), s = -std::sin(ph);
    z[n] = {z[n].real() * c - z[n].imag() * s, z[n].real() * s + z[n].imag() * c};
  }
  return z;
}

}  // namespace

BeatSignal dechirp(const dsp::AudioSegment& received, const ChirpConfig& cfg, const FmcwConfig& fcfg,
                   double period_offset_s, double rate) {
  cfg.validate();
  require(received.sample_rate == rate, "rate-mismatch", "received rate differs from reference rate");
  const auto z = complex_beat(received, cfg, period_offset_s);
  std::vector<double> mixed(z.size());
  for (std::size_t n = 0; n < z.size(); ++n) mixed[n] = 0.5 * cfg.amplitude * z[n].real();
  const auto sos = dsp::butterworth(dsp::FilterKind::Lowpass, fcfg.lpf_order, fcfg.lpf_cutoff_hz, rate);
  const auto y = dsp::sosfilt(sos, mixed);
  return {{y.begin(), y.end()}, rate, period_offset_s, cfg.period_s};
}

double beat_frequency(double delay_s, const ChirpConfig& cfg) { return cfg.slope() * delay_s; }

double delay_from_beat(double beat_hz, const ChirpConfig& cfg) { return beat_hz / cfg.slope(); }

double estimate_period_start(const dsp::AudioSegment& received, const ChirpConfig& cfg) {
  cfg.validate();
  const std::size_t p = period_samples(cfg, received.sample_rate);
  require(p > 0 && received.size() >= 2 * p, "segment-too-short", "need two chirp periods");
  // Quadrature references: the envelope of the correlation has no carrier-cycle ambiguity.
  std::vector<float> ref_c(p), ref_s(p);
  for (std::size_t n = 0; n < p; ++n) {
    const double ph = chirp_phase(cfg, n / received.sample_rate);
    ref_c[n] = static_cast<float>(std::cos(ph));
    ref_s[n] = static_cast<float>(std::sin(ph));
  }
  // A few periods average out noise; more only cost time.
  const std::size_t reps = std::min<std::size_t>(received.size() / p - 1, 4);
  std::vector<double> env(p);
  for (std::size_t lag = 0; lag < p; ++lag) {
    double c = 0, s = 0;
    for (std::size_t k = 0; k < reps; ++k) {
      std::span<const float> r{received.samples.data() + k * p + lag, p};
      c += simd::dot<float>(r, ref_c);
      s += simd::dot<float>(r, ref_s);
    }
    env[lag] = std::hypot(c, s);
  }
  const auto best = static_cast<std::size_t>(std::max_element(env.begin(), env.end()) - env.begin());
  const double off = parabolic_offset(env[(best + p - 1) % p], env[best], env[(best + 1) % p]);
  const double lag = std::fmod(best + off + p, static_cast<double>(p));
  return lag / received.sample_rate;
}

double estimate_delay(const dsp::AudioSegment& received, const ChirpConfig& cfg, const FmcwConfig& fcfg,
                      double period_offset_s) {
  cfg.validate();
  const double rate = received.sample_rate;
  const std::size_t p = period_samples(cfg, rate);
  const auto start0 = static_cast<std::size_t>(std::lround(period_offset_s * rate)) % p;
  require(received.size() >= start0 + p, "segment-too-short", "need one full chirp period");

  // The complex beat is one-sided: no mirror image biasing low beat frequencies.
  const auto z = complex_beat(received, cfg, period_offset_s);

  // Skip the wrap-around region at each period start (delays up to the guard).
  const auto guard = static_cast<std::size_t>(0.15 * p);
  const std::size_t len = p - guard;
  const std::size_t nfft = dsp::next_pow2(8 * len);
  const auto win = dsp::hann_window(len);
  const double bin_hz = rate / nfft;
  const auto max_bin = static_cast<std::ptrdiff_t>(fcfg.beat_peak_max_hz / bin_hz);

  std::vector<double> estimates;
  std::vector<std::complex<double>> buf(nfft);
  for (std::size_t s = start0; s + p <= received.size(); s += p) {
    std::fill(buf.begin(), buf.end(), std::complex<double>{});
    for (std::size_t i = 0; i < len; ++i) buf[i] = z[s + guard + i] * win[i];
    dsp::fft_inplace(buf);
    auto mag = [&](std::ptrdiff_t k) { return std::abs(buf[static_cast<std::size_t>((k + static_cast<std::ptrdiff_t>(nfft)) % static_cast<std::ptrdiff_t>(nfft))]); };
    std::ptrdiff_t arg = 0;
    double best = -1;
    for (std::ptrdiff_t k = -max_bin; k <= max_bin; ++k) {
      const double m = mag(k);
      if (m > best) best = m, arg = k;
    }
    const double k_hat = arg + parabolic_offset(mag(arg - 1), best, mag(arg + 1));
    // The beat sits at -slope * t0 in this convention.
    estimates.push_back(-k_hat * bin_hz / cfg.slope());
  }
  std::nth_element(estimates.begin(), estimates.begin() + estimates.size() / 2, estimates.end());
  return estimates[estimates.size() / 2];
}

BeatTrack beat_track(const BeatSignal& beat, const FmcwConfig& fcfg) {
  require(beat.sample_rate > 0 && beat.period_s > 0, "invalid-argument", "beat signal without period information");
  const auto win_len = static_cast<std::size_t>(fcfg.beat_window);
  const std::size_t p = std::max(win_len, static_cast<std::size_t>(std::lround(beat.period_s * beat.sample_rate)));
  const auto offset = static_cast<std::size_t>(std::lround(beat.period_offset_s * beat.sample_rate)) % p;
  const std::size_t guard = p - win_len;

  std::vector<std::size_t> starts;
  for (std::size_t s = offset + guard; s + win_len <= beat.samples.size(); s += p) starts.push_back(s);

  BeatTrack out;
  out.log_spec = dsp::Grid(fcfg.beat_bins, fcfg.beat_frames, 0.0f);
  out.peak_hz.assign(fcfg.beat_frames, 0.0f);
  out.peak_amp.assign(fcfg.beat_frames, 0.0f);

  const int frames = static_cast<int>(starts.size());
  const int used = std::min(frames, fcfg.beat_frames);
  const int src0 = (frames - used) / 2;
  const int dst0 = (fcfg.beat_frames - used) / 2;
  const std::size_t nfft = dsp::next_pow2(win_len);
  const double bin_hz = beat.sample_rate / nfft;
  const int n_bins = static_cast<int>(nfft / 2 + 1);
  const int bins = std::min(fcfg.beat_bins, n_bins);
  const int peak_bins = std::clamp(static_cast<int>(fcfg.beat_peak_max_hz / bin_hz) + 1, 1, n_bins);
  // Hann coherent gain: a cosine of amplitude a peaks at a * window / 4.
  const double amp_scale = 4.0 / static_cast<double>(win_len);
  const auto win = dsp::hann_window(win_len);

  std::vector<double> frame(win_len);
  for (int j = 0; j < used; ++j) {
    const std::size_t s = starts[src0 + j];
    const int d = dst0 + j;
    for (std::size_t i = 0; i < win_len; ++i) frame[i] = beat.samples[s + i] * win[i];
    const auto mag = dsp::rfft_magnitude(frame, nfft);
    for (int k = 0; k < bins; ++k) out.log_spec.at(k, d) = static_cast<float>(std::log(mag[k] + kLogFloor));
    int arg = 0;
    for (int k = 1; k < peak_bins; ++k)
      if (mag[k] > mag[arg]) arg = k;
    double off = 0;
    if (arg > 0 && arg + 1 < n_bins) off = parabolic_offset(mag[arg - 1], mag[arg], mag[arg + 1]);
    out.peak_hz[d] = static_cast<float>((arg + off) * bin_hz);
    out.peak_amp[d] = static_cast<float>(mag[arg] * amp_scale);
  }
  return out;
}

UltraFeatures beat_features(const NamedBeats& beats, const FmcwConfig& fcfg, const Embedder& embed) {
  require(!beats.empty(), "no-beat-channel", "beat_features needs at least one channel");
  UltraFeatures out;
  for (const auto& [name, beat] : beats) {
    auto tr = beat_track(beat, fcfg);
    out.f_stats.insert(out.f_stats.end(), tr.peak_hz.begin(), tr.peak_hz.end());
    out.f_stats.insert(out.f_stats.end(), tr.peak_amp.begin(), tr.peak_amp.end());
    out.spectrograms.push_back(std::move(tr.log_spec));
  }
  if (embed) out.f_spec_u = embed(out.spectrograms);
  return out;
}

}  // namespace vahf::fmcw
