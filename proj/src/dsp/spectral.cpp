#include "vahf/dsp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "vahf/common/error.hpp"
#include "vahf/dsp/fft.hpp"
#include "vahf/simd/kernels.hpp"

namespace vahf::dsp {

void AudioSegment::validate() const {
  require(sample_rate > 0.0, "invalid-segment", "sample_rate must be positive");
  for (float s : samples) require(std::isfinite(s), "invalid-segment", "non-finite sample");
}

Spectrogram stft(const AudioSegment& seg, int window_len, int hop) {
  require(window_len > 0 && hop > 0 && window_len >= hop, "invalid-argument", "need window_len >= hop > 0");
  require(seg.samples.size() >= static_cast<std::size_t>(window_len), "segment-too-short",
          std::to_string(seg.samples.size()) + " < " + std::to_string(window_len));
  const std::size_t nfft = next_pow2(static_cast<std::size_t>(window_len));
  const int bins = static_cast<int>(nfft / 2 + 1);
  const int frames = static_cast<int>((seg.samples.size() - window_len) / hop) + 1;
  const auto window = hann_window(static_cast<std::size_t>(window_len));

  Spectrogram out;
  out.magnitudes = Grid(bins, frames);
  out.bin_hz = seg.sample_rate / static_cast<double>(nfft);
  out.frame_s = hop / seg.sample_rate;

  std::vector<std::complex<double>> buf(nfft);
  for (int f = 0; f < frames; ++f) {
    const float* src = seg.samples.data() + static_cast<std::size_t>(f) * hop;
    std::fill(buf.begin(), buf.end(), std::complex<double>{});
    for (int i = 0; i < window_len; ++i) buf[i] = window[i] * src[i];
    fft_inplace(buf);
    for (int k = 0; k < bins; ++k) out.magnitudes.at(k, f) = static_cast<float>(std::abs(buf[k]));
  }
  return out;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

double mel_band_center_hz(int band, int n_bands, double fmin, double fmax) {
  const double lo = hz_to_mel(fmin);
  const double hi = hz_to_mel(fmax);
  return mel_to_hz(lo + (hi - lo) * (band + 1) / (n_bands + 1));
}

Grid mel_filterbank(int n_bands, int nfft, double sample_rate, double fmin, double fmax) {
  require(n_bands > 0 && nfft > 0 && fmax > fmin, "invalid-argument", "bad filterbank spec");
  const int bins = nfft / 2 + 1;
  Grid fb(n_bands, bins);
  const double lo = hz_to_mel(fmin);
  const double hi = hz_to_mel(fmax);
  std::vector<double> edges(n_bands + 2);
  for (int i = 0; i < n_bands + 2; ++i) edges[i] = mel_to_hz(lo + (hi - lo) * i / (n_bands + 1));
  for (int b = 0; b < n_bands; ++b) {
    const double left = edges[b], center = edges[b + 1], right = edges[b + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = k * sample_rate / nfft;
      double w = 0.0;
      if (f > left && f <= center) {
        w = (f - left) / (center - left);
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      fb.at(b, k) = static_cast<float>(w);
    }
  }
  return fb;
}

Grid log_mel_energies(const AudioSegment& seg, const DspConfig& cfg) {
  require(!seg.empty(), "empty-segment", "mel spectrogram of an empty segment");
  AudioSegment padded;
  const AudioSegment* src = &seg;
  if (seg.size() < static_cast<std::size_t>(cfg.mel_window)) {
    padded = seg;
    padded.samples.resize(cfg.mel_window, 0.0f);
    src = &padded;
  }
  const Spectrogram spec = stft(*src, cfg.mel_window, cfg.mel_hop);
  const int nfft = static_cast<int>(next_pow2(cfg.mel_window));
  const Grid fb = mel_filterbank(cfg.mel_bands, nfft, seg.sample_rate, 0.0, seg.sample_rate / 2.0);

  // power^T [frames x bins] so each band energy is a gemm row.
  const int bins = spec.bins();
  const int frames = spec.frames();
  Grid power_t(frames, bins);
  for (int k = 0; k < bins; ++k) {
    for (int f = 0; f < frames; ++f) {
      const float m = spec.magnitudes.at(k, f);
      power_t.at(f, k) = m * m;
    }
  }
  Grid out(cfg.mel_bands, frames);
  simd::gemm<float>(simd::Trans::No, simd::Trans::Yes, cfg.mel_bands, frames, bins, 1.0f, fb.data.data(), bins,
                    power_t.data.data(), bins, 0.0f, out.data.data(), frames);
  const double floor = cfg.log_floor;
  for (float& v : out.data) v = static_cast<float>(std::log(std::max(0.0, static_cast<double>(v)) + floor));
  return out;
}

MelMap mel_spectrogram(const AudioSegment& seg, const DspConfig& cfg) {
  const Grid lm = log_mel_energies(seg, cfg);
  MelMap map;
  map.values = Grid(cfg.mel_bands, cfg.mel_frames, 0.0f);
  map.real_frames = std::min(lm.cols, cfg.mel_frames);
  for (int b = 0; b < cfg.mel_bands; ++b) {
    std::copy_n(lm.row(b).data(), map.real_frames, map.values.row(b).data());
  }
  return map;
}

MfccSeries mfcc_from_log_mel(const Grid& log_mel, int n_coeffs) {
  const int bands = log_mel.rows;
  require(n_coeffs >= 1 && n_coeffs <= bands, "invalid-argument",
          "n_coeffs must be in [1, " + std::to_string(bands) + "]");
  Grid dct(n_coeffs, bands);
  for (int c = 0; c < n_coeffs; ++c) {
    const double scale = c == 0 ? std::sqrt(1.0 / bands) : std::sqrt(2.0 / bands);
    for (int b = 0; b < bands; ++b) {
      dct.at(c, b) = static_cast<float>(scale * std::cos(std::numbers::pi * c * (b + 0.5) / bands));
    }
  }
  MfccSeries out;
  out.coeffs = Grid(n_coeffs, log_mel.cols);
  simd::gemm<float>(simd::Trans::No, simd::Trans::No, n_coeffs, log_mel.cols, bands, 1.0f, dct.data.data(), bands,
                    log_mel.data.data(), log_mel.cols, 0.0f, out.coeffs.data.data(), log_mel.cols);
  return out;
}

MfccSeries mfcc(const AudioSegment& seg, int n_coeffs, const DspConfig& cfg) {
  require(n_coeffs >= 1 && n_coeffs <= cfg.mel_bands, "invalid-argument",
          "n_coeffs must be in [1, " + std::to_string(cfg.mel_bands) + "]");
  return mfcc_from_log_mel(log_mel_energies(seg, cfg), n_coeffs);
}

std::vector<float> amplitude_series(const AudioSegment& seg, int window, int stride, int length) {
  require(window > 0 && stride > 0 && length > 0, "invalid-argument", "window/stride/length must be positive");
  std::vector<float> out(static_cast<std::size_t>(length), 0.0f);
  const std::size_t n = seg.samples.size();
  for (int w = 0; w < length; ++w) {
    const std::size_t start = static_cast<std::size_t>(w) * stride;
    if (start + window > n) break;
    double acc = 0.0;
    for (int i = 0; i < window; ++i) {
      const double s = seg.samples[start + i];
      acc += s * s;
    }
    out[w] = static_cast<float>(std::sqrt(acc / window));
  }
  return out;
}

std::vector<MfccSeries> resample_mfcc(const MfccSeries& m, int frame, int stride) {
  require(frame > 0 && stride > 0, "invalid-argument", "frame/stride must be positive");
  std::vector<MfccSeries> out;
  const int rows = m.n_coeffs();
  if (m.frames() < frame) {
    MfccSeries seg;
    seg.coeffs = Grid(rows, frame, 0.0f);
    for (int r = 0; r < rows; ++r) std::copy_n(m.coeffs.row(r).data(), m.frames(), seg.coeffs.row(r).data());
    out.push_back(std::move(seg));
    return out;
  }
  for (int start = 0; start + frame <= m.frames(); start += stride) {
    MfccSeries seg;
    seg.coeffs = Grid(rows, frame);
    for (int r = 0; r < rows; ++r) std::copy_n(m.coeffs.row(r).data() + start, frame, seg.coeffs.row(r).data());
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace vahf::dsp
