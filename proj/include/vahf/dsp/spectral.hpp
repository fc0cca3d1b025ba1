#pragma once

#include <vector>

#include "vahf/common/config.hpp"
#include "vahf/dsp/types.hpp"

namespace vahf::dsp {

/// Magnitude STFT with a periodic Hann window. The FFT size is the next power
/// of two >= window_len. Frame count is floor((len - window_len) / hop) + 1.
/// Throws Error("segment-too-short") when the segment is shorter than one window.
Spectrogram stft(const AudioSegment& seg, int window_len, int hop);

/// HTK mel scale: 2595 * log10(1 + f / 700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular filters [n_bands x (nfft/2 + 1)] spaced uniformly on the mel
/// scale between fmin and fmax, unit peak height.
Grid mel_filterbank(int n_bands, int nfft, double sample_rate, double fmin, double fmax);
/// Center frequency of mel band `band` for the filterbank above.
double mel_band_center_hz(int band, int n_bands, double fmin, double fmax);

/// Unpadded log mel energies [bands x frames]: log(E + log_floor) of the STFT
/// power through the mel filterbank. Segments shorter than one window are
/// zero-extended to one window.
Grid log_mel_energies(const AudioSegment& seg, const DspConfig& cfg = {});

/// Log mel map padded with zeros or truncated to cfg.mel_frames columns.
MelMap mel_spectrogram(const AudioSegment& seg, const DspConfig& cfg = {});

/// Orthonormal DCT-II of each log-mel frame, first n_coeffs kept.
MfccSeries mfcc(const AudioSegment& seg, int n_coeffs, const DspConfig& cfg = {});
MfccSeries mfcc_from_log_mel(const Grid& log_mel, int n_coeffs);

/// Per-window RMS, zero-padded or truncated to `length` entries.
std::vector<float> amplitude_series(const AudioSegment& seg, int window = 200, int stride = 200,
                                    int length = 250);

/// Overlapping `frame`-wide slices at `stride`; trailing frames that do not
/// fill a slice are dropped. A series shorter than `frame` yields one
/// zero-padded slice.
std::vector<MfccSeries> resample_mfcc(const MfccSeries& m, int frame = 20, int stride = 10);

}  // namespace vahf::dsp
