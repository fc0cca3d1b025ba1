#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vahf::dsp {

/// Mono audio, amplitude nominally in [-1, 1].
struct AudioSegment {
  std::vector<float> samples;
  double sample_rate = 0.0;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double duration() const noexcept {
    return sample_rate > 0.0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
  /// Throws Error("invalid-segment") if the rate is non-positive or a sample is not finite.
  void validate() const;
};

/// Dense row-major 2-D array of floats.
struct Grid {
  int rows = 0;
  int cols = 0;
  std::vector<float> data;

  Grid() = default;
  Grid(int r, int c, float fill = 0.0f)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

  float& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  float at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  std::span<float> row(int r) { return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }
  std::span<const float> row(int r) const {
    return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }
  bool operator==(const Grid&) const = default;
};

/// Linear STFT magnitudes laid out [freq_bins x time_frames].
struct Spectrogram {
  Grid magnitudes;
  double bin_hz = 0.0;
  double frame_s = 0.0;

  int bins() const noexcept { return magnitudes.rows; }
  int frames() const noexcept { return magnitudes.cols; }
};

/// Log mel energies [bands x frames], padded or truncated along time.
struct MelMap {
  Grid values;
  int real_frames = 0;  ///< frames carrying signal before zero padding
};

/// Cepstral coefficients [n_coeffs x frames].
struct MfccSeries {
  Grid coeffs;

  int n_coeffs() const noexcept { return coeffs.rows; }
  int frames() const noexcept { return coeffs.cols; }
  bool operator==(const MfccSeries&) const = default;
};

}  // namespace vahf::dsp
