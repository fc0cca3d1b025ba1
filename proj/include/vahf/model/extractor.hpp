#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vahf/common/config.hpp"
#include "vahf/dsp/types.hpp"
#include "vahf/model/layers.hpp"

namespace vahf::model {

struct ExtractorSpec {
  int rows = 0;  // input map height (bands, stacked)
  int cols = 0;  // input map width (frames)
  int stem_h = 4;
  int stem_w = 5;
  std::vector<int> widths{8, 16, 32, 32};
  int embedding = 256;
};

/// Compact CNN standing in for a pretrained image backbone:
/// AvgPool(stem) -> [Conv3x3 -> BN -> ReLU -> MaxPool2x2] per width ->
/// mean over time -> Linear(embedding). It is trained only by the
/// autoencoding warm start and then frozen.
class Extractor {
 public:
  Extractor(ExtractorSpec spec, std::uint64_t seed);

  /// Input scaling and BN running statistics from the given maps.
  void calibrate(const std::vector<const dsp::Grid*>& maps);
  /// Autoencoding warm start: a linear decoder reconstructs the stem-pooled
  /// input from the embedding (MSE). Recalibrates afterwards. Returns the
  /// last epoch's mean loss.
  double pretrain(const std::vector<const dsp::Grid*>& maps, const TrainConfig& cfg, std::uint64_t seed);

  /// Eval-mode embeddings. Throws Error("shape-mismatch") for a map of the
  /// wrong size.
  std::vector<std::vector<float>> embed(const std::vector<const dsp::Grid*>& maps);
  std::vector<float> embed(const dsp::Grid& map);

  const ExtractorSpec& spec() const { return spec_; }
  int stem_rows() const { return spec_.rows / spec_.stem_h; }
  int stem_cols() const { return spec_.cols / spec_.stem_w; }
  /// Weights, BN statistics and the input scaling, for checkpoints.
  std::vector<std::pair<std::string, std::vector<float>*>> named_tensors();

 private:
  Tensor<float> batch_of(const std::vector<const dsp::Grid*>& maps, std::size_t begin, std::size_t end) const;

  ExtractorSpec spec_;
  Sequential<float> net_;
  std::vector<float> scaling_{0.0f, 1.0f};  // mean, 1/sd
};

}  // namespace vahf::model
