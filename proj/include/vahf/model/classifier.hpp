#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vahf/dsp/types.hpp"
#include "vahf/model/layers.hpp"

namespace vahf::model {

/// Feature-level fusion happens upstream (the parts are concatenated into one
/// input); logit-level fusion keeps one head per part.
enum class Fusion { Single, Logit };

struct ClassifierSpec {
  std::vector<int> input_dims;  // one per part; Single takes exactly one
  Fusion fusion = Fusion::Single;
  int hidden = 512;
  int classes = 9;
  double dropout = 0.5;
};

/// dropout(p) -> Linear(in, h) -> ReLU -> Linear(h, h) -> ReLU -> Linear(h, classes)
template <typename T>
Sequential<T> make_mlp(int in, int hidden, int classes, double dropout, std::uint64_t seed);

/// Logit fusion: z = sum_k a_k * head_k(x_k), a_k learnable, initialised to 1/K.
template <typename T>
class GestureClassifier {
 public:
  GestureClassifier(ClassifierSpec spec, std::uint64_t seed);

  /// parts[k] is [N, input_dims[k]].
  Tensor<T> forward(const std::vector<Tensor<T>>& parts, bool train);
  void backward(const Tensor<T>& dlogits);
  std::vector<Param<T>*> params();
  /// "head<k>.<layer>.<name>" plus "fusion" for logit fusion.
  std::vector<std::pair<std::string, std::vector<T>*>> named_tensors();
  const ClassifierSpec& spec() const { return spec_; }
  std::vector<T> fusion_weights() const { return fusion_.value; }
  Param<T>& fusion_param() { return fusion_; }
  void set_dropout(double p);

 private:
  ClassifierSpec spec_;
  std::vector<Sequential<T>> heads_;
  Param<T> fusion_;
  std::vector<Tensor<T>> head_logits_;
};

/// One row per sample; parts align with ClassifierSpec::input_dims.
struct FeatureTable {
  std::vector<dsp::Grid> parts;
  std::vector<int> labels;
  int rows() const { return static_cast<int>(labels.size()); }
  /// Throws Error("shape-mismatch") when part heights disagree with labels.
  void validate() const;
};

/// Rows `idx` of every part, as [idx.size(), dim] tensors.
std::vector<Tensor<float>> gather_rows(const FeatureTable& table, const std::vector<int>& idx);

}  // namespace vahf::model
