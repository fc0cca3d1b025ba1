#include "vahf/model/classifier.hpp"

#include <algorithm>

#include "vahf/common/error.hpp"

namespace vahf::model {

template <typename T>
Sequential<T> make_mlp(int in, int hidden, int classes, double dropout, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 1));
  Sequential<T> net;
  net.add(std::make_unique<Dropout<T>>(dropout, derive_seed(seed, 2)));
  auto first = std::make_unique<Linear<T>>(in, hidden, rng);
  first->set_propagate(false);
  net.add(std::move(first));
  net.add(std::make_unique<ReLU<T>>());
  net.add(std::make_unique<Linear<T>>(hidden, hidden, rng));
  net.add(std::make_unique<ReLU<T>>());
  net.add(std::make_unique<Linear<T>>(hidden, classes, rng));
  return net;
}

template <typename T>
GestureClassifier<T>::GestureClassifier(ClassifierSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  require(!spec_.input_dims.empty(), "invalid-classifier", "no inputs");
  require(spec_.fusion == Fusion::Logit || spec_.input_dims.size() == 1, "invalid-classifier",
          "single-head classifier takes one input");
  for (std::size_t k = 0; k < spec_.input_dims.size(); ++k)
    heads_.push_back(make_mlp<T>(spec_.input_dims[k], spec_.hidden, spec_.classes, spec_.dropout, derive_seed(seed, 10 + k)));
  if (spec_.fusion == Fusion::Logit) {
    fusion_ = Param<T>("fusion", heads_.size());
    std::fill(fusion_.value.begin(), fusion_.value.end(), static_cast<T>(1.0 / heads_.size()));
  }
}

template <typename T>
Tensor<T> GestureClassifier<T>::forward(const std::vector<Tensor<T>>& parts, bool train) {
  require(parts.size() == heads_.size(), "shape-mismatch", "classifier part count");
  if (spec_.fusion == Fusion::Single) return heads_[0].forward(parts[0], train);
  head_logits_.clear();
  Tensor<T> z;
  for (std::size_t k = 0; k < heads_.size(); ++k) {
    head_logits_.push_back(heads_[k].forward(parts[k], train));
    if (k == 0) z = Tensor<T>(head_logits_[0].shape);
    const T a = fusion_.value[k];
    for (std::size_t i = 0; i < z.size(); ++i) z.data[i] += a * head_logits_[k].data[i];
  }
  return z;
}

template <typename T>
void GestureClassifier<T>::backward(const Tensor<T>& dlogits) {
  if (spec_.fusion == Fusion::Single) {
    heads_[0].backward(dlogits);
    return;
  }
  for (std::size_t k = 0; k < heads_.size(); ++k) {
    T da = 0;
    Tensor<T> dl(dlogits.shape);
    for (std::size_t i = 0; i < dl.size(); ++i) {
      da += dlogits.data[i] * head_logits_[k].data[i];
      dl.data[i] = fusion_.value[k] * dlogits.data[i];
    }
    fusion_.grad[k] += da;
    heads_[k].backward(dl);
  }
}

template <typename T>
std::vector<Param<T>*> GestureClassifier<T>::params() {
  std::vector<Param<T>*> out;
  for (auto& h : heads_)
    for (auto* p : h.params()) out.push_back(p);
  if (spec_.fusion == Fusion::Logit) out.push_back(&fusion_);
  return out;
}

template <typename T>
std::vector<std::pair<std::string, std::vector<T>*>> GestureClassifier<T>::named_tensors() {
  std::vector<std::pair<std::string, std::vector<T>*>> out;
  for (std::size_t k = 0; k < heads_.size(); ++k)
    for (auto& [name, v] : heads_[k].named_tensors()) out.emplace_back("head" + std::to_string(k) + "." + name, v);
  if (spec_.fusion == Fusion::Logit) out.emplace_back("fusion", &fusion_.value);
  return out;
}

template <typename T>
void GestureClassifier<T>::set_dropout(double p) {
  spec_.dropout = p;
  for (auto& h : heads_) static_cast<Dropout<T>&>(h[0]).set_p(p);
}

void FeatureTable::validate() const {
  require(!parts.empty(), "shape-mismatch", "feature table has no parts");
  for (const auto& g : parts) require(g.rows == rows(), "shape-mismatch", "part rows differ from label count");
}

std::vector<Tensor<float>> gather_rows(const FeatureTable& table, const std::vector<int>& idx) {
  std::vector<Tensor<float>> out;
  for (const auto& g : table.parts) {
    Tensor<float> t({static_cast<int>(idx.size()), g.cols});
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const auto row = g.row(idx[r]);
      std::copy(row.begin(), row.end(), t.data.begin() + static_cast<std::ptrdiff_t>(r) * g.cols);
    }
    out.push_back(std::move(t));
  }
  return out;
}

template Sequential<float> make_mlp<float>(int, int, int, double, std::uint64_t);
template Sequential<double> make_mlp<double>(int, int, int, double, std::uint64_t);
template class GestureClassifier<float>;
template class GestureClassifier<double>;

}  // namespace vahf::model
