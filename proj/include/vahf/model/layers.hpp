#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "vahf/common/rng.hpp"

namespace vahf::model {

// Dense row-major tensor: [N, C] for vectors, [N, C, H, W] for maps.
template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s, T fill = T(0));
  std::size_t size() const noexcept { return data.size(); }
  int dim(std::size_t i) const { return shape.at(i); }
  int batch() const { return shape.at(0); }
  std::size_t per_sample() const { return shape.empty() || shape[0] == 0 ? 0 : data.size() / shape[0]; }
};

template <typename T>
struct Param {
  std::string name;
  std::vector<T> value;
  std::vector<T> grad;
  std::vector<T> velocity;

  Param() = default;
  Param(std::string n, std::size_t size) : name(std::move(n)), value(size, T(0)), grad(size, T(0)), velocity(size, T(0)) {}
};

/// Forward caches whatever backward needs, so a layer serves one batch at a
/// time. backward() accumulates into the parameter gradients and returns
/// dL/dx.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string kind() const = 0;
  virtual Tensor<T> forward(const Tensor<T>& x, bool train) = 0;
  virtual Tensor<T> backward(const Tensor<T>& dy) = 0;
  virtual std::vector<Param<T>*> params() { return {}; }
  // Non-trained state that still belongs in a checkpoint (running stats).
  virtual std::vector<std::pair<std::string, std::vector<T>*>> buffers() { return {}; }
};

template <typename T>
class Linear final : public Layer<T> {
 public:
  Linear(int in, int out, Rng& rng);
  std::string kind() const override { return "linear"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  std::vector<Param<T>*> params() override { return {&w_, &b_}; }
  int in() const { return in_; }
  int out() const { return out_; }
  // First layer of a network: dL/dx is never used, skip computing it.
  void set_propagate(bool on) { propagate_ = on; }

 private:
  int in_, out_;
  bool propagate_ = true;
  Param<T> w_, b_;  // w is [out, in]
  Tensor<T> x_;
};

template <typename T>
class ReLU final : public Layer<T> {
 public:
  std::string kind() const override { return "relu"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& dy) override;

 private:
  Tensor<T> y_;
};

/// Inverted dropout; identity in eval mode or with p = 0.
template <typename T>
class Dropout final : public Layer<T> {
 public:
  Dropout(double p, std::uint64_t seed) : p_(p), rng_(seed) {}
  std::string kind() const override { return "dropout"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  void reseed(std::uint64_t seed) { rng_ = Rng(seed); }
  double p() const { return p_; }
  void set_p(double p) { p_ = p; }

 private:
  double p_;
  Rng rng_;
  std::vector<T> mask_;
};

/// 3x3 convolution, stride 1, zero padding 1.
template <typename T>
class Conv2d final : public Layer<T> {
 public:
  Conv2d(int cin, int cout, Rng& rng);
  std::string kind() const override { return "conv2d"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  std::vector<Param<T>*> params() override { return {&w_, &b_}; }

 private:
  int cin_, cout_;
  Param<T> w_, b_;  // w is [cout, cin * 9]
  Tensor<T> x_;
};

/// Batch statistics in training, running statistics in eval.
template <typename T>
class BatchNorm2d final : public Layer<T> {
 public:
  explicit BatchNorm2d(int channels, double momentum = 0.1, double eps = 1e-5);
  std::string kind() const override { return "batchnorm2d"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  std::vector<Param<T>*> params() override { return {&gamma_, &beta_}; }
  std::vector<std::pair<std::string, std::vector<T>*>> buffers() override {
    return {{"running_mean", &running_mean_}, {"running_var", &running_var_}};
  }

 private:
  int c_;
  double momentum_, eps_;
  Param<T> gamma_, beta_;
  std::vector<T> running_mean_, running_var_;
  Tensor<T> xhat_;
  std::vector<T> inv_sd_;
  bool trained_batch_ = false;
};

/// Non-overlapping max pooling, trailing rows/columns dropped.
template <typename T>
class MaxPool2d final : public Layer<T> {
 public:
  MaxPool2d(int kh, int kw) : kh_(kh), kw_(kw) {}
  std::string kind() const override { return "maxpool2d"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& dy) override;

 private:
  int kh_, kw_;
  std::vector<int> in_shape_;
  std::vector<std::size_t> argmax_;
};

/// Non-overlapping average pooling, trailing rows/columns dropped.
template <typename T>
class AvgPool2d final : public Layer<T> {
 public:
  AvgPool2d(int kh, int kw) : kh_(kh), kw_(kw) {}
  std::string kind() const override { return "avgpool2d"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& dy) override;

 private:
  int kh_, kw_;
  std::vector<int> in_shape_;
};

/// [N, C, H, W] -> [N, C * H]: mean over the time (width) axis, then flatten.
template <typename T>
class WidthMean final : public Layer<T> {
 public:
  std::string kind() const override { return "widthmean"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& dy) override;

 private:
  std::vector<int> in_shape_;
};

template <typename T>
class Sequential {
 public:
  void add(std::unique_ptr<Layer<T>> layer) { layers_.push_back(std::move(layer)); }
  Tensor<T> forward(const Tensor<T>& x, bool train);
  Tensor<T> backward(const Tensor<T>& dy);
  std::vector<Param<T>*> params();
  /// "<layer index>.<name>" for parameters and buffers alike.
  std::vector<std::pair<std::string, std::vector<T>*>> named_tensors();
  std::size_t size() const { return layers_.size(); }
  Layer<T>& operator[](std::size_t i) { return *layers_[i]; }

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

/// Mean cross-entropy of softmax(logits) and its gradient w.r.t. logits.
template <typename T>
T softmax_cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels, Tensor<T>* dlogits);
/// Mean squared error over all entries and its gradient.
template <typename T>
T mse_loss(const Tensor<T>& pred, const std::vector<T>& target, Tensor<T>* dpred);

template <typename T>
void zero_grad(const std::vector<Param<T>*>& ps);
/// Momentum SGD: v = mu v + g, w -= lr v.
template <typename T>
void sgd_step(const std::vector<Param<T>*>& ps, double lr, double momentum);

}  // namespace vahf::model
