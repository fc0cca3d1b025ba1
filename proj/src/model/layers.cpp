#include "vahf/model/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vahf/common/error.hpp"
#include "vahf/simd/kernels.hpp"

namespace vahf::model {
namespace {

using simd::Trans;

std::size_t product(const std::vector<int>& s) {
  std::size_t n = 1;
  for (int d : s) n *= static_cast<std::size_t>(d);
  return n;
}

void require_rank(const std::vector<int>& shape, std::size_t rank, const char* layer) {
  require(shape.size() == rank, "shape-mismatch", std::string(layer) + ": unexpected tensor rank");
}

template <typename T>
void he_init(std::vector<T>& w, int fan_in, Rng& rng) {
  const double sd = std::sqrt(2.0 / fan_in);
  for (auto& v : w) v = static_cast<T>(rng.normal(0.0, sd));
}

// cols[(c*9 + ky*3 + kx), y*w + x] = img[c, y+ky-1, x+kx-1], zero outside.
template <typename T>
void im2col(const T* img, int c, int h, int w, T* cols) {
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  for (int ci = 0; ci < c; ++ci)
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx) {
        T* row = cols + (static_cast<std::size_t>(ci) * 9 + ky * 3 + kx) * hw;
        const T* src = img + static_cast<std::size_t>(ci) * hw;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          T* dst = row + static_cast<std::size_t>(y) * w;
          if (sy < 0 || sy >= h) {
            std::fill(dst, dst + w, T(0));
            continue;
          }
          const T* s = src + static_cast<std::size_t>(sy) * w;
          for (int x = 0; x < w; ++x) {
            const int sx = x + kx - 1;
            dst[x] = (sx < 0 || sx >= w) ? T(0) : s[sx];
          }
        }
      }
}

template <typename T>
void col2im_add(const T* cols, int c, int h, int w, T* img) {
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  for (int ci = 0; ci < c; ++ci)
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx) {
        const T* row = cols + (static_cast<std::size_t>(ci) * 9 + ky * 3 + kx) * hw;
        T* dst = img + static_cast<std::size_t>(ci) * hw;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          const T* s = row + static_cast<std::size_t>(y) * w;
          T* d = dst + static_cast<std::size_t>(sy) * w;
          for (int x = 0; x < w; ++x) {
            const int sx = x + kx - 1;
            if (sx >= 0 && sx < w) d[sx] += s[x];
          }
        }
      }
}

}  // namespace

template <typename T>
Tensor<T>::Tensor(std::vector<int> s, T fill) : shape(std::move(s)), data(product(shape), fill) {}

// ---- Linear

template <typename T>
Linear<T>::Linear(int in, int out, Rng& rng)
    : in_(in), out_(out), w_("weight", static_cast<std::size_t>(in) * out), b_("bias", static_cast<std::size_t>(out)) {
  require(in > 0 && out > 0, "invalid-layer", "linear sizes must be positive");
  he_init(w_.value, in, rng);
}

template <typename T>
Tensor<T> Linear<T>::forward(const Tensor<T>& x, bool) {
  require_rank(x.shape, 2, "linear");
  require(x.dim(1) == in_, "shape-mismatch", "linear: input width " + std::to_string(x.dim(1)) + " != " + std::to_string(in_));
  const int n = x.dim(0);
  x_ = x;
  Tensor<T> y({n, out_});
  for (int i = 0; i < n; ++i) std::copy(b_.value.begin(), b_.value.end(), y.data.begin() + static_cast<std::ptrdiff_t>(i) * out_);
  simd::gemm<T>(Trans::No, Trans::Yes, n, out_, in_, T(1), x.data.data(), in_, w_.value.data(), in_, T(1), y.data.data(), out_);
  return y;
}

template <typename T>
Tensor<T> Linear<T>::backward(const Tensor<T>& dy) {
  const int n = dy.dim(0);
  simd::gemm<T>(Trans::Yes, Trans::No, out_, in_, n, T(1), dy.data.data(), out_, x_.data.data(), in_, T(1), w_.grad.data(), in_);
  for (int i = 0; i < n; ++i)
    for (int o = 0; o < out_; ++o) b_.grad[o] += dy.data[static_cast<std::size_t>(i) * out_ + o];
  if (!propagate_) return {};
  Tensor<T> dx({n, in_});
  simd::gemm<T>(Trans::No, Trans::No, n, in_, out_, T(1), dy.data.data(), out_, w_.value.data(), in_, T(0), dx.data.data(), in_);
  return dx;
}

// ---- ReLU

template <typename T>
Tensor<T> ReLU<T>::forward(const Tensor<T>& x, bool) {
  y_ = x;
  for (auto& v : y_.data) v = v > T(0) ? v : T(0);
  return y_;
}

template <typename T>
Tensor<T> ReLU<T>::backward(const Tensor<T>& dy) {
  Tensor<T> dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (!(y_.data[i] > T(0))) dx.data[i] = T(0);
  return dx;
}

// ---- Dropout

template <typename T>
Tensor<T> Dropout<T>::forward(const Tensor<T>& x, bool train) {
  if (!train || p_ <= 0.0) {
    mask_.clear();
    return x;
  }
  const double keep = 1.0 - p_;
  mask_.resize(x.size());
  Tensor<T> y = x;
  for (std::size_t i = 0; i < y.size(); ++i) {
    mask_[i] = rng_.uniform() < keep ? static_cast<T>(1.0 / keep) : T(0);
    y.data[i] *= mask_[i];
  }
  return y;
}

template <typename T>
Tensor<T> Dropout<T>::backward(const Tensor<T>& dy) {
  if (mask_.empty()) return dy;
  Tensor<T> dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] *= mask_[i];
  return dx;
}

// ---- Conv2d

template <typename T>
Conv2d<T>::Conv2d(int cin, int cout, Rng& rng)
    : cin_(cin), cout_(cout), w_("weight", static_cast<std::size_t>(cout) * cin * 9), b_("bias", static_cast<std::size_t>(cout)) {
  require(cin > 0 && cout > 0, "invalid-layer", "conv channels must be positive");
  he_init(w_.value, cin * 9, rng);
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x, bool) {
  require_rank(x.shape, 4, "conv2d");
  require(x.dim(1) == cin_, "shape-mismatch", "conv2d: channel count");
  const int n = x.dim(0), h = x.dim(2), w = x.dim(3), k = cin_ * 9, hw = h * w;
  x_ = x;
  Tensor<T> y({n, cout_, h, w});
  std::vector<T> cols(static_cast<std::size_t>(k) * hw);
  for (int i = 0; i < n; ++i) {
    im2col(x.data.data() + static_cast<std::size_t>(i) * cin_ * hw, cin_, h, w, cols.data());
    T* out = y.data.data() + static_cast<std::size_t>(i) * cout_ * hw;
    for (int o = 0; o < cout_; ++o) std::fill(out + static_cast<std::size_t>(o) * hw, out + static_cast<std::size_t>(o + 1) * hw, b_.value[o]);
    simd::gemm<T>(Trans::No, Trans::No, cout_, hw, k, T(1), w_.value.data(), k, cols.data(), hw, T(1), out, hw);
  }
  return y;
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& dy) {
  const int n = x_.dim(0), h = x_.dim(2), w = x_.dim(3), k = cin_ * 9, hw = h * w;
  Tensor<T> dx(x_.shape);
  std::vector<T> cols(static_cast<std::size_t>(k) * hw), dcols(cols.size());
  for (int i = 0; i < n; ++i) {
    const T* g = dy.data.data() + static_cast<std::size_t>(i) * cout_ * hw;
    im2col(x_.data.data() + static_cast<std::size_t>(i) * cin_ * hw, cin_, h, w, cols.data());
    simd::gemm<T>(Trans::No, Trans::Yes, cout_, k, hw, T(1), g, hw, cols.data(), hw, T(1), w_.grad.data(), k);
    for (int o = 0; o < cout_; ++o) {
      T s = 0;
      for (int p = 0; p < hw; ++p) s += g[static_cast<std::size_t>(o) * hw + p];
      b_.grad[o] += s;
    }
    simd::gemm<T>(Trans::Yes, Trans::No, k, hw, cout_, T(1), w_.value.data(), k, g, hw, T(0), dcols.data(), hw);
    col2im_add(dcols.data(), cin_, h, w, dx.data.data() + static_cast<std::size_t>(i) * cin_ * hw);
  }
  return dx;
}

// ---- BatchNorm2d

template <typename T>
BatchNorm2d<T>::BatchNorm2d(int channels, double momentum, double eps)
    : c_(channels), momentum_(momentum), eps_(eps), gamma_("gamma", channels), beta_("beta", channels),
      running_mean_(channels, T(0)), running_var_(channels, T(1)) {
  std::fill(gamma_.value.begin(), gamma_.value.end(), T(1));
}

template <typename T>
Tensor<T> BatchNorm2d<T>::forward(const Tensor<T>& x, bool train) {
  require_rank(x.shape, 4, "batchnorm2d");
  require(x.dim(1) == c_, "shape-mismatch", "batchnorm2d: channel count");
  const int n = x.dim(0);
  const std::size_t hw = static_cast<std::size_t>(x.dim(2)) * x.dim(3);
  const double m = static_cast<double>(n) * hw;
  xhat_ = Tensor<T>(x.shape);
  inv_sd_.assign(c_, T(0));
  trained_batch_ = train;
  Tensor<T> y(x.shape);
  for (int c = 0; c < c_; ++c) {
    double mean, var;
    if (train) {
      double s = 0, s2 = 0;
      for (int i = 0; i < n; ++i) {
        const T* p = x.data.data() + (static_cast<std::size_t>(i) * c_ + c) * hw;
        for (std::size_t k = 0; k < hw; ++k) s += p[k];
      }
      mean = s / m;
      for (int i = 0; i < n; ++i) {
        const T* p = x.data.data() + (static_cast<std::size_t>(i) * c_ + c) * hw;
        for (std::size_t k = 0; k < hw; ++k) s2 += (p[k] - mean) * (p[k] - mean);
      }
      var = s2 / m;
      running_mean_[c] = static_cast<T>((1 - momentum_) * running_mean_[c] + momentum_ * mean);
      running_var_[c] = static_cast<T>((1 - momentum_) * running_var_[c] + momentum_ * var * m / std::max(1.0, m - 1));
    } else {
      mean = running_mean_[c];
      var = running_var_[c];
    }
    const double inv = 1.0 / std::sqrt(var + eps_);
    inv_sd_[c] = static_cast<T>(inv);
    for (int i = 0; i < n; ++i) {
      const std::size_t base = (static_cast<std::size_t>(i) * c_ + c) * hw;
      for (std::size_t k = 0; k < hw; ++k) {
        const T xh = static_cast<T>((x.data[base + k] - mean) * inv);
        xhat_.data[base + k] = xh;
        y.data[base + k] = gamma_.value[c] * xh + beta_.value[c];
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm2d<T>::backward(const Tensor<T>& dy) {
  const int n = dy.dim(0);
  const std::size_t hw = static_cast<std::size_t>(dy.dim(2)) * dy.dim(3);
  const double m = static_cast<double>(n) * hw;
  Tensor<T> dx(dy.shape);
  for (int c = 0; c < c_; ++c) {
    double sdy = 0, sdyx = 0;
    for (int i = 0; i < n; ++i) {
      const std::size_t base = (static_cast<std::size_t>(i) * c_ + c) * hw;
      for (std::size_t k = 0; k < hw; ++k) {
        sdy += dy.data[base + k];
        sdyx += dy.data[base + k] * xhat_.data[base + k];
      }
    }
    gamma_.grad[c] += static_cast<T>(sdyx);
    beta_.grad[c] += static_cast<T>(sdy);
    const double g = gamma_.value[c] * static_cast<double>(inv_sd_[c]);
    for (int i = 0; i < n; ++i) {
      const std::size_t base = (static_cast<std::size_t>(i) * c_ + c) * hw;
      for (std::size_t k = 0; k < hw; ++k) {
        // Batch statistics depend on x; running statistics do not.
        dx.data[base + k] = trained_batch_
                                ? static_cast<T>(g * (dy.data[base + k] - sdy / m - xhat_.data[base + k] * sdyx / m))
                                : static_cast<T>(g * dy.data[base + k]);
      }
    }
  }
  return dx;
}

// ---- pooling

template <typename T>
Tensor<T> MaxPool2d<T>::forward(const Tensor<T>& x, bool) {
  require_rank(x.shape, 4, "maxpool2d");
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int oh = h / kh_, ow = w / kw_;
  require(oh > 0 && ow > 0, "shape-mismatch", "maxpool2d: map smaller than the pool");
  in_shape_ = x.shape;
  Tensor<T> y({n, c, oh, ow});
  argmax_.resize(y.size());
  std::size_t o = 0;
  for (int p = 0; p < n * c; ++p) {
    const std::size_t plane = static_cast<std::size_t>(p) * h * w;
    for (int yy = 0; yy < oh; ++yy)
      for (int xx = 0; xx < ow; ++xx, ++o) {
        T best = -std::numeric_limits<T>::infinity();
        std::size_t at = plane;
        for (int dy = 0; dy < kh_; ++dy)
          for (int dx = 0; dx < kw_; ++dx) {
            const std::size_t idx = plane + static_cast<std::size_t>(yy * kh_ + dy) * w + (xx * kw_ + dx);
            if (x.data[idx] > best) best = x.data[idx], at = idx;
          }
        y.data[o] = best;
        argmax_[o] = at;
      }
  }
  return y;
}

template <typename T>
Tensor<T> MaxPool2d<T>::backward(const Tensor<T>& dy) {
  Tensor<T> dx(in_shape_);
  for (std::size_t o = 0; o < dy.size(); ++o) dx.data[argmax_[o]] += dy.data[o];
  return dx;
}

template <typename T>
Tensor<T> AvgPool2d<T>::forward(const Tensor<T>& x, bool) {
  require_rank(x.shape, 4, "avgpool2d");
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int oh = h / kh_, ow = w / kw_;
  require(oh > 0 && ow > 0, "shape-mismatch", "avgpool2d: map smaller than the pool");
  in_shape_ = x.shape;
  Tensor<T> y({n, c, oh, ow});
  const T scale = T(1) / static_cast<T>(kh_ * kw_);
  std::size_t o = 0;
  for (int p = 0; p < n * c; ++p) {
    const T* plane = x.data.data() + static_cast<std::size_t>(p) * h * w;
    for (int yy = 0; yy < oh; ++yy)
      for (int xx = 0; xx < ow; ++xx, ++o) {
        T s = 0;
        for (int dy = 0; dy < kh_; ++dy)
          for (int dx = 0; dx < kw_; ++dx) s += plane[static_cast<std::size_t>(yy * kh_ + dy) * w + xx * kw_ + dx];
        y.data[o] = s * scale;
      }
  }
  return y;
}

template <typename T>
Tensor<T> AvgPool2d<T>::backward(const Tensor<T>& dy) {
  Tensor<T> dx(in_shape_);
  const int h = in_shape_[2], w = in_shape_[3], oh = dy.dim(2), ow = dy.dim(3);
  const T scale = T(1) / static_cast<T>(kh_ * kw_);
  std::size_t o = 0;
  for (int p = 0; p < dy.dim(0) * dy.dim(1); ++p) {
    T* plane = dx.data.data() + static_cast<std::size_t>(p) * h * w;
    for (int yy = 0; yy < oh; ++yy)
      for (int xx = 0; xx < ow; ++xx, ++o)
        for (int a = 0; a < kh_; ++a)
          for (int b = 0; b < kw_; ++b) plane[static_cast<std::size_t>(yy * kh_ + a) * w + xx * kw_ + b] = dy.data[o] * scale;
  }
  return dx;
}

template <typename T>
Tensor<T> WidthMean<T>::forward(const Tensor<T>& x, bool) {
  require_rank(x.shape, 4, "widthmean");
  in_shape_ = x.shape;
  const int n = x.dim(0), rows = x.dim(1) * x.dim(2), w = x.dim(3);
  Tensor<T> y({n, rows});
  for (std::size_t r = 0; r < y.size(); ++r) {
    T s = 0;
    for (int k = 0; k < w; ++k) s += x.data[r * w + k];
    y.data[r] = s / static_cast<T>(w);
  }
  return y;
}

template <typename T>
Tensor<T> WidthMean<T>::backward(const Tensor<T>& dy) {
  Tensor<T> dx(in_shape_);
  const int w = in_shape_[3];
  for (std::size_t r = 0; r < dy.size(); ++r)
    for (int k = 0; k < w; ++k) dx.data[r * w + k] = dy.data[r] / static_cast<T>(w);
  return dx;
}

// ---- Sequential

template <typename T>
Tensor<T> Sequential<T>::forward(const Tensor<T>& x, bool train) {
  Tensor<T> h = x;
  for (auto& l : layers_) h = l->forward(h, train);
  return h;
}

template <typename T>
Tensor<T> Sequential<T>::backward(const Tensor<T>& dy) {
  Tensor<T> g = dy;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

template <typename T>
std::vector<Param<T>*> Sequential<T>::params() {
  std::vector<Param<T>*> out;
  for (auto& l : layers_)
    for (auto* p : l->params()) out.push_back(p);
  return out;
}

template <typename T>
std::vector<std::pair<std::string, std::vector<T>*>> Sequential<T>::named_tensors() {
  std::vector<std::pair<std::string, std::vector<T>*>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (auto* p : layers_[i]->params()) out.emplace_back(std::to_string(i) + "." + p->name, &p->value);
    for (auto& [name, buf] : layers_[i]->buffers()) out.emplace_back(std::to_string(i) + "." + name, buf);
  }
  return out;
}

// ---- losses and optimizer

template <typename T>
T softmax_cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels, Tensor<T>* dlogits) {
  require_rank(logits.shape, 2, "softmax_cross_entropy");
  const int n = logits.dim(0), k = logits.dim(1);
  require(static_cast<int>(labels.size()) == n, "shape-mismatch", "label count");
  if (dlogits) *dlogits = Tensor<T>(logits.shape);
  double loss = 0;
  std::vector<double> p(k);
  for (int i = 0; i < n; ++i) {
    const T* z = logits.data.data() + static_cast<std::size_t>(i) * k;
    const double mx = *std::max_element(z, z + k);
    double s = 0;
    for (int j = 0; j < k; ++j) s += p[j] = std::exp(z[j] - mx);
    const int y = labels[i];
    require(y >= 0 && y < k, "invalid-label", "label outside the logit range");
    loss += -(z[y] - mx - std::log(s));
    if (dlogits)
      for (int j = 0; j < k; ++j)
        dlogits->data[static_cast<std::size_t>(i) * k + j] = static_cast<T>((p[j] / s - (j == y ? 1.0 : 0.0)) / n);
  }
  return static_cast<T>(loss / n);
}

template <typename T>
T mse_loss(const Tensor<T>& pred, const std::vector<T>& target, Tensor<T>* dpred) {
  require(pred.size() == target.size(), "shape-mismatch", "mse target size");
  double loss = 0;
  if (dpred) *dpred = Tensor<T>(pred.shape);
  const double n = static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred.data[i]) - target[i];
    loss += d * d;
    if (dpred) dpred->data[i] = static_cast<T>(2.0 * d / n);
  }
  return static_cast<T>(loss / n);
}

template <typename T>
void zero_grad(const std::vector<Param<T>*>& ps) {
  for (auto* p : ps) std::fill(p->grad.begin(), p->grad.end(), T(0));
}

template <typename T>
void sgd_step(const std::vector<Param<T>*>& ps, double lr, double momentum) {
  // In T so the loop vectorizes; it touches every weight three times per step.
  const T mu = static_cast<T>(momentum), rate = static_cast<T>(lr);
  for (auto* p : ps) {
    T* v = p->velocity.data();
    T* w = p->value.data();
    const T* g = p->grad.data();
    for (std::size_t i = 0, n = p->value.size(); i < n; ++i) {
      v[i] = mu * v[i] + g[i];
      w[i] -= rate * v[i];
    }
  }
}

#define VAHF_INSTANTIATE(T)                                                              \
  template struct Tensor<T>;                                                             \
  template class Linear<T>;                                                              \
  template class ReLU<T>;                                                                \
  template class Dropout<T>;                                                             \
  template class Conv2d<T>;                                                              \
  template class BatchNorm2d<T>;                                                         \
  template class MaxPool2d<T>;                                                           \
  template class AvgPool2d<T>;                                                           \
  template class WidthMean<T>;                                                           \
  template class Sequential<T>;                                                          \
  template T softmax_cross_entropy<T>(const Tensor<T>&, const std::vector<int>&, Tensor<T>*); \
  template T mse_loss<T>(const Tensor<T>&, const std::vector<T>&, Tensor<T>*);            \
  template void zero_grad<T>(const std::vector<Param<T>*>&);                             \
  template void sgd_step<T>(const std::vector<Param<T>*>&, double, double);

VAHF_INSTANTIATE(float)
VAHF_INSTANTIATE(double)
#undef VAHF_INSTANTIATE

}  // namespace vahf::model
