#include "vahf/model/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vahf/common/error.hpp"

namespace vahf::model {

double lr_at(int epoch, double lr0, bool warmup) {
  require(epoch >= 1, "invalid-epoch", "epochs count from 1");
  if (epoch <= 10) return warmup ? 0.1 * epoch * lr0 : lr0;
  return std::pow(0.97, epoch - 10) * lr0;
}

TrainReport train_classifier(GestureClassifier<float>& model, const FeatureTable& data, const TrainConfig& cfg,
                             std::uint64_t seed) {
  require(data.rows() > 0, "empty-split", "no training rows");
  data.validate();
  Rng rng(seed);
  const auto params = model.params();
  std::vector<int> order(static_cast<std::size_t>(data.rows()));
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(std::max(1, cfg.batch_size));

  TrainReport rep;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_int(i)]);
    const double lr = lr_at(epoch, cfg.lr0, cfg.warmup);
    double sum = 0;
    for (std::size_t b = 0; b < order.size(); b += batch) {
      const std::vector<int> idx(order.begin() + static_cast<std::ptrdiff_t>(b),
                                 order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), b + batch)));
      std::vector<int> labels;
      for (int r : idx) labels.push_back(data.labels[r]);
      zero_grad(params);
      Tensor<float> dz;
      const float loss = softmax_cross_entropy(model.forward(gather_rows(data, idx), true), labels, &dz);
      if (!std::isfinite(loss)) throw Error("training-diverged", "epoch " + std::to_string(epoch));
      model.backward(dz);
      sgd_step(params, lr, cfg.momentum);
      sum += static_cast<double>(loss) * idx.size();
    }
    rep.losses.push_back(sum / static_cast<double>(order.size()));
    rep.epochs = epoch;
    if (rep.losses.back() < cfg.early_stop_loss) {
      rep.early_stopped = true;
      break;
    }
  }
  rep.train_accuracy = accuracy(predict(model, data), data.labels);
  return rep;
}

std::vector<int> predict(GestureClassifier<float>& model, const FeatureTable& data) {
  data.validate();
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(data.rows()));
  constexpr int kChunk = 256;
  for (int b = 0; b < data.rows(); b += kChunk) {
    std::vector<int> idx(static_cast<std::size_t>(std::min(kChunk, data.rows() - b)));
    std::iota(idx.begin(), idx.end(), b);
    const auto z = model.forward(gather_rows(data, idx), false);
    const int k = z.dim(1);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const float* row = z.data.data() + i * k;
      out.push_back(static_cast<int>(std::max_element(row, row + k) - row));
    }
  }
  return out;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  require(predicted.size() == truth.size(), "shape-mismatch", "prediction count");
  if (truth.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

}  // namespace vahf::model
