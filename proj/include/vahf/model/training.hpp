#pragma once

#include <cstdint>
#include <vector>

#include "vahf/common/config.hpp"
#include "vahf/model/classifier.hpp"

namespace vahf::model {

/// Learning rate of 1-based epoch n: 0.1 n lr0 for n <= 10, else
/// 0.97^(n - 10) lr0. Without warm-up the first ten epochs run at lr0.
double lr_at(int epoch, double lr0, bool warmup = true);

struct TrainReport {
  int epochs = 0;
  std::vector<double> losses;  // mean training loss per epoch
  bool early_stopped = false;
  double train_accuracy = 0.0;  // eval-mode, after the last epoch
};

/// Mini-batch momentum SGD on softmax cross-entropy; stops after
/// cfg.max_epochs or once an epoch's mean loss drops below cfg.early_stop_loss.
/// Throws Error("empty-split") for no rows, Error("training-diverged") on a
/// non-finite loss.
TrainReport train_classifier(GestureClassifier<float>& model, const FeatureTable& data, const TrainConfig& cfg,
                             std::uint64_t seed);

std::vector<int> predict(GestureClassifier<float>& model, const FeatureTable& data);
double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace vahf::model
