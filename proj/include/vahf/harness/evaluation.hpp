#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "vahf/common/channels.hpp"
#include "vahf/common/config.hpp"
#include "vahf/harness/combos.hpp"
#include "vahf/harness/dataset.hpp"

namespace vahf::harness {

using Confusion = std::array<std::array<int, kNumLabels>, kNumLabels>;  // [truth][predicted]

struct FoldResult {
  int test_user = -1;
  std::vector<int> truth;
  std::vector<int> predicted;
  double accuracy = 0.0;  // fraction
  int epochs = 0;
  double tau = 0.0;
  Confusion confusion{};
};

struct CellResult {
  std::string name;  // ablation row or reduced task; empty for grid cells
  SensorCombo combo = SensorCombo::RE;
  ModelSelector selector = ModelSelector::V;
  std::vector<int> labels;  // class set evaluated
  std::vector<FoldResult> folds;
  double mean_pct = 0.0;  // mean of per-fold accuracies, %
  double sd_pct = 0.0;    // sample standard deviation across folds, %
  Confusion confusion{};  // summed over folds
};

struct EvalOptions {
  Config cfg;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::vector<int> labels;  // empty: all nine
  std::function<void(const std::string&)> log;  // progress, optional
};

/// Leave-one-user-out over every user in the dataset, for several selectors
/// sharing the per-fold extractors and similarity scale. Invalid selectors
/// throw Error("combo-selector-invalid"); fewer than two users throw
/// Error("too-few-users").
std::vector<CellResult> evaluate_combo(const Dataset& data, SensorCombo combo, const std::vector<ModelSelector>& selectors,
                                       const EvalOptions& opt);
CellResult louo_cv(const Dataset& data, SensorCombo combo, ModelSelector selector, const EvalOptions& opt);

/// Every valid cell of the combo x selector matrix, row-major.
std::vector<CellResult> run_grid(const Dataset& data, const EvalOptions& opt,
                                 const std::vector<SensorCombo>& combos = {kAllCombos.begin(), kAllCombos.end()});

inline constexpr int kG1 = 3;  // cover mouth with palm
inline constexpr int kG2 = 4;  // cover ear with arched palm
inline constexpr int kG3 = 6;  // palm beside nose and mouth

/// The richest valid selector of a combo: ALL-F, else V+U, else V.
ModelSelector optimal_selector(SensorCombo combo);
/// subset (of G1, G2, G3) plus the empty gesture, with the combo's optimal
/// selector. Throws Error("empty-subset") or Error("invalid-subset").
CellResult reduced_gesture_eval(const Dataset& data, SensorCombo combo, const std::vector<int>& subset,
                                const EvalOptions& opt);
/// {G1,E}, {G2,E}, {G3,E}, {G1,G2,G3,E} for each combo.
std::vector<CellResult> reduced_table(const Dataset& data, const std::vector<SensorCombo>& combos, const EvalOptions& opt);

/// No Optimization, No Pretraining, No Dropout, No Warm-up, Full Model, all
/// on the same folds and seeds.
std::vector<CellResult> ablation_run(const Dataset& data, SensorCombo combo, ModelSelector selector,
                                     const EvalOptions& opt);

struct TrainSummary {
  int epochs = 0;
  double train_accuracy = 0.0;
  double tau = 0.0;
};

/// Fits extractors, normalizers and the classifier on every sample (no
/// held-out user) and writes classifier.ckpt, normalizer.ckpt and the
/// extractor checkpoints into dir.
TrainSummary train_and_save(const Dataset& data, SensorCombo combo, ModelSelector selector, const EvalOptions& opt,
                            const std::filesystem::path& dir);

/// Feature bundles of the combo's optimal selector for every sample, with
/// extractors fitted on the whole dataset; returns the number written.
int export_features(const Dataset& data, SensorCombo combo, const EvalOptions& opt, const std::filesystem::path& dir);

}  // namespace vahf::harness
