#include "vahf/harness/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "vahf/common/error.hpp"
#include "vahf/common/parallel.hpp"
#include "vahf/features/features.hpp"
#include "vahf/features/feature_file.hpp"
#include "vahf/model/checkpoint.hpp"
#include "vahf/model/classifier.hpp"
#include "vahf/model/extractor.hpp"
#include "vahf/model/training.hpp"

namespace vahf::harness {
namespace {

using features::SampleAnalysis;

// Per-sample modality vectors for one (combo, fold); empty when unused.
struct FoldFeatures {
  std::vector<std::vector<float>> vol, ultra, imu;
  double tau = 0.0;
  std::optional<model::Extractor> vocal_ex, ultra_ex;
};

ModelSelector richest(SensorCombo c) { return optimal_selector(c); }

std::vector<std::vector<float>> embed_all(model::Extractor& ex, const std::vector<const SampleAnalysis*>& samples,
                                          dsp::Grid (*map_of)(const SampleAnalysis&, SensorCombo), SensorCombo combo) {
  std::vector<std::vector<float>> out;
  out.reserve(samples.size());
  constexpr std::size_t kChunk = 16;
  for (std::size_t b = 0; b < samples.size(); b += kChunk) {
    std::vector<dsp::Grid> maps;
    for (std::size_t i = b; i < std::min(samples.size(), b + kChunk); ++i) maps.push_back(map_of(*samples[i], combo));
    std::vector<const dsp::Grid*> ptrs;
    for (const auto& m : maps) ptrs.push_back(&m);
    for (auto& e : ex.embed(ptrs)) out.push_back(std::move(e));
  }
  return out;
}

model::Extractor fit_extractor(const std::vector<const SampleAnalysis*>& train,
                               dsp::Grid (*map_of)(const SampleAnalysis&, SensorCombo), SensorCombo combo, int stem_h,
                               int stem_w, const Config& cfg, std::uint64_t seed) {
  const auto probe = map_of(*train.front(), combo);
  model::Extractor ex({probe.rows, probe.cols, stem_h, stem_w, cfg.model.extractor_widths, cfg.model.embedding}, seed);
  // The warm start sees at most pretrain_samples maps; without it the
  // random network is only calibrated on a sample of the same size.
  Rng rng(derive_seed(seed, 1));
  std::vector<const SampleAnalysis*> pick = train;
  for (std::size_t i = pick.size(); i > 1; --i) std::swap(pick[i - 1], pick[rng.uniform_int(i)]);
  if (cfg.train.pretrain_samples > 0 && pick.size() > static_cast<std::size_t>(cfg.train.pretrain_samples))
    pick.resize(static_cast<std::size_t>(cfg.train.pretrain_samples));
  std::vector<dsp::Grid> maps;
  for (const auto* a : pick) maps.push_back(map_of(*a, combo));
  std::vector<const dsp::Grid*> ptrs;
  for (const auto& m : maps) ptrs.push_back(&m);
  if (cfg.train.pretrain)
    ex.pretrain(ptrs, cfg.train, derive_seed(seed, 2));
  else
    ex.calibrate(ptrs);
  return ex;
}

FoldFeatures fold_features(const std::vector<const SampleAnalysis*>& samples, const std::vector<int>& train_idx,
                           const std::vector<std::vector<double>>& distances, SensorCombo combo, ModelSelector widest,
                           const Config& cfg, std::uint64_t seed) {
  std::vector<const SampleAnalysis*> train;
  for (int i : train_idx) train.push_back(samples[i]);
  FoldFeatures f;
  std::vector<std::vector<float>> vemb, uemb;
  if (uses_vocal(widest)) {
    auto& ex = f.vocal_ex.emplace(fit_extractor(train, &features::vocal_map, combo, cfg.model.vocal_stem_h,
                                                cfg.model.vocal_stem_w, cfg, derive_seed(seed, 11)));
    vemb = embed_all(ex, samples, &features::vocal_map, combo);
    std::vector<const std::vector<double>*> train_d;
    for (int i : train_idx) train_d.push_back(&distances[i]);
    f.tau = features::median_distance(train_d);
  }
  if (uses_ultra(widest)) {
    auto& ex = f.ultra_ex.emplace(fit_extractor(train, &features::ultra_map, combo, cfg.model.ultra_stem_h,
                                                cfg.model.ultra_stem_w, cfg, derive_seed(seed, 12)));
    uemb = embed_all(ex, samples, &features::ultra_map, combo);
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    // Embeddings are precomputed; the context hands them back per sample.
    features::FoldContext ctx;
    if (!vemb.empty()) ctx.vocal_embed = [&](const dsp::Grid&) { return vemb[i]; };
    if (!uemb.empty()) ctx.ultra_embed = [&](const dsp::Grid&) { return uemb[i]; };
    ctx.tau = f.tau > 0 ? f.tau : 1.0;
    if (!distances.empty()) ctx.distances = &distances[i];
    auto b = features::extract_bundle(*samples[i], combo, widest, ctx);
    f.vol.push_back(b.f_vol.value_or(std::vector<float>{}));
    f.ultra.push_back(b.f_ultra.value_or(std::vector<float>{}));
    f.imu.push_back(b.f_imu.value_or(std::vector<float>{}));
  }
  return f;
}

// Modalities each selector feeds its classifier, z-scored with training rows.
std::vector<const std::vector<std::vector<float>>*> modalities(const FoldFeatures& f, ModelSelector s) {
  std::vector<const std::vector<std::vector<float>>*> m;
  if (uses_vocal(s)) m.push_back(&f.vol);
  if (uses_ultra(s)) m.push_back(&f.ultra);
  if (uses_imu(s)) m.push_back(&f.imu);
  return m;
}

dsp::Grid normalized_rows(const std::vector<std::vector<float>>& rows, const std::vector<int>& idx,
                          const features::Normalizer& z) {
  const int dim = static_cast<int>(z.mean.size());
  dsp::Grid g(static_cast<int>(idx.size()), dim);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    auto v = rows[idx[r]];
    z.apply(v);
    std::copy(v.begin(), v.end(), g.row(static_cast<int>(r)).begin());
  }
  return g;
}

// One table part per modality (logit fusion) or a single concatenation.
model::FeatureTable build_table(const FoldFeatures& f, ModelSelector s, const std::vector<int>& idx,
                                const std::vector<int>& train_idx, const std::vector<int>& labels) {
  model::FeatureTable t;
  t.labels = labels;
  for (const auto* m : modalities(f, s)) {
    std::vector<const std::vector<float>*> rows;
    for (int i : train_idx) rows.push_back(&(*m)[i]);
    t.parts.push_back(normalized_rows(*m, idx, features::Normalizer::fit(rows)));
  }
  if (s != ModelSelector::ALL_L && t.parts.size() > 1) {
    int cols = 0;
    for (const auto& p : t.parts) cols += p.cols;
    dsp::Grid cat(t.rows(), cols);
    for (int r = 0; r < t.rows(); ++r) {
      auto dst = cat.row(r).begin();
      for (const auto& p : t.parts) dst = std::copy(p.row(r).begin(), p.row(r).end(), dst);
    }
    t.parts = {std::move(cat)};
  }
  return t;
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

void summarize(CellResult& c) {
  std::vector<double> acc;
  c.confusion = {};
  for (const auto& f : c.folds) {
    acc.push_back(100.0 * f.accuracy);
    for (int i = 0; i < kNumLabels; ++i)
      for (int j = 0; j < kNumLabels; ++j) c.confusion[i][j] += f.confusion[i][j];
  }
  double m = 0;
  for (double a : acc) m += a;
  c.mean_pct = acc.empty() ? 0.0 : m / static_cast<double>(acc.size());
  c.sd_pct = sd_of(acc);
}

std::vector<std::vector<double>> all_distances(const std::vector<const SampleAnalysis*>& samples, SensorCombo combo,
                                               ModelSelector widest, int jobs) {
  std::vector<std::vector<double>> d;
  if (!uses_vocal(widest)) return d;
  d.resize(samples.size());
  parallel_for(samples.size(), jobs, [&](std::size_t i) { d[i] = features::sample_pair_distances(*samples[i], combo); });
  return d;
}

model::ClassifierSpec spec_for(const model::FeatureTable& t, ModelSelector sel, int classes, const Config& cfg) {
  std::vector<int> dims;
  for (const auto& p : t.parts) dims.push_back(p.cols);
  return {dims, sel == ModelSelector::ALL_L ? model::Fusion::Logit : model::Fusion::Single, cfg.model.hidden, classes,
          cfg.train.dropout};
}

}  // namespace

ModelSelector optimal_selector(SensorCombo combo) {
  if (is_valid(combo, ModelSelector::ALL_F)) return ModelSelector::ALL_F;
  if (is_valid(combo, ModelSelector::VU)) return ModelSelector::VU;
  return ModelSelector::V;
}

std::vector<CellResult> evaluate_combo(const Dataset& data, SensorCombo combo, const std::vector<ModelSelector>& selectors,
                                       const EvalOptions& opt) {
  for (auto s : selectors) require_valid(combo, s);
  require(!selectors.empty(), "combo-selector-invalid", "no selectors");

  std::vector<int> classes = opt.labels;
  if (classes.empty())
    for (int g = 0; g < kNumLabels; ++g) classes.push_back(g);
  std::sort(classes.begin(), classes.end());
  std::map<int, int> class_of;
  for (std::size_t k = 0; k < classes.size(); ++k) class_of[classes[k]] = static_cast<int>(k);

  std::vector<const SampleAnalysis*> samples;
  for (const auto& s : data.samples)
    if (class_of.count(s.label)) samples.push_back(&s);
  std::set<int> user_set;
  for (const auto* s : samples) user_set.insert(s->user_id);
  const std::vector<int> users(user_set.begin(), user_set.end());
  require(users.size() >= 2, "too-few-users", "leave-one-user-out needs two users");

  // The widest selector decides which extractors a fold needs.
  ModelSelector widest = selectors.front();
  for (auto s : selectors) {
    if (uses_ultra(s) && !uses_ultra(widest)) widest = uses_imu(widest) || uses_imu(s) ? richest(combo) : ModelSelector::VU;
    if (uses_imu(s) && !uses_imu(widest)) widest = richest(combo);
    if (uses_vocal(s) && !uses_vocal(widest)) widest = uses_imu(widest) ? richest(combo) : ModelSelector::VU;
  }

  // DTW distances do not depend on the fold; only their scale tau does.
  const auto distances = all_distances(samples, combo, widest, opt.jobs);

  std::vector<std::vector<FoldResult>> per_fold(users.size());
  parallel_for(users.size(), opt.jobs, [&](std::size_t f) {
    const int test_user = users[f];
    const std::uint64_t fold_seed = derive_seed(opt.seed, static_cast<int>(combo), test_user);
    std::vector<int> train_idx, test_idx, all_idx;
    std::vector<int> train_y, test_y;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      all_idx.push_back(static_cast<int>(i));
      if (samples[i]->user_id == test_user) {
        test_idx.push_back(static_cast<int>(i));
        test_y.push_back(class_of.at(samples[i]->label));
      } else {
        train_idx.push_back(static_cast<int>(i));
        train_y.push_back(class_of.at(samples[i]->label));
      }
    }
    const auto feats = fold_features(samples, train_idx, distances, combo, widest, opt.cfg, fold_seed);
    for (auto sel : selectors) {
      const auto train = build_table(feats, sel, train_idx, train_idx, train_y);
      const auto test = build_table(feats, sel, test_idx, train_idx, test_y);
      const auto spec = spec_for(train, sel, static_cast<int>(classes.size()), opt.cfg);
      const auto sel_seed = derive_seed(fold_seed, 100 + static_cast<int>(sel));
      model::GestureClassifier<float> clf(spec, sel_seed);
      const auto rep = model::train_classifier(clf, train, opt.cfg.train, derive_seed(sel_seed, 1));
      const auto pred = model::predict(clf, test);

      FoldResult r;
      r.test_user = test_user;
      r.epochs = rep.epochs;
      r.tau = feats.tau;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        r.truth.push_back(classes[test_y[i]]);
        r.predicted.push_back(classes[pred[i]]);
        ++r.confusion[r.truth.back()][r.predicted.back()];
      }
      r.accuracy = model::accuracy(pred, test_y);
      per_fold[f].push_back(std::move(r));
      if (opt.log)
        opt.log(std::string(to_string(combo)) + "/" + std::string(to_string(sel)) + " user " +
                std::to_string(test_user) + ": " + std::to_string(100.0 * per_fold[f].back().accuracy) + "% (" +
                std::to_string(rep.epochs) + " epochs)");
    }
  });

  std::vector<CellResult> out;
  for (std::size_t s = 0; s < selectors.size(); ++s) {
    CellResult c;
    c.combo = combo;
    c.selector = selectors[s];
    c.labels = classes;
    for (std::size_t f = 0; f < users.size(); ++f) c.folds.push_back(per_fold[f][s]);
    summarize(c);
    out.push_back(std::move(c));
  }
  return out;
}

CellResult louo_cv(const Dataset& data, SensorCombo combo, ModelSelector selector, const EvalOptions& opt) {
  return evaluate_combo(data, combo, {selector}, opt).front();
}

std::vector<CellResult> run_grid(const Dataset& data, const EvalOptions& opt, const std::vector<SensorCombo>& combos) {
  std::vector<CellResult> out;
  for (auto c : combos) {
    std::vector<ModelSelector> sels;
    for (auto s : kAllSelectors)
      if (is_valid(c, s)) sels.push_back(s);
    for (auto& r : evaluate_combo(data, c, sels, opt)) out.push_back(std::move(r));
  }
  return out;
}

CellResult reduced_gesture_eval(const Dataset& data, SensorCombo combo, const std::vector<int>& subset,
                                const EvalOptions& opt) {
  require(!subset.empty(), "empty-subset", "pick at least one of G1, G2, G3");
  std::set<int> labels(subset.begin(), subset.end());
  for (int g : labels) require(g == kG1 || g == kG2 || g == kG3, "invalid-subset", "reduced tasks use G1, G2, G3");
  labels.insert(kEmptyLabel);
  EvalOptions o = opt;
  o.labels.assign(labels.begin(), labels.end());
  auto c = louo_cv(data, combo, optimal_selector(combo), o);
  std::string name;
  for (int g : subset) name += (name.empty() ? "" : "+") + std::string(g == kG1 ? "G1" : g == kG2 ? "G2" : "G3");
  c.name = name;
  return c;
}

std::vector<CellResult> reduced_table(const Dataset& data, const std::vector<SensorCombo>& combos, const EvalOptions& opt) {
  const std::vector<std::vector<int>> tasks{{kG1}, {kG2}, {kG3}, {kG1, kG2, kG3}};
  std::vector<CellResult> out;
  for (auto c : combos)
    for (const auto& t : tasks) out.push_back(reduced_gesture_eval(data, c, t, opt));
  return out;
}

std::vector<CellResult> ablation_run(const Dataset& data, SensorCombo combo, ModelSelector selector, const EvalOptions& opt) {
  struct Row {
    const char* name;
    bool pretrain, dropout, warmup;
  };
  const Row rows[] = {{"No Optimization", false, false, false},
                      {"No Pretraining", false, true, true},
                      {"No Dropout", true, false, true},
                      {"No Warm-up", true, true, false},
                      {"Full Model", true, true, true}};
  std::vector<CellResult> out;
  for (const auto& r : rows) {
    EvalOptions o = opt;
    o.cfg.train.pretrain = r.pretrain && opt.cfg.train.pretrain;
    o.cfg.train.dropout = r.dropout ? opt.cfg.train.dropout : 0.0;
    o.cfg.train.warmup = r.warmup && opt.cfg.train.warmup;
    auto c = louo_cv(data, combo, selector, o);
    c.name = r.name;
    out.push_back(std::move(c));
  }
  return out;
}

TrainSummary train_and_save(const Dataset& data, SensorCombo combo, ModelSelector selector, const EvalOptions& opt,
                            const std::filesystem::path& dir) {
  require_valid(combo, selector);
  std::vector<const SampleAnalysis*> samples;
  std::vector<int> idx, labels;
  for (const auto& s : data.samples) {
    idx.push_back(static_cast<int>(samples.size()));
    labels.push_back(s.label);
    samples.push_back(&s);
  }
  require(!samples.empty(), "empty-split", "no samples to train on");
  const std::uint64_t seed = derive_seed(opt.seed, static_cast<int>(combo), 0x7EA1);
  const auto distances = all_distances(samples, combo, selector, opt.jobs);
  auto feats = fold_features(samples, idx, distances, combo, selector, opt.cfg, seed);
  const auto table = build_table(feats, selector, idx, idx, labels);
  const auto sel_seed = derive_seed(seed, 100 + static_cast<int>(selector));
  model::GestureClassifier<float> clf(spec_for(table, selector, kNumLabels, opt.cfg), sel_seed);
  const auto rep = model::train_classifier(clf, table, opt.cfg.train, derive_seed(sel_seed, 1));

  std::filesystem::create_directories(dir);
  nlohmann::json log = nlohmann::json::array();
  for (std::size_t e = 0; e < rep.losses.size(); ++e)
    log.push_back({{"epoch", e + 1},
                   {"loss", rep.losses[e]},
                   {"lr", model::lr_at(static_cast<int>(e) + 1, opt.cfg.train.lr0, opt.cfg.train.warmup)}});
  model::save_classifier(dir / "classifier.ckpt", clf,
                         {{"config_hash", opt.cfg.hash()},
                          {"seed", opt.seed},
                          {"combo", std::string(to_string(combo))},
                          {"selector", std::string(to_string(selector))},
                          {"tau", feats.tau},
                          {"train_accuracy", rep.train_accuracy},
                          {"log", log}});

  // Normalizers, one per classifier input part before concatenation.
  std::vector<std::vector<float>> norm_store;
  model::NamedTensors norms;
  int k = 0;
  for (const auto* m : modalities(feats, selector)) {
    std::vector<const std::vector<float>*> rows;
    for (int i : idx) rows.push_back(&(*m)[i]);
    auto z = features::Normalizer::fit(rows);
    norm_store.push_back(std::move(z.mean));
    norm_store.push_back(std::move(z.inv_sd));
    ++k;
  }
  for (std::size_t i = 0; i < norm_store.size(); ++i)
    norms.emplace_back("part" + std::to_string(i / 2) + (i % 2 ? ".inv_sd" : ".mean"), &norm_store[i]);
  model::save_checkpoint(dir / "normalizer.ckpt", {{"kind", "normalizer"}, {"parts", k}}, norms);

  auto save_ex = [&](std::optional<model::Extractor>& ex, const char* name) {
    if (!ex) return;
    const auto& sp = ex->spec();
    model::save_checkpoint(dir / name,
                           {{"kind", "extractor"},
                            {"rows", sp.rows},
                            {"cols", sp.cols},
                            {"stem_h", sp.stem_h},
                            {"stem_w", sp.stem_w},
                            {"widths", sp.widths},
                            {"embedding", sp.embedding},
                            {"config_hash", opt.cfg.hash()}},
                           ex->named_tensors());
  };
  save_ex(feats.vocal_ex, "vocal_extractor.ckpt");
  save_ex(feats.ultra_ex, "ultra_extractor.ckpt");
  return {rep.epochs, rep.train_accuracy, feats.tau};
}

int export_features(const Dataset& data, SensorCombo combo, const EvalOptions& opt, const std::filesystem::path& dir) {
  std::vector<const SampleAnalysis*> samples;
  std::vector<int> idx;
  for (const auto& s : data.samples) {
    idx.push_back(static_cast<int>(samples.size()));
    samples.push_back(&s);
  }
  require(!samples.empty(), "empty-split", "no samples to export");
  const auto sel = optimal_selector(combo);
  const std::uint64_t seed = derive_seed(opt.seed, static_cast<int>(combo), 0x7EA1);
  const auto distances = all_distances(samples, combo, sel, opt.jobs);
  const auto feats = fold_features(samples, idx, distances, combo, sel, opt.cfg, seed);
  std::filesystem::create_directories(dir);
  std::map<std::pair<int, int>, int> seen;  // (user, label) -> utterances so far
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& a = *samples[i];
    features::FeatureBundle b;
    if (!feats.vol[i].empty()) b.f_vol = feats.vol[i];
    if (!feats.ultra[i].empty()) b.f_ultra = feats.ultra[i];
    if (!feats.imu[i].empty()) b.f_imu = feats.imu[i];
    const int k = seen[{a.user_id, a.label}]++;
    const auto stem = dir / ("u" + std::to_string(a.user_id) + "_g" + std::to_string(a.label) + "_" + std::to_string(k));
    features::write_bundle(stem, b,
                           {{"combo", std::string(to_string(combo))},
                            {"selector", std::string(to_string(sel))},
                            {"config_hash", opt.cfg.hash()},
                            {"label", a.label},
                            {"user_id", a.user_id},
                            {"command_id", a.command_id},
                            {"tau", feats.tau}});
  }
  return static_cast<int>(samples.size());
}

}  // namespace vahf::harness
