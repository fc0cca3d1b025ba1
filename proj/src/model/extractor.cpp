#include "vahf/model/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vahf/common/error.hpp"

namespace vahf::model {

Extractor::Extractor(ExtractorSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  require(spec_.stem_h > 0 && spec_.stem_w > 0 && !spec_.widths.empty() && spec_.embedding > 0, "invalid-extractor",
          "stem, widths and embedding must be positive");
  int h = stem_rows(), w = stem_cols();
  Rng rng(derive_seed(seed, 0xE7));
  net_.add(std::make_unique<AvgPool2d<float>>(spec_.stem_h, spec_.stem_w));
  int c = 1;
  for (int width : spec_.widths) {
    net_.add(std::make_unique<Conv2d<float>>(c, width, rng));
    net_.add(std::make_unique<BatchNorm2d<float>>(width));
    net_.add(std::make_unique<ReLU<float>>());
    net_.add(std::make_unique<MaxPool2d<float>>(2, 2));
    c = width;
    h /= 2;
    w /= 2;
  }
  require(h > 0 && w > 0, "invalid-extractor",
          "map " + std::to_string(spec_.rows) + "x" + std::to_string(spec_.cols) + " too small for the network");
  net_.add(std::make_unique<WidthMean<float>>());
  auto head = std::make_unique<Linear<float>>(c * h, spec_.embedding, rng);
  net_.add(std::move(head));
}

Tensor<float> Extractor::batch_of(const std::vector<const dsp::Grid*>& maps, std::size_t begin, std::size_t end) const {
  const std::size_t plane = static_cast<std::size_t>(spec_.rows) * spec_.cols;
  Tensor<float> x({static_cast<int>(end - begin), 1, spec_.rows, spec_.cols});
  for (std::size_t i = begin; i < end; ++i) {
    const auto* g = maps[i];
    require(g->rows == spec_.rows && g->cols == spec_.cols, "shape-mismatch",
            "extractor expects " + std::to_string(spec_.rows) + "x" + std::to_string(spec_.cols) + " maps");
    float* dst = x.data.data() + (i - begin) * plane;
    for (std::size_t k = 0; k < plane; ++k) dst[k] = (g->data[k] - scaling_[0]) * scaling_[1];
  }
  return x;
}

void Extractor::calibrate(const std::vector<const dsp::Grid*>& maps) {
  require(!maps.empty(), "empty-split", "no maps to calibrate on");
  double s = 0, s2 = 0, n = 0;
  for (const auto* g : maps)
    for (float v : g->data) {
      s += v;
      s2 += static_cast<double>(v) * v;
      n += 1;
    }
  const double mean = s / n;
  const double sd = std::sqrt(std::max(1e-12, s2 / n - mean * mean));
  scaling_ = {static_cast<float>(mean), static_cast<float>(1.0 / sd)};

  // Running statistics converge after a few train-mode passes; the weights
  // are untouched because nothing steps the optimiser here.
  constexpr std::size_t kBatch = 16;
  for (int pass = 0; pass < 3; ++pass)
    for (std::size_t b = 0; b < maps.size(); b += kBatch) net_.forward(batch_of(maps, b, std::min(maps.size(), b + kBatch)), true);
}

double Extractor::pretrain(const std::vector<const dsp::Grid*>& all_maps, const TrainConfig& cfg, std::uint64_t seed) {
  require(!all_maps.empty(), "empty-split", "no maps to pretrain on");
  Rng rng(seed);
  // A seeded subset keeps the warm start cheap.
  std::vector<const dsp::Grid*> maps = all_maps;
  for (std::size_t i = maps.size(); i > 1; --i) std::swap(maps[i - 1], maps[rng.uniform_int(i)]);
  if (cfg.pretrain_samples > 0 && maps.size() > static_cast<std::size_t>(cfg.pretrain_samples))
    maps.resize(static_cast<std::size_t>(cfg.pretrain_samples));
  calibrate(maps);

  const int sr = stem_rows(), sc = stem_cols();
  Rng init(derive_seed(seed, 0xDEC));
  Linear<float> decoder(spec_.embedding, sr * sc, init);
  AvgPool2d<float> stem(spec_.stem_h, spec_.stem_w);
  auto params = net_.params();
  for (auto* p : decoder.params()) params.push_back(p);
  for (auto* p : params) std::fill(p->velocity.begin(), p->velocity.end(), 0.0f);

  const auto batch = static_cast<std::size_t>(std::max(1, cfg.pretrain_batch));
  double last = 0;
  for (int epoch = 1; epoch <= cfg.pretrain_epochs; ++epoch) {
    for (std::size_t i = maps.size(); i > 1; --i) std::swap(maps[i - 1], maps[rng.uniform_int(i)]);
    double sum = 0;
    for (std::size_t b = 0; b < maps.size(); b += batch) {
      const std::size_t e = std::min(maps.size(), b + batch);
      const auto x = batch_of(maps, b, e);
      const auto target = stem.forward(x, false);
      zero_grad(params);
      const auto z = net_.forward(x, true);
      const auto recon = decoder.forward(z, true);
      Tensor<float> d;
      const float loss = mse_loss(recon, target.data, &d);
      if (!std::isfinite(loss)) throw Error("training-diverged", "extractor pretraining");
      net_.backward(decoder.backward(d));
      sgd_step(params, cfg.pretrain_lr, cfg.momentum);
      sum += static_cast<double>(loss) * static_cast<double>(e - b);
    }
    last = sum / static_cast<double>(maps.size());
  }
  calibrate(maps);
  return last;
}

std::vector<std::vector<float>> Extractor::embed(const std::vector<const dsp::Grid*>& maps) {
  std::vector<std::vector<float>> out;
  constexpr std::size_t kBatch = 16;
  for (std::size_t b = 0; b < maps.size(); b += kBatch) {
    const auto z = net_.forward(batch_of(maps, b, std::min(maps.size(), b + kBatch)), false);
    const auto d = static_cast<std::size_t>(z.dim(1));
    for (int i = 0; i < z.dim(0); ++i)
      out.emplace_back(z.data.begin() + static_cast<std::ptrdiff_t>(i * d), z.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
  }
  return out;
}

std::vector<float> Extractor::embed(const dsp::Grid& map) { return embed(std::vector<const dsp::Grid*>{&map}).front(); }

std::vector<std::pair<std::string, std::vector<float>*>> Extractor::named_tensors() {
  auto out = net_.named_tensors();
  out.emplace_back("input_scaling", &scaling_);
  return out;
}

}  // namespace vahf::model
