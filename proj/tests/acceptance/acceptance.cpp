// End-to-end acceptance run: one PASS/FAIL line per criterion.
//   acceptance [--only 1,3,8] [--jobs N] [--out DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "vahf/common/rng.hpp"
#include "vahf/dsp/dtw.hpp"
#include "vahf/dsp/iir.hpp"
#include "vahf/dsp/spectral.hpp"
#include "vahf/features/features.hpp"
#include "vahf/fmcw/fmcw.hpp"
#include "vahf/harness/evaluation.hpp"
#include "vahf/harness/report.hpp"
#include "vahf/model/classifier.hpp"
#include "vahf/model/layers.hpp"
#include "vahf/model/training.hpp"
#include "vahf/preprocess/preprocess.hpp"
#include "vahf/sim/session.hpp"

namespace fs = std::filesystem;
using namespace vahf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Settings {
  int jobs = 1;
  fs::path out;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double v, int digits = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

// ---- 1

Outcome dtw_oracle() {
  const auto t0 = Clock::now();
  auto manhattan = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
  };
  auto euclidean = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  };
  Rng rng(2024);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(8), m = 1 + rng.uniform_int(8), d = 1 + rng.uniform_int(4);
    dsp::VectorSequence a(n, std::vector<double>(d)), b(m, std::vector<double>(d));
    for (auto& v : a)
      for (auto& x : v) x = rng.normal();
    for (auto& v : b)
      for (auto& x : v) x = rng.normal();
    const bool l1 = trial % 2 == 0;
    const double got = dsp::dtw_distance(a, b, l1 ? dsp::Metric::Manhattan : dsp::Metric::Euclidean);
    const double want = l1 ? oracle::dtw_bruteforce(a, b, manhattan) : oracle::dtw_bruteforce(a, b, euclidean);
    if (got != want) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 5.0,
          std::to_string(200 - mismatches) + "/200 exact matches, " + fmt(secs, 3) + " s (limit 5 s)"};
}

// ---- 2

Outcome filter_correctness() {
  const auto t0 = Clock::now();
  const double rate = 48000.0, fc = 17500.0;
  const auto sos = dsp::butterworth(dsp::FilterKind::Highpass, 8, fc, rate);
  // Normalised to the passband (Nyquist side) gain.
  const double db = 20 * std::log10(dsp::magnitude_response(sos, fc, rate) / dsp::magnitude_response(sos, 23999.0, rate));

  // Same quantity measured on a steady tone.
  const std::size_t n = 1 << 16;
  std::vector<double> tone(n);
  for (std::size_t i = 0; i < n; ++i) tone[i] = std::sin(2 * std::numbers::pi * fc * static_cast<double>(i) / rate);
  const auto ty = dsp::sosfilt(sos, tone);
  const double tone_db = 20 * std::log10(oracle::rms(ty, n / 2) / oracle::rms(tone, n / 2));

  Rng rng(8);
  std::vector<double> noise(n);
  for (auto& v : noise) v = rng.normal(0.0, 0.3);
  const auto ny = dsp::sosfilt(sos, noise);
  const double atten = 10 * std::log10(oracle::band_energy(noise, rate, 0.0, 8000.0) / oracle::band_energy(ny, rate, 0.0, 8000.0));
  const double secs = seconds_since(t0);
  const bool ok = std::abs(db + 3.0) <= 0.1 && std::abs(tone_db + 3.0) <= 0.1 && atten >= 40.0 && secs < 5.0;
  return {ok, "cutoff " + fmt(db, 3) + " dB (tone " + fmt(tone_db, 3) + " dB), stop-band attenuation " + fmt(atten, 1) +
                  " dB, " + fmt(secs, 2) + " s"};
}

// ---- 3

Outcome fmcw_delay() {
  const auto t0 = Clock::now();
  const fmcw::ChirpConfig cfg;
  const double rate = 48000.0;
  Rng rng(33);
  int ok = 0;
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const double delay = rng.uniform(0.1e-3, 3e-3);
    const double gain = rng.uniform(0.1, 0.6);
    dsp::AudioSegment rx;
    rx.sample_rate = rate;
    rx.samples.resize(static_cast<std::size_t>(0.5 * rate));
    for (std::size_t k = 0; k < rx.size(); ++k)
      rx.samples[k] = static_cast<float>(gain * fmcw::chirp_value(cfg, static_cast<double>(k) / rate - delay) +
                                         rng.normal(0.0, 2e-3));
    const double err = std::abs(fmcw::estimate_delay(rx, cfg) - delay);
    worst = std::max(worst, err);
    if (err <= 0.15e-3) ++ok;
  }
  const double secs = seconds_since(t0);
  return {ok >= 48 && secs < 30.0, std::to_string(ok) + "/50 within 0.15 ms (worst " + fmt(worst * 1e3, 3) + " ms), " +
                                       fmt(secs, 2) + " s"};
}

// ---- 4

Outcome preprocessing_recovery() {
  const auto t0 = Clock::now();
  const Config cfg;
  const auto plans = sim::default_plans(3, 404, 10);
  double worst_align = 0;
  int sessions_ok = 0, within = 0, total = 0;
  for (int s = 0; s < 20; ++s) {
    const auto session = sim::make_session(plans[static_cast<std::size_t>(s)], cfg);
    const auto aligned = preprocess::align_channels(session.recording, cfg.preprocess);
    const double shift = aligned.imu.rows[0].t - session.recording.imu.rows[0].t;
    worst_align = std::max(worst_align, std::abs(shift + session.truth.imu_offset));
    const auto samples = preprocess::preprocess_recording(session.recording, cfg);
    if (samples.size() == 10) ++sessions_ok;
    for (std::size_t i = 0; i < samples.size() && i < session.truth.utterances.size(); ++i) {
      const auto& u = session.truth.utterances[i];
      const double start = samples[i].start_s;
      const double end = start + samples[i].vocal.begin()->second.duration();
      ++total;
      if (std::abs(start - u.voice_start) <= 0.1 && std::abs(end - u.voice_end) <= 0.1) ++within;
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_align <= 0.025 && sessions_ok == 20 && total == 200 && within >= 190 && secs < 120.0;
  return {ok, "worst alignment residual " + fmt(worst_align * 1e3, 2) + " ms, " + std::to_string(sessions_ok) +
                  "/20 sessions fully segmented, VAD within 0.1 s for " + std::to_string(within) + "/" +
                  std::to_string(total) + ", " + fmt(secs, 1) + " s"};
}

// ---- 5

Outcome feature_contracts() {
  bool ok = true;
  std::string detail;
  // Pair similarities for n monitored channels plus the reference.
  dsp::MfccSeries base{dsp::Grid(13, 40)};
  Rng rng(5);
  for (auto& v : base.coeffs.data) v = static_cast<float>(rng.normal());
  const auto segs = dsp::resample_mfcc(base, 20, 10);
  for (int n : {1, 2, 3, 5}) {
    std::vector<std::vector<dsp::MfccSeries>> chans(static_cast<std::size_t>(n + 1), segs);
    const auto sim = features::pairwise_mfcc_similarity(chans, 1.0);
    ok = ok && sim.size() == static_cast<std::size_t>(n * (n + 1) / 2);
    detail += "f_mfcc(n=" + std::to_string(n) + ")=" + std::to_string(sim.size()) + " ";
  }
  for (double secs : {0.5, 3.0, 6.0}) {
    dsp::AudioSegment s;
    s.sample_rate = 16000.0;
    s.samples.resize(static_cast<std::size_t>(secs * 16000.0));
    for (auto& v : s.samples) v = static_cast<float>(rng.normal(0.0, 0.1));
    const auto m = dsp::mel_spectrogram(s);
    ok = ok && m.values.rows == 128 && m.values.cols == 250;
    detail += "mel(" + fmt(secs, 1) + "s)=" + std::to_string(m.values.rows) + "x" + std::to_string(m.values.cols) + " ";
  }
  for (int frames : {100, 400, 600}) {
    preprocess::ImuStream imu;
    for (int i = 0; i < frames; ++i) {
      preprocess::ImuRow r;
      r.t = i / 200.0;
      imu.rows.push_back(r);
    }
    const auto w = features::imu_window(imu);
    ok = ok && w.size() == 4000;
    detail += "imu(" + std::to_string(frames) + ")=" + std::to_string(w.size()) + " ";
  }
  detail.pop_back();
  return {ok, detail};
}

// ---- 6

using model::Tensor;

Tensor<double> random_tensor(Rng& rng, std::vector<int> shape) {
  Tensor<double> t(std::move(shape));
  for (auto& v : t.data) v = rng.normal();
  return t;
}

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale < 1e-10 ? 0.0 : std::abs(a - b) / scale;
}

// Worst relative error over 20 probes of d(sum r*f(x)) against central differences.
double layer_gradient_error(model::Layer<double>& layer, Tensor<double> x, bool train, std::uint64_t seed,
                            const std::function<void()>& before = {}) {
  Rng rng(seed);
  auto run = [&](const Tensor<double>& in) {
    if (before) before();
    return layer.forward(in, train);
  };
  const auto r = random_tensor(rng, run(x).shape);
  auto loss = [&](const Tensor<double>& in) {
    const auto y = run(in);
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += r.data[i] * y.data[i];
    return s;
  };
  const auto params = layer.params();
  model::zero_grad(params);
  run(x);
  const auto dx = layer.backward(r);
  std::vector<std::vector<double>> pgrad;
  std::size_t total = 0;
  for (auto* p : params) {
    pgrad.push_back(p->grad);
    total += p->value.size();
  }
  const double h = 1e-6;
  double worst = 0;
  for (int probe = 0; probe < 20; ++probe) {
    double analytic, numeric;
    if (total == 0 || probe % 2 == 0) {
      const auto i = rng.uniform_int(x.size());
      auto xp = x, xm = x;
      xp.data[i] += h;
      xm.data[i] -= h;
      numeric = (loss(xp) - loss(xm)) / (2 * h);
      analytic = dx.data[i];
    } else {
      auto k = rng.uniform_int(total);
      std::size_t pi = 0;
      while (k >= params[pi]->value.size()) k -= params[pi++]->value.size();
      double& v = params[pi]->value[k];
      const double keep = v;
      v = keep + h;
      const double lp = loss(x);
      v = keep - h;
      const double lm = loss(x);
      v = keep;
      numeric = (lp - lm) / (2 * h);
      analytic = pgrad[pi][k];
    }
    worst = std::max(worst, rel_err(analytic, numeric));
  }
  return worst;
}

Outcome gradient_checks() {
  const auto t0 = Clock::now();
  Rng rng(6);
  std::vector<std::pair<std::string, double>> errs;
  {
    model::Linear<double> l(9, 6, rng);
    errs.emplace_back("linear", layer_gradient_error(l, random_tensor(rng, {4, 9}), true, 1));
  }
  {
    model::ReLU<double> l;
    errs.emplace_back("relu", layer_gradient_error(l, random_tensor(rng, {4, 12}), true, 2));
  }
  {
    model::Dropout<double> l(0.5, 3);
    errs.emplace_back("dropout", layer_gradient_error(l, random_tensor(rng, {4, 12}), true, 3, [&] { l.reseed(3); }));
  }
  {
    model::Conv2d<double> l(2, 3, rng);
    errs.emplace_back("conv2d", layer_gradient_error(l, random_tensor(rng, {2, 2, 6, 5}), true, 4));
  }
  {
    model::BatchNorm2d<double> l(3);
    errs.emplace_back("batchnorm(train)", layer_gradient_error(l, random_tensor(rng, {4, 3, 3, 3}), true, 5));
    errs.emplace_back("batchnorm(eval)", layer_gradient_error(l, random_tensor(rng, {4, 3, 3, 3}), false, 6));
  }
  {
    model::MaxPool2d<double> l(2, 2);
    errs.emplace_back("maxpool", layer_gradient_error(l, random_tensor(rng, {2, 2, 6, 7}), true, 7));
  }
  {
    model::AvgPool2d<double> l(2, 3);
    errs.emplace_back("avgpool", layer_gradient_error(l, random_tensor(rng, {2, 2, 6, 7}), true, 8));
  }
  {
    model::WidthMean<double> l;
    errs.emplace_back("widthmean", layer_gradient_error(l, random_tensor(rng, {2, 3, 4, 5}), true, 9));
  }
  // Losses and the logit-fusion weights.
  {
    const auto z = random_tensor(rng, {5, 9});
    const std::vector<int> y{0, 4, 8, 8, 2};
    const auto target = random_tensor(rng, {5, 9}).data;
    Tensor<double> dce, dmse;
    model::softmax_cross_entropy(z, y, &dce);
    model::mse_loss(z, target, &dmse);
    double ce = 0, mse = 0;
    for (int probe = 0; probe < 20; ++probe) {
      const auto i = rng.uniform_int(z.size());
      auto zp = z, zm = z;
      zp.data[i] += 1e-6;
      zm.data[i] -= 1e-6;
      ce = std::max(ce, rel_err(dce.data[i], (model::softmax_cross_entropy<double>(zp, y, nullptr) -
                                              model::softmax_cross_entropy<double>(zm, y, nullptr)) / 2e-6));
      mse = std::max(mse, rel_err(dmse.data[i], (model::mse_loss<double>(zp, target, nullptr) -
                                                 model::mse_loss<double>(zm, target, nullptr)) / 2e-6));
    }
    errs.emplace_back("cross-entropy", ce);
    errs.emplace_back("mse", mse);
  }
  {
    model::GestureClassifier<double> clf({{6, 4, 5}, model::Fusion::Logit, 8, 9, 0.0}, 3);
    std::vector<Tensor<double>> parts{random_tensor(rng, {4, 6}), random_tensor(rng, {4, 4}), random_tensor(rng, {4, 5})};
    const std::vector<int> y{1, 2, 8, 4};
    auto loss = [&] { return model::softmax_cross_entropy<double>(clf.forward(parts, true), y, nullptr); };
    auto& fw = clf.fusion_param();
    model::zero_grad(clf.params());
    Tensor<double> g;
    model::softmax_cross_entropy(clf.forward(parts, true), y, &g);
    clf.backward(g);
    const auto analytic = fw.grad;
    double worst = 0;
    for (int probe = 0; probe < 20; ++probe) {
      const auto k = rng.uniform_int(fw.value.size());
      const double keep = fw.value[k];
      fw.value[k] = keep + 1e-6;
      const double lp = loss();
      fw.value[k] = keep - 1e-6;
      const double lm = loss();
      fw.value[k] = keep;
      worst = std::max(worst, rel_err(analytic[k], (lp - lm) / 2e-6));
    }
    errs.emplace_back("fusion-weights", worst);
  }
  double worst = 0;
  std::string which;
  for (const auto& [name, e] : errs)
    if (e >= worst) worst = e, which = name;
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && secs < 60.0, std::to_string(errs.size()) + " checks, worst relative error " + fmt(worst * 1e6, 3) +
                                            "e-6 (" + which + "), " + fmt(secs, 2) + " s"};
}

// ---- 7

Outcome training_sanity() {
  Rng rng(77);
  TrainConfig cfg;
  model::FeatureTable sep;
  sep.parts.emplace_back(200, 32);
  for (int i = 0; i < 200; ++i) {
    const int y = i % 2 ? 3 : 8;
    sep.labels.push_back(y);
    for (int j = 0; j < 32; ++j) sep.parts[0].at(i, j) = static_cast<float>(rng.normal() + (y == 3 ? 1.5 : -1.5) * (j < 4));
  }
  model::GestureClassifier<float> a({{32}, model::Fusion::Single, 512, 9, cfg.dropout}, 1);
  const auto rep = model::train_classifier(a, sep, cfg, 2);

  auto shuffled = [&](int n) {
    model::FeatureTable t;
    t.parts.emplace_back(n, 24);
    for (int i = 0; i < n; ++i) {
      t.labels.push_back(static_cast<int>(rng.uniform_int(9)));
      for (int j = 0; j < 24; ++j) t.parts[0].at(i, j) = static_cast<float>(rng.normal());
    }
    return t;
  };
  const auto train = shuffled(900), held = shuffled(900);
  model::GestureClassifier<float> b({{24}, model::Fusion::Single, 512, 9, cfg.dropout}, 1);
  model::train_classifier(b, train, cfg, 3);
  const double acc = model::accuracy(model::predict(b, held), held.labels);
  const bool ok = rep.train_accuracy == 1.0 && rep.epochs <= 100 && std::abs(acc - 1.0 / 9) <= 0.08;
  return {ok, "separable: " + fmt(100 * rep.train_accuracy, 1) + "% train accuracy after " + std::to_string(rep.epochs) +
                  " epochs; shuffled: held-out " + fmt(100 * acc, 1) + "% (chance 11.1 +- 8)"};
}

// ---- 8

Outcome benchmark(const Settings& s) {
  using namespace harness;
  const auto t0 = Clock::now();
  auto log = [t0](const std::string& line) { std::cerr << "  [" << fmt(seconds_since(t0), 0) << " s] " << line << '\n'; };

  harness::EvalOptions opt;
  opt.seed = 8;
  opt.jobs = s.jobs;
  opt.log = log;

  // (a) mask, (b) default simulator, (c) reduced set: one 10-user dataset.
  log("simulating 10 users x 9 gestures x 10 commands");
  const auto data = simulate_analyzed(sim::default_plans(10, 8, 10), opt.cfg, s.jobs);
  Report report;
  report.seed = opt.seed;
  report.config_hash = opt.cfg.hash();
  report.grid = run_grid(data, opt);
  report.reduced = {reduced_gesture_eval(data, SensorCombo::ALL_4ch, {kG1, kG2, kG3}, opt)};

  bool mask_ok = true;
  const std::set<std::pair<int, int>> expected_cells{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 3}, {3, 0}, {3, 1}, {3, 2}, {3, 3},
                                            {3, 4}, {3, 5}, {4, 0}, {4, 1}, {4, 2}, {4, 3}, {4, 4}, {4, 5}};
  for (auto c : kAllCombos)
    for (auto sel : kAllSelectors) {
      const bool want = expected_cells.count({static_cast<int>(c), static_cast<int>(sel)}) == 1;
      mask_ok = mask_ok && is_valid(c, sel) == want && (find_cell(report.grid, c, sel) != nullptr) == want;
    }
  const double full = find_cell(report.grid, SensorCombo::ALL_4ch, ModelSelector::ALL_F)->mean_pct;
  const double reduced = report.reduced.front().mean_pct;

  // (b) confusable simulator: fusion must not lose to the best single modality.
  log("simulating the confusable setting");
  auto ccfg = opt.cfg;
  ccfg.sim.confusable = true;
  const auto cdata = simulate_analyzed(sim::default_plans(10, 8, 10), ccfg, s.jobs);
  const auto ccells = evaluate_combo(cdata, SensorCombo::ALL_4ch,
                                     {ModelSelector::V, ModelSelector::U, ModelSelector::I, ModelSelector::ALL_F}, opt);
  const double c_best_single = std::max({ccells[0].mean_pct, ccells[1].mean_pct, ccells[2].mean_pct});
  const double c_fused = ccells[3].mean_pct;
  const double secs = seconds_since(t0);

  if (!s.out.empty()) {
    write_report(s.out / "default", report);
    Report conf;
    conf.seed = opt.seed;
    conf.config_hash = ccfg.hash();
    conf.grid = ccells;
    write_report(s.out / "confusable", conf);
  }

  const bool ok = mask_ok && full >= 90.0 && c_fused >= c_best_single - 2.0 && reduced >= 95.0 && secs <= 1800.0;
  return {ok, std::string("mask ") + (mask_ok ? "matches" : "differs") + "; ALL-4ch/ALL-F " + fmt(full, 1) +
                  "% (>= 90); confusable ALL-F " + fmt(c_fused, 1) + "% vs best single " + fmt(c_best_single, 1) +
                  "% (V " + fmt(ccells[0].mean_pct, 1) + ", U " + fmt(ccells[1].mean_pct, 1) + ", I " +
                  fmt(ccells[2].mean_pct, 1) + "); G1+G2+G3+E " + fmt(reduced, 1) + "% (>= 95); " + fmt(secs / 60, 1) +
                  " min on " + std::to_string(s.jobs) + " worker(s) (limit 30 min)"};
}

// ---- 9

Outcome schedule_exactness() {
  const double lr0 = 0.01;
  double worst = 0;
  for (int n : {1, 5, 10, 11, 30}) {
    const double want = n <= 10 ? 0.1 * n * lr0 : std::pow(0.97, n - 10) * lr0;
    worst = std::max(worst, std::abs(model::lr_at(n, lr0) - want) / want);
  }
  return {worst <= 1e-12, "max relative error " + fmt(worst * 1e15, 3) + "e-15 over n = 1, 5, 10, 11, 30"};
}

// ---- 10

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism(const Settings& s) {
  const auto t0 = Clock::now();
  const fs::path root = fs::temp_directory_path() / "vahf_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  // The CLI end to end, twice: simulate to disk, load, evaluate, report.
  // Worker counts differ on purpose; results must not depend on them.
  std::string reports[2];
  for (int run = 0; run < 2; ++run) {
    const auto dir = root / ("run" + std::to_string(run));
    const std::string cli = VAHF_CLI_PATH;
    const std::string jobs = std::to_string(run == 0 ? 1 : std::max(2, s.jobs));
    const std::string common = " --quiet --seed 10 --jobs " + jobs;
    const std::string sim_cmd = cli + common + " simulate --users 3 --commands 2 --out " + (dir / "data").string() + " > /dev/null";
    const std::string eval_cmd = cli + common + " eval --grid --reduced --ablation --data " + (dir / "data").string() +
                                 " --out " + (dir / "report").string() + " > " + (dir / "stdout.txt").string();
    if (std::system(sim_cmd.c_str()) != 0 || std::system(eval_cmd.c_str()) != 0)
      return {false, "pipeline run " + std::to_string(run + 1) + " failed"};
    reports[run] = slurp(dir / "report" / "report.json");
  }
  const double secs = seconds_since(t0);
  const bool same = !reports[0].empty() && reports[0] == reports[1];
  return {same, std::string(same ? "byte-identical" : "different") + " report.json (" + std::to_string(reports[0].size()) +
                    " bytes) from two CLI runs, " + fmt(secs, 1) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string only;
  Settings s;
  s.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out;
  app.add_option("--only", only, "Comma-separated criterion numbers");
  app.add_option("--jobs", s.jobs, "Worker threads for the benchmark")->capture_default_str();
  app.add_option("--out", out, "Directory for benchmark reports");
  CLI11_PARSE(app, argc, argv);
  s.out = out;

  std::set<int> pick;
  if (!only.empty()) {
    std::stringstream ss(only);
    std::string item;
    while (std::getline(ss, item, ',')) pick.insert(std::stoi(item));
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"DSP oracle equivalence", dtw_oracle},
      {"Filter correctness", filter_correctness},
      {"FMCW delay recovery", fmcw_delay},
      {"Preprocessing recovery", preprocessing_recovery},
      {"Feature contracts", feature_contracts},
      {"Gradient checks", gradient_checks},
      {"Training sanity", training_sanity},
      {"End-to-end synthetic benchmark", [&] { return benchmark(s); }},
      {"Schedule exactness", schedule_exactness},
      {"Determinism", [&] { return determinism(s); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << criteria[i].first << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
