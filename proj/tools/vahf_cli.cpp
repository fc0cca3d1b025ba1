#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "vahf/common/config.hpp"
#include "vahf/common/error.hpp"
#include "vahf/harness/dataset.hpp"
#include "vahf/harness/evaluation.hpp"
#include "vahf/harness/report.hpp"
#include "vahf/sim/session.hpp"

namespace fs = std::filesystem;
using namespace vahf;
using namespace vahf::harness;

namespace {

constexpr int kExitUsage = 2;

struct Globals {
  std::uint64_t seed = 1;
  std::string config;
  std::string out;
  std::string data;
  int jobs = 0;
  bool quiet = false;
};

std::string default_data_root() {
  if (const char* env = std::getenv("VAHF_DATASET_ROOT"); env && *env) return env;
  return "data";
}

Config load_config(const Globals& g) { return g.config.empty() ? Config{} : Config::load(g.config); }

int jobs_of(const Globals& g) {
  if (g.jobs > 0) return g.jobs;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

EvalOptions eval_options(const Globals& g, const Config& cfg) {
  EvalOptions o;
  o.cfg = cfg;
  o.seed = g.seed;
  o.jobs = jobs_of(g);
  if (!g.quiet) o.log = [](const std::string& line) { std::cerr << line << '\n'; };
  return o;
}

// Raw sessions get analysed; a missing root is a usage error.
Dataset load_dataset(const Globals& g, const Config& cfg) {
  const fs::path root = g.data.empty() ? default_data_root() : g.data;
  if (!g.quiet) std::cerr << "loading " << root.string() << '\n';
  return load_analyzed(root, cfg, jobs_of(g));
}

fs::path out_or(const Globals& g, const char* fallback) { return g.out.empty() ? fs::path(fallback) : fs::path(g.out); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voice-accompanying hand-to-face gesture pipeline: simulate, preprocess, extract, train, evaluate."};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--config", g.config, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--data", g.data, "Dataset root (default: $VAHF_DATASET_ROOT or ./data)");
  app.add_option("--jobs", g.jobs, "Worker threads (default: all cores)");
  app.add_flag("--quiet", g.quiet, "No progress on stderr");

  auto* sim = app.add_subcommand("simulate", "Write a synthetic dataset");
  int users = 10, commands = 10;
  bool confusable = false;
  sim->add_option("--users", users, "Number of users")->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--commands", commands, "Utterances per session (1-20)")->capture_default_str()->check(CLI::Range(1, 20));
  sim->add_flag("--confusable", confusable, "Pull every gesture toward the empty one");

  auto* pre = app.add_subcommand("preprocess", "Segment raw sessions into per-utterance samples");

  auto* feat = app.add_subcommand("features", "Export feature bundles for a sensor combination");
  std::string combo_name = "ALL-4ch", selector_name = "ALL-F";
  feat->add_option("--combo", combo_name, "Sensor combination")->capture_default_str();

  auto* train = app.add_subcommand("train", "Train one model on the whole dataset and save checkpoints");
  train->add_option("--combo", combo_name, "Sensor combination")->capture_default_str();
  train->add_option("--selector", selector_name, "Model setting (V, U, I, V+U, ALL-L, ALL-F)")->capture_default_str();

  auto* eval = app.add_subcommand("eval", "Leave-one-user-out evaluation");
  bool grid = false, reduced = false, ablation = false;
  eval->add_flag("--grid", grid, "All valid sensor x model cells");
  eval->add_flag("--reduced", reduced, "Reduced gesture sets");
  eval->add_flag("--ablation", ablation, "Ablation rows");
  eval->add_option("--combo", combo_name, "Combination for --reduced / --ablation")->capture_default_str();
  eval->add_option("--selector", selector_name, "Model setting for --ablation")->capture_default_str();

  auto* rep = app.add_subcommand("report", "Re-render report.csv and confusion.txt from a report.json");
  std::string report_in;
  rep->add_option("report", report_in, "report.json")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    Config cfg = load_config(g);
    if (sim->parsed()) {
      if (confusable) cfg.sim.confusable = true;
      const fs::path root = g.out.empty() ? default_data_root() : g.out;
      simulate_dataset(root, sim::default_plans(users, g.seed, commands), cfg, jobs_of(g));
      std::cout << "wrote " << users * kNumLabels << " sessions to " << root.string() << '\n';
    } else if (pre->parsed()) {
      const fs::path root = g.data.empty() ? default_data_root() : g.data;
      const auto out = out_or(g, "samples");
      int n = 0;
      for (const auto& dir : list_sessions(root)) {
        const auto raw = read_session(dir);
        const auto samples = preprocess_session(raw, cfg);
        for (std::size_t i = 0; i < samples.size(); ++i) {
          write_sample(out / dir.parent_path().filename() / dir.filename() / ("utt_" + std::to_string(i)), samples[i]);
          ++n;
        }
      }
      std::cout << "wrote " << n << " samples to " << out.string() << '\n';
    } else if (feat->parsed()) {
      const auto data = load_dataset(g, cfg);
      const auto out = out_or(g, "features");
      const int n = export_features(data, parse_combo(combo_name), eval_options(g, cfg), out);
      std::cout << "wrote " << n << " bundles to " << out.string() << '\n';
    } else if (train->parsed()) {
      const auto combo = parse_combo(combo_name);
      const auto sel = parse_selector(selector_name);
      require_valid(combo, sel);
      const auto data = load_dataset(g, cfg);
      const auto out = out_or(g, "model");
      const auto s = train_and_save(data, combo, sel, eval_options(g, cfg), out);
      std::cout << "trained " << combo_name << "/" << selector_name << ": " << s.epochs << " epochs, train accuracy "
                << 100.0 * s.train_accuracy << "%, checkpoints in " << out.string() << '\n';
    } else if (eval->parsed()) {
      if (!grid && !reduced && !ablation) grid = true;
      const auto combo = parse_combo(combo_name);
      const auto sel = parse_selector(selector_name);
      if (ablation) require_valid(combo, sel);
      const auto data = load_dataset(g, cfg);
      const auto opt = eval_options(g, cfg);
      Report r;
      r.seed = g.seed;
      r.config_hash = cfg.hash();
      if (grid) r.grid = run_grid(data, opt);
      if (reduced) r.reduced = reduced_table(data, {combo}, opt);
      if (ablation) r.ablation = ablation_run(data, combo, sel, opt);
      const auto out = out_or(g, "report");
      write_report(out, r);
      std::cout << render_summary(r);
      std::cout << "report written to " << out.string() << '\n';
    } else if (rep->parsed()) {
      const auto r = read_report(report_in);
      const auto out = g.out.empty() ? fs::path(report_in).parent_path() : fs::path(g.out);
      write_report(out, r);
      std::cout << render_text(r);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.code() == "dataset-missing") {
      std::cerr << "\n" << app.help();
      return kExitUsage;
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
