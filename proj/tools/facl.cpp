// Copyright 2026 The FACL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "facl/checkpoint.hpp"
#include "facl/config.hpp"
#include "facl/eval.hpp"
#include "facl/pipeline.hpp"
#include "facl/reweight.hpp"
#include "facl/synth.hpp"

namespace {

using namespace facl;

// Config file plus --set key=value overrides, shared by several commands.
struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", path, "Config file (key = value lines)");
    cmd->add_option("--set", overrides, "Override one key, e.g. --set gamma=0.2");
  }

  ExperimentConfig load() const {
    ExperimentConfig cfg = path.empty() ? default_config() : load_config(path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorCode::kConfig, "--set expects key=value, got '" + kv + "'");
      set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path);
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Frequency-aware adaptive contrastive learning for sequential recommendation"};
  app.require_subcommand(1);

  // prepare
  auto* prepare = app.add_subcommand("prepare", "Filter, truncate and split a raw interaction file");
  std::string raw_path, prepared_dir;
  ConfigArgs prepare_cfg;
  prepare->add_option("--input", raw_path, "Raw interactions, user<TAB>items")->required();
  prepare->add_option("--out", prepared_dir, "Output directory")->required();
  prepare_cfg.attach(prepare);

  // stats
  auto* stats = app.add_subcommand("stats", "Corpus statistics of prepared data");
  std::string stats_dir, lambda_hist;
  ConfigArgs stats_cfg;
  stats->add_option("--data", stats_dir, "Prepared data directory")->required();
  stats->add_option("--lambda-hist", lambda_hist, "Write the sequence-weight histogram CSV here");
  stats_cfg.attach(stats);

  // gen-synth
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic long-tail corpus");
  SyntheticSpec spec;
  std::string synth_out;
  gen->add_option("--out", synth_out, "Output interaction file")->required();
  gen->add_option("--users", spec.num_users, "Number of users")->capture_default_str();
  gen->add_option("--items", spec.num_items, "Catalog size")->capture_default_str();
  gen->add_option("--zipf", spec.zipf_exponent, "Zipf exponent")->capture_default_str();
  gen->add_option("--min-len", spec.min_len, "Minimum sequence length")->capture_default_str();
  gen->add_option("--max-len", spec.max_len, "Maximum sequence length")->capture_default_str();
  gen->add_option("--favored-count", spec.favored_count, "Favoured items per user")
      ->capture_default_str();
  gen->add_option("--favored-prob", spec.favored_prob, "Probability of a favoured pick")
      ->capture_default_str();
  gen->add_option("--seed", spec.seed, "Random seed")->capture_default_str();

  // audit-aug
  auto* audit = app.add_subcommand("audit-aug", "Per-bin perturbation audit of the item operators");
  std::string audit_dir, audit_out, audit_policy;
  std::size_t audit_trials = 100000;
  std::uint64_t audit_seed = 0;
  ConfigArgs audit_cfg;
  audit->add_option("--data", audit_dir, "Prepared data directory")->required();
  audit->add_option("--policy", audit_policy, "adaptive or uniform (default: from config)");
  audit->add_option("--trials", audit_trials, "Sampled sequences per operator")
      ->capture_default_str();
  audit->add_option("--seed", audit_seed, "Random seed")->capture_default_str();
  audit->add_option("--out", audit_out, "CSV output (default: stdout)");
  audit_cfg.attach(audit);

  // train
  auto* train = app.add_subcommand("train", "Train a model and write a run directory");
  std::string train_dir, out_root;
  std::int64_t train_seed = -1;
  ConfigArgs train_cfg;
  train->add_option("--data", train_dir, "Prepared data directory")->required();
  train->add_option("--seed", train_seed, "Random seed (overrides the config)");
  train->add_option("--out-dir", out_root, "Output root (default: $FACL_OUTPUT_ROOT or runs)");
  train_cfg.attach(train);

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a run's best checkpoint on the test split");
  std::string eval_data, eval_run;
  eval->add_option("--data", eval_data, "Prepared data directory")->required();
  eval->add_option("--run", eval_run, "Run directory")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Grid of train + eval runs");
  std::string sweep_data, sweep_root;
  std::vector<std::string> grid_args;
  ConfigArgs sweep_cfg;
  sweep->add_option("--data", sweep_data, "Prepared data directory")->required();
  sweep->add_option("--grid", grid_args, "Axis as key=v1,v2,... (repeatable)")->required();
  sweep->add_option("--out-dir", sweep_root, "Output root (default: $FACL_OUTPUT_ROOT or runs)");
  sweep_cfg.attach(sweep);

  // report
  auto* report = app.add_subcommand("report", "Summarise a run directory");
  std::string report_run;
  report->add_option("--run", report_run, "Run directory")->required();

  // checkpoint inspect
  auto* ckpt = app.add_subcommand("checkpoint", "Checkpoint utilities");
  ckpt->require_subcommand(1);
  auto* inspect = ckpt->add_subcommand("inspect", "Print tensor shapes and norms");
  std::string ckpt_path;
  inspect->add_option("path", ckpt_path, "Checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[E_USAGE]: " << e.what() << '\n';
    return 2;
  }

  if (*prepare) {
    const ExperimentConfig cfg = prepare_cfg.load();
    const PreparedData data =
        prepare_corpus(read_interactions(raw_path), cfg.min_count, cfg.run.model.max_len);
    write_prepared(data, prepared_dir);
    std::cout << stats_json(data) << '\n';
  } else if (*stats) {
    const PreparedData data = load_prepared(stats_dir);
    std::cout << stats_json(data) << '\n';
    if (!lambda_hist.empty()) {
      const ExperimentConfig cfg = stats_cfg.load();
      const auto examples =
          training_examples(data.split.train, cfg.run.train.all_prefixes, cfg.run.model.max_len);
      std::vector<Sequence> inputs;
      for (const auto& ex : examples) inputs.push_back(ex.input);
      const auto w = batch_weights(inputs, data.freq, data.stats, cfg.run.reweight);
      auto out = open_out(lambda_hist);
      out << "weight_bucket,count\n";
      for (const auto& b : weight_histogram(w)) out << b.lower << '-' << b.upper << ',' << b.count << '\n';
    }
  } else if (*gen) {
    const Corpus corpus = generate_synthetic(spec);
    auto out = open_out(synth_out);
    write_interactions(out, corpus);
  } else if (*audit) {
    ExperimentConfig cfg = audit_cfg.load();
    if (!audit_policy.empty()) cfg.run.augment.policy = parse_augment_policy(audit_policy);
    cfg.run.augment.validate();
    const PreparedData data = load_prepared(audit_dir);
    const CorrelationIndex corr = build_correlation_index(data.split.train, cfg.run.augment);
    const auto rows = perturb_audit(data.split.train, data.freq, data.stats, corr,
                                    default_item_bins(data.freq), cfg.run.augment, audit_trials,
                                    audit_seed);
    if (audit_out.empty()) {
      write_audit_csv(rows, std::cout);
    } else {
      auto out = open_out(audit_out);
      write_audit_csv(rows, out);
    }
  } else if (*train) {
    ExperimentConfig cfg = train_cfg.load();
    if (train_seed >= 0) cfg.run.train.seed = static_cast<std::uint64_t>(train_seed);
    const PreparedData data = load_prepared(train_dir);
    cfg.run.model.num_items = data.full.num_items();
    const fs::path root = out_root.empty() ? default_output_root() : fs::path(out_root);
    const fs::path dir = run_directory(root, cfg);
    const FitResult result = train_to_directory(data, cfg, dir, &std::cerr);
    std::cout << dir.string() << '\n';
    std::cerr << "best epoch " << result.best_epoch << " of " << result.history.size() << '\n';
  } else if (*eval) {
    const PreparedData data = load_prepared(eval_data);
    const EvalReport r = evaluate_directory(data, eval_run);
    for (const auto& m : r.overall)
      std::cout << "HR@" << m.k << ' ' << m.hr << "  NDCG@" << m.k << ' ' << m.ndcg << '\n';
  } else if (*sweep) {
    const ExperimentConfig cfg = sweep_cfg.load();
    std::vector<std::pair<std::string, std::vector<std::string>>> grid;
    for (const auto& g : grid_args) {
      const auto eq = g.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorCode::kConfig, "--grid expects key=v1,v2,..., got '" + g + "'");
      std::vector<std::string> values;
      std::stringstream ss(g.substr(eq + 1));
      std::string v;
      while (std::getline(ss, v, ',')) values.push_back(v);
      grid.emplace_back(g.substr(0, eq), std::move(values));
    }
    const PreparedData data = load_prepared(sweep_data);
    const fs::path root = sweep_root.empty() ? default_output_root() : fs::path(sweep_root);
    const auto rows = run_sweep(data, cfg, grid, root, &std::cerr);
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.status != "ok";
    std::cout << (root / "sweep.csv").string() << '\n';
    if (failed > 0) std::cerr << failed << " of " << rows.size() << " cells failed\n";
  } else if (*report) {
    write_report(report_run, std::cout);
  } else if (*inspect) {
    const Checkpoint c = load_checkpoint(ckpt_path);
    std::size_t total = 0;
    for (const auto& t : summarize(c.params)) {
      std::cout << t.name << '\t' << t.rows << 'x' << t.cols << "\tnorm " << t.norm << '\n';
      total += static_cast<std::size_t>(t.rows * t.cols);
    }
    std::cout << "parameters\t" << total << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const facl::Error& e) {
    std::cerr << "error[" << facl::error_tag(e.code()) << "]: " << e.what() << '\n';
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error[E_IO]: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error[E_INTERNAL]: " << e.what() << '\n';
  }
  return 1;
}
