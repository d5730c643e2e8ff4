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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "facl/augment.hpp"
#include "facl/config.hpp"
#include "facl/corpus.hpp"
#include "facl/eval.hpp"
#include "facl/trainer.hpp"

namespace facl {

namespace fs = std::filesystem;

// A split plus the training-derived statistics every stage needs.
struct PreparedData {
  Corpus full;  // filtered and truncated, before splitting
  Split split;
  FrequencyTable freq;
  CorpusStats stats;

  explicit PreparedData(Corpus full);
};

// k-core filter, suffix truncation and leave-one-out split. Throws
// Error(kEmptyResult) when the filter leaves nothing.
PreparedData prepare_corpus(const Corpus& raw, std::size_t min_count, std::size_t max_len);

// Writes train.txt, valid.txt, test.txt (input items followed by the
// target), items.txt (dense index -> original id) and stats.json.
void write_prepared(const PreparedData& data, const fs::path& dir);
PreparedData load_prepared(const fs::path& dir);

std::string stats_json(const PreparedData& data);

// Training and evaluation entirely in memory.
struct RunOutcome {
  FitResult fit;
  CorrelationIndex corr;
  std::vector<std::size_t> test_ranks;
  EvalReport test;
};

RunOutcome run_experiment(const PreparedData& data, const ExperimentConfig& cfg,
                          const EpochCallback& on_epoch = {});

// <root>/<config hash>-s<seed>.
fs::path run_directory(const fs::path& root, const ExperimentConfig& cfg);
// FACL_OUTPUT_ROOT if set, otherwise "runs".
fs::path default_output_root();

// Trains and writes config.cfg, train_log.jsonl, best.ckpt, final.ckpt,
// BEST, lambda_hist.csv, correlation.idx and audit.csv into run_dir.
FitResult train_to_directory(const PreparedData& data, const ExperimentConfig& cfg,
                             const fs::path& run_dir, std::ostream* progress = nullptr);

// Scores the best checkpoint of run_dir on the test split and writes
// metrics.json and bins.csv.
EvalReport evaluate_directory(const PreparedData& data, const fs::path& run_dir);

void write_metrics_json(const EvalReport& report, const fs::path& path);
void write_bins_csv(const EvalReport& report, const fs::path& path);
void write_audit_csv(const std::vector<AuditRow>& rows, std::ostream& out);

// Grid over config keys; each cell trains and evaluates in its own run
// directory. Rows already present in <out_root>/sweep.csv are skipped.
struct SweepRow {
  std::vector<std::string> values;
  std::string status;  // "ok" or "failed: ..."
  double hr10 = 0.0;
  double ndcg10 = 0.0;
  std::string run_dir;
};

std::vector<SweepRow> run_sweep(const PreparedData& data, const ExperimentConfig& base,
                                const std::vector<std::pair<std::string, std::vector<std::string>>>& grid,
                                const fs::path& out_root, std::ostream* progress = nullptr);

// Files `report` needs in a run directory.
std::vector<std::string> required_report_files();

// Prints a summary of run_dir and writes summary.csv there. Throws
// Error(kMissingArtifacts) listing absent files.
void write_report(const fs::path& run_dir, std::ostream& out);

}  // namespace facl
