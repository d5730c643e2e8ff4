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

#include "facl/pipeline.hpp"

#include <array>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "facl/checkpoint.hpp"
#include "facl/reweight.hpp"

namespace facl {

using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path.string());
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_examples(std::ostream& out, const Corpus& train,
                    std::span<const LabeledExample> examples) {
  for (const auto& ex : examples) {
    out << train.sequences[ex.user].user << '\t';
    for (ItemIndex v : ex.input) out << train.item_ids[static_cast<std::size_t>(v)] << ' ';
    out << train.item_ids[static_cast<std::size_t>(ex.target)] << '\n';
  }
}

bool same_sequences(const Corpus& a, const Corpus& b) {
  if (a.num_users() != b.num_users()) return false;
  for (std::size_t u = 0; u < a.num_users(); ++u) {
    const auto& x = a.sequences[u];
    const auto& y = b.sequences[u];
    if (x.user != y.user || x.items.size() != y.items.size()) return false;
    for (std::size_t i = 0; i < x.items.size(); ++i)
      if (a.item_ids[static_cast<std::size_t>(x.items[i])] !=
          b.item_ids[static_cast<std::size_t>(y.items[i])])
        return false;
  }
  return true;
}

std::string fixed(double x, int digits = 6) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << x;
  return ss.str();
}

}  // namespace

PreparedData::PreparedData(Corpus full_corpus)
    : full(std::move(full_corpus)), split(leave_one_out_split(full)) {
  if (split.train.empty())
    throw Error(ErrorCode::kEmptyResult, "no user has the three interactions a split needs");
  freq = build_frequency_table(split.train);
  stats = corpus_stats(split.train, freq);
}

PreparedData prepare_corpus(const Corpus& raw, std::size_t min_count, std::size_t max_len) {
  FilterOutcome filtered = apply_five_core_filter(raw, min_count);
  if (filtered.status == FilterStatus::kEmpty)
    throw Error(ErrorCode::kEmptyResult,
                "k-core filtering with min_count " + std::to_string(min_count) +
                    " left an empty corpus");
  return PreparedData(truncate_sequences(filtered.corpus, max_len));
}

std::string stats_json(const PreparedData& data) {
  json j;
  j["global_avg_frequency"] = data.stats.global_avg_frequency;
  j["global_avg_length"] = data.stats.global_avg_length;
  j["num_users"] = data.split.train.num_users();
  j["num_items"] = data.freq.vocabulary_size();
  j["excluded_users"] = data.split.excluded_users;
  return j.dump(2);
}

void write_prepared(const PreparedData& data, const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "train.txt");
    write_interactions(out, data.split.train);
  }
  {
    auto out = open_out(dir / "valid.txt");
    write_examples(out, data.split.train, data.split.valid);
  }
  {
    auto out = open_out(dir / "test.txt");
    write_examples(out, data.split.train, data.split.test);
  }
  {
    auto out = open_out(dir / "items.txt");
    for (std::size_t i = 0; i < data.full.item_ids.size(); ++i)
      out << i << '\t' << data.full.item_ids[i] << '\n';
  }
  auto out = open_out(dir / "stats.json");
  out << stats_json(data) << '\n';
}

PreparedData load_prepared(const fs::path& dir) {
  for (const char* name : {"train.txt", "test.txt", "items.txt"})
    if (!fs::exists(dir / name))
      throw Error(ErrorCode::kMissingArtifacts,
                  "prepared data directory " + dir.string() + " lacks " + name);
  // test.txt holds every full sequence; re-splitting it restores all parts.
  Corpus full = parse_interactions(read_file(dir / "test.txt"));

  std::vector<std::int64_t> catalog;
  std::istringstream items(read_file(dir / "items.txt"));
  std::string line;
  while (std::getline(items, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(ErrorCode::kFormat, "malformed items.txt");
    catalog.push_back(std::stoll(line.substr(tab + 1)));
  }
  std::unordered_map<std::int64_t, ItemIndex> dense;
  for (std::size_t i = 0; i < catalog.size(); ++i)
    dense.emplace(catalog[i], static_cast<ItemIndex>(i));
  for (auto& s : full.sequences)
    for (auto& v : s.items) {
      const auto it = dense.find(full.item_ids[static_cast<std::size_t>(v)]);
      if (it == dense.end())
        throw Error(ErrorCode::kFormat, "test.txt references an item missing from items.txt");
      v = it->second;
    }
  full.item_ids = std::move(catalog);

  PreparedData data(std::move(full));
  const Corpus train = parse_interactions(read_file(dir / "train.txt"));
  if (!same_sequences(train, data.split.train))
    throw Error(ErrorCode::kFormat, "train.txt disagrees with test.txt in " + dir.string());
  return data;
}

RunOutcome run_experiment(const PreparedData& data, const ExperimentConfig& cfg,
                          const EpochCallback& on_epoch) {
  ExperimentConfig c = cfg;
  c.run.model.num_items = data.full.num_items();
  c.validate();
  RunOutcome out;
  out.corr = build_correlation_index(data.split.train, c.run.augment);
  const TrainingData td(data.split, data.freq, data.stats, out.corr, c.run);
  out.fit = fit(td, c.run, on_epoch);
  out.test_ranks = rank_examples<double>(data.split.test, out.fit.best, c.run.model);
  out.test = binned_metrics(out.test_ranks, data.split.test, data.split.train,
                            default_item_bins(data.freq), default_user_bins(data.split.train));
  return out;
}

fs::path run_directory(const fs::path& root, const ExperimentConfig& cfg) {
  return root / (config_hash(cfg) + "-s" + std::to_string(cfg.run.train.seed));
}

fs::path default_output_root() {
  const char* env = std::getenv("FACL_OUTPUT_ROOT");
  return env && *env ? fs::path(env) : fs::path("runs");
}

FitResult train_to_directory(const PreparedData& data, const ExperimentConfig& cfg,
                             const fs::path& run_dir, std::ostream* progress) {
  ExperimentConfig c = cfg;
  c.run.model.num_items = data.full.num_items();
  c.validate();
  fs::create_directories(run_dir);
  {
    auto out = open_out(run_dir / "config.cfg");
    out << format_config(c);
  }
  const CorrelationIndex corr = build_correlation_index(data.split.train, c.run.augment);
  {
    auto out = open_out(run_dir / "correlation.idx");
    corr.save(out);
  }
  const TrainingData td(data.split, data.freq, data.stats, corr, c.run);
  {
    std::vector<Sequence> inputs;
    for (const auto& ex : td.examples) inputs.push_back(ex.input);
    const auto w = batch_weights(inputs, data.freq, data.stats, c.run.reweight);
    auto out = open_out(run_dir / "lambda_hist.csv");
    out << "weight_bucket,count\n";
    for (const auto& b : weight_histogram(w))
      out << fixed(b.lower) << '-' << fixed(b.upper) << ',' << b.count << '\n';
  }
  {
    auto out = open_out(run_dir / "audit.csv");
    write_audit_csv(perturb_audit(data.split.train, data.freq, data.stats, corr,
                                  default_item_bins(data.freq), c.run.augment, 10000,
                                  c.run.train.seed),
                    out);
  }

  auto log = open_out(run_dir / "train_log.jsonl");
  const FitResult result = fit(td, c.run, [&](const EpochStats& s) {
    json j;
    j["epoch"] = s.epoch;
    j["rec_loss"] = s.rec_loss;
    j["cl_loss"] = s.cl_loss;
    j["total"] = s.total;
    j["mean_lambda"] = s.mean_lambda;
    j["valid_ndcg10"] = s.valid_ndcg10.value_or(0.0);
    j["seconds"] = s.seconds;
    log << j.dump() << '\n' << std::flush;
    if (progress)
      *progress << "epoch " << s.epoch << " total " << fixed(s.total, 4) << " valid NDCG@10 "
                << fixed(s.valid_ndcg10.value_or(0.0), 4) << " (" << fixed(s.seconds, 1)
                << "s)\n";
  });
  const std::string header = format_config(c);
  save_checkpoint((run_dir / "best.ckpt").string(), {header, result.best});
  save_checkpoint((run_dir / "final.ckpt").string(), {header, result.final_params});
  auto best = open_out(run_dir / "BEST");
  best << "best.ckpt epoch " << result.best_epoch << " valid_ndcg10 "
       << json(result.best_ndcg10).dump() << '\n';
  return result;
}

EvalReport evaluate_directory(const PreparedData& data, const fs::path& run_dir) {
  for (const char* name : {"config.cfg", "best.ckpt"})
    if (!fs::exists(run_dir / name))
      throw Error(ErrorCode::kMissingArtifacts, "run directory lacks " + std::string(name));
  const ExperimentConfig cfg = load_config((run_dir / "config.cfg").string());
  const Checkpoint ckpt = load_checkpoint((run_dir / "best.ckpt").string());
  if (static_cast<std::size_t>(ckpt.params.item_embeddings.rows()) != data.full.num_items())
    throw Error(ErrorCode::kFormat, "checkpoint catalog size differs from the data");
  const auto ranks = rank_examples<double>(data.split.test, ckpt.params, cfg.run.model);
  EvalReport report = binned_metrics(ranks, data.split.test, data.split.train,
                                     default_item_bins(data.freq),
                                     default_user_bins(data.split.train));
  write_metrics_json(report, run_dir / "metrics.json");
  write_bins_csv(report, run_dir / "bins.csv");
  return report;
}

void write_metrics_json(const EvalReport& report, const fs::path& path) {
  json j;
  j["num_examples"] = report.num_examples;
  for (const auto& m : report.overall) {
    j["HR@" + std::to_string(m.k)] = m.hr;
    j["NDCG@" + std::to_string(m.k)] = m.ndcg;
  }
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_bins_csv(const EvalReport& report, const fs::path& path) {
  auto out = open_out(path);
  out << "bin_kind,bin_label,metric,value,count\n";
  auto value = [](const std::optional<double>& v) { return v ? json(*v).dump() : std::string(); };
  for (const auto& b : report.bins) {
    out << b.kind << ',' << b.label << ",HR@10," << value(b.hr10) << ',' << b.count << '\n';
    out << b.kind << ',' << b.label << ",NDCG@10," << value(b.ndcg10) << ',' << b.count << '\n';
  }
}

void write_audit_csv(const std::vector<AuditRow>& rows, std::ostream& out) {
  out << "bin_label,operator,expected_perturb_rate,observed_perturb_rate,trials\n";
  for (const auto& r : rows)
    out << r.bin_label << ',' << r.op << ',' << fixed(r.expected_rate) << ','
        << fixed(r.observed_rate) << ',' << r.trials << '\n';
}

std::vector<SweepRow> run_sweep(
    const PreparedData& data, const ExperimentConfig& base,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& grid,
    const fs::path& out_root, std::ostream* progress) {
  for (const auto& [key, values] : grid) {
    get_config_value(base, key);  // rejects unknown keys up front
    if (values.empty()) throw Error(ErrorCode::kConfig, "sweep axis '" + key + "' has no values");
  }
  fs::create_directories(out_root);
  const fs::path csv = out_root / "sweep.csv";

  // Completed cells from a previous invocation, keyed by their values.
  std::map<std::vector<std::string>, SweepRow> done;
  if (fs::exists(csv)) {
    std::istringstream in(read_file(csv));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::vector<std::string> fields;
      std::stringstream ls(line);
      std::string f;
      while (std::getline(ls, f, ',')) fields.push_back(f);
      if (fields.size() != grid.size() + 4) continue;
      SweepRow row;
      row.values.assign(fields.begin(), fields.begin() + static_cast<std::ptrdiff_t>(grid.size()));
      row.hr10 = std::stod(fields[grid.size()]);
      row.ndcg10 = std::stod(fields[grid.size() + 1]);
      row.status = fields[grid.size() + 2];
      row.run_dir = fields[grid.size() + 3];
      if (row.status == "ok") done.emplace(row.values, row);
    }
  }

  std::vector<SweepRow> rows;
  auto flush = [&] {
    auto out = open_out(csv);
    for (const auto& [key, values] : grid) out << key << ',';
    out << "HR@10,NDCG@10,status,run_dir\n";
    for (const auto& r : rows) {
      for (const auto& v : r.values) out << v << ',';
      out << json(r.hr10).dump() << ',' << json(r.ndcg10).dump() << ',' << r.status << ','
          << r.run_dir << '\n';
    }
  };

  std::vector<std::size_t> idx(grid.size(), 0);
  while (true) {
    SweepRow row;
    ExperimentConfig cfg = base;
    for (std::size_t a = 0; a < grid.size(); ++a) row.values.push_back(grid[a].second[idx[a]]);
    if (auto it = done.find(row.values); it != done.end()) {
      rows.push_back(it->second);
      if (progress) *progress << "skip completed cell " << it->second.run_dir << '\n';
    } else {
      try {
        for (std::size_t a = 0; a < grid.size(); ++a)
          set_config_value(cfg, grid[a].first, row.values[a]);
        cfg.run.model.num_items = data.full.num_items();
        const fs::path dir = run_directory(out_root, cfg);
        row.run_dir = dir.filename().string();
        train_to_directory(data, cfg, dir, progress);
        const EvalReport report = evaluate_directory(data, dir);
        row.hr10 = report.at(10).hr;
        row.ndcg10 = report.at(10).ndcg;
        row.status = "ok";
      } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& ch : msg)
          if (ch == ',' || ch == '\n') ch = ';';
        row.status = "failed: " + msg;
      }
      rows.push_back(row);
    }
    flush();
    std::size_t a = 0;
    for (; a < grid.size(); ++a) {
      if (++idx[a] < grid[a].second.size()) break;
      idx[a] = 0;
    }
    if (a == grid.size()) break;
  }
  return rows;
}

std::vector<std::string> required_report_files() {
  return {"config.cfg", "train_log.jsonl", "metrics.json", "bins.csv"};
}

void write_report(const fs::path& run_dir, std::ostream& out) {
  std::vector<std::string> missing;
  for (const auto& name : required_report_files())
    if (!fs::exists(run_dir / name)) missing.push_back(name);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorCode::kMissingArtifacts,
                "run directory " + run_dir.string() + " lacks: " + list);
  }

  std::vector<std::array<std::string, 3>> summary;  // section, key, value
  auto emit = [&](const std::string& section, const std::string& key, const std::string& value) {
    summary.push_back({section, key, value});
  };

  const ExperimentConfig cfg = load_config((run_dir / "config.cfg").string());
  out << "run " << run_dir.filename().string() << "  (config " << config_hash(cfg) << ", seed "
      << cfg.run.train.seed << ")\n";

  std::vector<json> log;
  {
    std::istringstream in(read_file(run_dir / "train_log.jsonl"));
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) log.push_back(json::parse(line));
  }
  out << "\ntraining: " << log.size() << " epochs\n";
  emit("training", "epochs", std::to_string(log.size()));
  if (!log.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < log.size(); ++i)
      if (log[i]["valid_ndcg10"].get<double>() > log[best]["valid_ndcg10"].get<double>()) best = i;
    const json& last = log.back();
    out << "  best epoch " << log[best]["epoch"] << "  valid NDCG@10 "
        << fixed(log[best]["valid_ndcg10"].get<double>()) << '\n';
    out << "  last epoch: rec " << fixed(last["rec_loss"].get<double>()) << "  cl "
        << fixed(last["cl_loss"].get<double>()) << "  total " << fixed(last["total"].get<double>())
        << "  mean lambda " << fixed(last["mean_lambda"].get<double>()) << '\n';
    for (const char* k : {"rec_loss", "cl_loss", "total", "mean_lambda"})
      emit("training", std::string("last_") + k, last[k].dump());
    emit("training", "best_epoch", log[best]["epoch"].dump());
    emit("training", "best_valid_ndcg10", log[best]["valid_ndcg10"].dump());
  }

  const json metrics = json::parse(read_file(run_dir / "metrics.json"));
  out << "\ntest metrics (" << metrics.value("num_examples", 0) << " users)\n";
  for (const auto& [k, v] : metrics.items()) {
    if (k == "num_examples") continue;
    out << "  " << std::left << std::setw(8) << k << fixed(v.get<double>()) << '\n';
    emit("test", k, v.dump());
  }

  out << "\nper-bin metrics\n";
  {
    std::istringstream in(read_file(run_dir / "bins.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::vector<std::string> f;
      std::stringstream ls(line);
      std::string x;
      while (std::getline(ls, x, ',')) f.push_back(x);
      if (f.size() < 4) continue;
      const std::string count = f.size() > 4 ? f[4] : "0";
      const std::string value = f[3].empty() ? "absent" : fixed(std::stod(f[3]));
      out << "  " << std::left << std::setw(5) << f[0] << std::setw(8) << f[1] << std::setw(9)
          << f[2] << std::setw(10) << value << "n=" << count << '\n';
      emit("bins", f[0] + ":" + f[1] + ":" + f[2], f[3]);
    }
  }

  if (fs::exists(run_dir / "lambda_hist.csv")) {
    std::istringstream in(read_file(run_dir / "lambda_hist.csv"));
    std::string line;
    std::getline(in, line);
    std::size_t total = 0, buckets = 0;
    std::string lo, hi;
    while (std::getline(in, line)) {
      const auto comma = line.rfind(',');
      if (comma == std::string::npos) continue;
      const std::string range = line.substr(0, comma);
      if (buckets == 0) lo = range.substr(0, range.find('-'));
      hi = range.substr(range.find('-') + 1);
      total += std::stoul(line.substr(comma + 1));
      ++buckets;
    }
    out << "\nlambda: " << total << " sequences, range [" << lo << ", " << hi << "]\n";
    emit("lambda", "min", lo);
    emit("lambda", "max", hi);
  }

  if (fs::exists(run_dir / "audit.csv")) {
    out << "\naugmentation audit (expected / observed perturbation rate)\n";
    std::istringstream in(read_file(run_dir / "audit.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::vector<std::string> f;
      std::stringstream ls(line);
      std::string x;
      while (std::getline(ls, x, ',')) f.push_back(x);
      if (f.size() != 5) continue;
      out << "  " << std::left << std::setw(8) << f[0] << std::setw(12) << f[1] << f[2] << " / "
          << f[3] << '\n';
      emit("audit", f[0] + ":" + f[1], f[3]);
    }
  }

  auto csv = open_out(run_dir / "summary.csv");
  csv << "section,key,value\n";
  for (const auto& [s, k, v] : summary) csv << s << ',' << k << ',' << v << '\n';
}

}  // namespace facl
