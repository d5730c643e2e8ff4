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

#include "facl/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace facl {

std::string_view error_tag(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "E_PARSE";
    case ErrorCode::kDuplicateUser: return "E_DUPLICATE_USER";
    case ErrorCode::kEmptyResult: return "E_EMPTY_RESULT";
    case ErrorCode::kOutOfVocabulary: return "E_OOV";
    case ErrorCode::kNumerical: return "E_NUMERICAL";
    case ErrorCode::kInvalidArgument: return "E_INVALID_ARGUMENT";
    case ErrorCode::kConfig: return "E_CONFIG";
    case ErrorCode::kIo: return "E_IO";
    case ErrorCode::kMissingArtifacts: return "E_MISSING_ARTIFACTS";
    case ErrorCode::kFormat: return "E_FORMAT";
  }
  return "E_UNKNOWN";
}

std::size_t Corpus::num_interactions() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.items.size();
  return n;
}

std::vector<ItemIndex> Corpus::vocabulary() const {
  std::vector<char> seen(item_ids.size(), 0);
  for (const auto& s : sequences)
    for (ItemIndex v : s.items) seen[static_cast<std::size_t>(v)] = 1;
  std::vector<ItemIndex> out;
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i]) out.push_back(static_cast<ItemIndex>(i));
  return out;
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& msg) {
  throw Error(ErrorCode::kParse,
              "line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

Corpus parse_interactions(std::string_view text) {
  Corpus corpus;
  std::unordered_map<std::int64_t, ItemIndex> index_of;
  std::unordered_set<std::string> users;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) parse_fail(line_no, "missing tab");
    std::string user(line.substr(0, tab));
    if (user.empty()) parse_fail(line_no, "empty user identifier");

    InteractionSequence seq;
    seq.user = user;
    std::string_view rest = line.substr(tab + 1);
    std::size_t p = 0;
    while (p < rest.size()) {
      while (p < rest.size() && rest[p] == ' ') ++p;
      if (p >= rest.size()) break;
      std::size_t q = rest.find(' ', p);
      if (q == std::string_view::npos) q = rest.size();
      std::string_view tok = rest.substr(p, q - p);
      std::int64_t id = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
      if (ec != std::errc() || ptr != tok.data() + tok.size())
        parse_fail(line_no, "non-integer item token '" + std::string(tok) + "'");
      auto [it, inserted] =
          index_of.emplace(id, static_cast<ItemIndex>(corpus.item_ids.size()));
      if (inserted) corpus.item_ids.push_back(id);
      seq.items.push_back(it->second);
      p = q;
    }
    if (seq.items.empty()) parse_fail(line_no, "empty item list");
    if (!users.insert(user).second)
      throw Error(ErrorCode::kDuplicateUser,
                  "line " + std::to_string(line_no) + ": duplicate user '" +
                      user + "'");
    corpus.sequences.push_back(std::move(seq));
  }
  return corpus;
}

Corpus read_interactions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_interactions(buf.str());
}

void write_interactions(std::ostream& out, const Corpus& corpus) {
  for (const auto& s : corpus.sequences) {
    out << s.user << '\t';
    for (std::size_t i = 0; i < s.items.size(); ++i) {
      if (i) out << ' ';
      out << corpus.item_ids[static_cast<std::size_t>(s.items[i])];
    }
    out << '\n';
  }
}

Corpus compact(const Corpus& corpus) {
  std::vector<ItemIndex> remap(corpus.item_ids.size(), -1);
  Corpus out;
  for (ItemIndex v : corpus.vocabulary()) {
    remap[static_cast<std::size_t>(v)] =
        static_cast<ItemIndex>(out.item_ids.size());
    out.item_ids.push_back(corpus.item_ids[static_cast<std::size_t>(v)]);
  }
  out.sequences.reserve(corpus.sequences.size());
  for (const auto& s : corpus.sequences) {
    InteractionSequence t{s.user, {}};
    t.items.reserve(s.items.size());
    for (ItemIndex v : s.items) t.items.push_back(remap[static_cast<std::size_t>(v)]);
    out.sequences.push_back(std::move(t));
  }
  return out;
}

FilterOutcome apply_five_core_filter(const Corpus& corpus,
                                     std::size_t min_count) {
  if (min_count < 1)
    throw Error(ErrorCode::kInvalidArgument, "min_count must be >= 1");
  std::vector<InteractionSequence> seqs = corpus.sequences;
  FilterOutcome outcome;
  std::vector<std::size_t> counts(corpus.item_ids.size());
  while (true) {
    ++outcome.sweeps;
    std::fill(counts.begin(), counts.end(), 0);
    for (const auto& s : seqs)
      for (ItemIndex v : s.items) ++counts[static_cast<std::size_t>(v)];

    bool changed = false;
    std::vector<InteractionSequence> next;
    next.reserve(seqs.size());
    for (auto& s : seqs) {
      const auto before = s.items.size();
      std::erase_if(s.items, [&](ItemIndex v) {
        return counts[static_cast<std::size_t>(v)] < min_count;
      });
      if (s.items.size() != before) changed = true;
      if (s.items.size() < min_count) {
        changed = true;
        continue;
      }
      next.push_back(std::move(s));
    }
    seqs = std::move(next);
    if (!changed) break;
  }
  outcome.corpus = compact(Corpus{std::move(seqs), corpus.item_ids});
  outcome.status =
      outcome.corpus.empty() ? FilterStatus::kEmpty : FilterStatus::kOk;
  return outcome;
}

Corpus truncate_sequences(const Corpus& corpus, std::size_t max_len) {
  if (max_len < 2)
    throw Error(ErrorCode::kInvalidArgument, "max_len must be >= 2");
  Corpus out;
  out.item_ids = corpus.item_ids;
  out.sequences.reserve(corpus.sequences.size());
  for (const auto& s : corpus.sequences) {
    InteractionSequence t{s.user, {}};
    const std::size_t skip =
        s.items.size() > max_len ? s.items.size() - max_len : 0;
    t.items.assign(s.items.begin() + static_cast<std::ptrdiff_t>(skip),
                   s.items.end());
    out.sequences.push_back(std::move(t));
  }
  return compact(out);
}

Split leave_one_out_split(const Corpus& corpus) {
  Split split;
  split.train.item_ids = corpus.item_ids;
  for (const auto& s : corpus.sequences) {
    const std::size_t n = s.items.size();
    if (n < 3) {
      ++split.excluded_users;
      continue;
    }
    const std::size_t user = split.train.sequences.size();
    Sequence train(s.items.begin(), s.items.end() - 2);
    LabeledExample valid{user, train, s.items[n - 2]};
    Sequence test_input(s.items.begin(), s.items.end() - 1);
    LabeledExample test{user, std::move(test_input), s.items[n - 1]};
    split.train.sequences.push_back({s.user, std::move(train)});
    split.valid.push_back(std::move(valid));
    split.test.push_back(std::move(test));
  }
  return split;
}

FrequencyTable::FrequencyTable(std::vector<std::int64_t> counts)
    : counts_(std::move(counts)) {
  for (auto c : counts_) {
    if (c < 0) throw Error(ErrorCode::kInvalidArgument, "negative count");
    if (c > 0) ++vocabulary_size_;
    total_ += c;
  }
}

FrequencyTable build_frequency_table(const Corpus& train) {
  if (train.empty())
    throw Error(ErrorCode::kEmptyResult, "training corpus is empty");
  std::vector<std::int64_t> counts(train.num_items(), 0);
  for (const auto& s : train.sequences)
    for (ItemIndex v : s.items) ++counts[static_cast<std::size_t>(v)];
  return FrequencyTable(std::move(counts));
}

CorpusStats corpus_stats(const Corpus& train, const FrequencyTable& freq) {
  if (train.empty() || freq.vocabulary_size() == 0)
    throw Error(ErrorCode::kEmptyResult, "training corpus is empty");
  CorpusStats stats;
  stats.global_avg_frequency = static_cast<double>(freq.total()) /
                               static_cast<double>(freq.vocabulary_size());
  stats.global_avg_length = static_cast<double>(train.num_interactions()) /
                            static_cast<double>(train.num_users());
  return stats;
}

std::size_t FrequencyBins::bin_of(std::int64_t count) const {
  return static_cast<std::size_t>(
      std::upper_bound(edges.begin(), edges.end(), count) - edges.begin());
}

std::vector<std::string> default_bin_labels(std::size_t num_bins) {
  switch (num_bins) {
    case 1: return {"all"};
    case 2: return {"low", "high"};
    case 3: return {"low", "medium", "high"};
    default: break;
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < num_bins; ++i)
    labels.push_back("bin" + std::to_string(i));
  return labels;
}

FrequencyBins assign_frequency_bins(const FrequencyTable& freq,
                                    std::span<const std::int64_t> edges) {
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (edges[i] <= edges[i - 1])
      throw Error(ErrorCode::kInvalidArgument,
                  "bin edges must be strictly increasing");
  FrequencyBins bins;
  bins.edges.assign(edges.begin(), edges.end());
  bins.labels = default_bin_labels(bins.num_bins());
  bins.item_bin.resize(freq.catalog_size());
  for (std::size_t i = 0; i < freq.catalog_size(); ++i)
    bins.item_bin[i] = bins.bin_of(freq.counts()[i]);
  return bins;
}

std::vector<std::int64_t> tercile_edges(std::span<const std::int64_t> values) {
  if (values.empty()) return {};
  std::vector<std::int64_t> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::vector<std::int64_t> edges;
  for (std::size_t k = 1; k <= 2; ++k) {
    const std::size_t idx = (k * n + 2) / 3;  // ceil(k n / 3)
    if (idx == 0 || idx >= n) continue;
    const std::int64_t e = sorted[idx - 1] + 1;
    if (e > sorted.back()) continue;
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }
  return edges;
}

std::vector<std::int64_t> item_tercile_edges(const FrequencyTable& freq) {
  std::vector<std::int64_t> present;
  for (auto c : freq.counts())
    if (c > 0) present.push_back(c);
  return tercile_edges(present);
}

}  // namespace facl
