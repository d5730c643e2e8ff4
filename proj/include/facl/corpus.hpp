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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "facl/types.hpp"

namespace facl {

// One user's chronologically ordered interactions, earliest first.
struct InteractionSequence {
  std::string user;
  Sequence items;
};

// Sequences over a dense item catalog. item_ids maps a dense index back to
// the identifier found in the input file.
struct Corpus {
  std::vector<InteractionSequence> sequences;
  std::vector<std::int64_t> item_ids;

  std::size_t num_users() const { return sequences.size(); }
  std::size_t num_items() const { return item_ids.size(); }
  bool empty() const { return sequences.empty(); }
  std::size_t num_interactions() const;
  // Sorted distinct items that occur in at least one sequence.
  std::vector<ItemIndex> vocabulary() const;
};

// Parses `user<TAB>item( item)*` lines. Throws Error(kParse) with the line
// number on malformed input and Error(kDuplicateUser) on repeated users.
Corpus parse_interactions(std::string_view text);
Corpus read_interactions(const std::string& path);

// Writes sequences in the input format using the original item identifiers.
void write_interactions(std::ostream& out, const Corpus& corpus);

// Drops catalog entries that no sequence references and renumbers the rest,
// preserving their relative order.
Corpus compact(const Corpus& corpus);

enum class FilterStatus { kOk, kEmpty };

struct FilterOutcome {
  Corpus corpus;
  FilterStatus status = FilterStatus::kOk;
  std::size_t sweeps = 0;
};

// Iterated k-core filter: repeats item and user removal until neither
// changes anything.
FilterOutcome apply_five_core_filter(const Corpus& corpus,
                                     std::size_t min_count = 5);

// Keeps the most recent max_len items of every sequence.
Corpus truncate_sequences(const Corpus& corpus, std::size_t max_len);

struct LabeledExample {
  std::size_t user = 0;  // index into Split::train.sequences
  Sequence input;
  ItemIndex target = 0;
};

struct Split {
  Corpus train;  // shares the catalog of the split corpus
  std::vector<LabeledExample> valid;
  std::vector<LabeledExample> test;
  std::size_t excluded_users = 0;
};

// Leave-one-out: last item is the test target, the one before it the
// validation target, the rest is training data. Users with fewer than three
// interactions are excluded and counted.
Split leave_one_out_split(const Corpus& corpus);

// Training-split occurrence counts over the whole catalog. Items that never
// occur in training have count zero and are not part of the vocabulary.
class FrequencyTable {
 public:
  FrequencyTable() = default;
  explicit FrequencyTable(std::vector<std::int64_t> counts);

  std::int64_t count(ItemIndex item) const {
    return counts_[static_cast<std::size_t>(item)];
  }
  bool contains(ItemIndex item) const {
    return item >= 0 && static_cast<std::size_t>(item) < counts_.size() &&
           counts_[static_cast<std::size_t>(item)] > 0;
  }
  std::size_t catalog_size() const { return counts_.size(); }
  std::size_t vocabulary_size() const { return vocabulary_size_; }
  std::int64_t total() const { return total_; }
  std::span<const std::int64_t> counts() const { return counts_; }

 private:
  std::vector<std::int64_t> counts_;
  std::size_t vocabulary_size_ = 0;
  std::int64_t total_ = 0;
};

FrequencyTable build_frequency_table(const Corpus& train);

struct CorpusStats {
  double global_avg_frequency = 0.0;  // mean count over vocabulary items
  double global_avg_length = 0.0;     // mean training-sequence length
};

CorpusStats corpus_stats(const Corpus& train, const FrequencyTable& freq);

// Left-closed, right-open bins over integer counts; the last bin is
// unbounded. Bin i holds counts c with edges[i-1] <= c < edges[i].
struct FrequencyBins {
  std::vector<std::int64_t> edges;
  std::vector<std::string> labels;
  std::vector<std::size_t> item_bin;  // per catalog item

  std::size_t num_bins() const { return edges.size() + 1; }
  std::size_t bin_of(std::int64_t count) const;
};

std::vector<std::string> default_bin_labels(std::size_t num_bins);
FrequencyBins assign_frequency_bins(const FrequencyTable& freq,
                                    std::span<const std::int64_t> edges);

// Edges at the 1/3 and 2/3 quantiles of `values`, deduplicated so they are
// strictly increasing.
std::vector<std::int64_t> tercile_edges(std::span<const std::int64_t> values);
// Tercile edges of the vocabulary items' counts.
std::vector<std::int64_t> item_tercile_edges(const FrequencyTable& freq);

}  // namespace facl
