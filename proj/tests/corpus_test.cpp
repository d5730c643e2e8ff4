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

#include <gtest/gtest.h>

#include <sstream>

#include "facl/corpus.hpp"
#include "oracles.hpp"

namespace facl {
namespace {

// Original ids of a sequence, for readable assertions.
std::vector<std::int64_t> ids(const Corpus& c, const Sequence& s) {
  std::vector<std::int64_t> out;
  for (ItemIndex v : s) out.push_back(c.item_ids[static_cast<std::size_t>(v)]);
  return out;
}

std::vector<std::int64_t> ids(const Corpus& c, std::size_t user) {
  return ids(c, c.sequences[user].items);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kFormat;
}

TEST(ParseInteractions, SingleLine) {
  const Corpus c = parse_interactions("u1\t3 7 7 9");
  ASSERT_EQ(c.num_users(), 1u);
  EXPECT_EQ(c.sequences[0].user, "u1");
  EXPECT_EQ(ids(c, 0), (std::vector<std::int64_t>{3, 7, 7, 9}));
  EXPECT_EQ(c.num_items(), 3u);
}

TEST(ParseInteractions, EmptyDocument) {
  EXPECT_TRUE(parse_interactions("").empty());
  EXPECT_TRUE(parse_interactions("\n\n").empty());
}

TEST(ParseInteractions, DuplicateUser) {
  EXPECT_EQ(code_of([] { parse_interactions("u1\t3\nu1\t4"); }), ErrorCode::kDuplicateUser);
}

TEST(ParseInteractions, MalformedLinesReportLineNumber) {
  for (const char* text : {"u1\t1\nu2 1 2\n", "u1\t1\nu2\t1 x\n", "u1\t1\nu2\t\n"}) {
    try {
      parse_interactions(text);
      FAIL() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse);
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
  }
}

TEST(ParseInteractions, PreservesLineOrderAndHandlesCrlf) {
  const Corpus c = parse_interactions("b\t5 6\r\na\t6\r\n");
  ASSERT_EQ(c.num_users(), 2u);
  EXPECT_EQ(c.sequences[0].user, "b");
  EXPECT_EQ(c.sequences[1].user, "a");
  EXPECT_EQ(ids(c, 1), (std::vector<std::int64_t>{6}));
}

TEST(WriteInteractions, RoundTrip) {
  const Corpus c = parse_interactions("u1\t3 7 7 9\nu2\t7 1\n");
  std::ostringstream out;
  write_interactions(out, c);
  EXPECT_EQ(out.str(), "u1\t3 7 7 9\nu2\t7 1\n");
}

TEST(FiveCore, AlreadyAFixpoint) {
  const Corpus c = parse_interactions(
      "a\t1 2 1 2 1\nb\t2 1 2 1 2\nc\t1 2 1 2 1\n");
  const FilterOutcome out = apply_five_core_filter(c, 5);
  ASSERT_EQ(out.status, FilterStatus::kOk);
  ASSERT_EQ(out.corpus.num_users(), 3u);
  for (std::size_t u = 0; u < 3; ++u) EXPECT_EQ(ids(out.corpus, u), ids(c, u));
}

TEST(FiveCore, MinCountOneIsNoOp) {
  const Corpus c = parse_interactions("a\t1 2\nb\t3\n");
  const FilterOutcome out = apply_five_core_filter(c, 1);
  ASSERT_EQ(out.corpus.num_users(), 2u);
  EXPECT_EQ(ids(out.corpus, 0), (std::vector<std::int64_t>{1, 2}));
  EXPECT_EQ(ids(out.corpus, 1), (std::vector<std::int64_t>{3}));
}

// Item 9 occurs four times. Removing it shortens u1..u4 to four items, which
// removes them, which drops item 8 to a single occurrence in u5.
constexpr const char* kCascade =
    "u1\t1 2 3 8 9\n"
    "u2\t1 2 3 8 9\n"
    "u3\t1 2 3 8 9\n"
    "u4\t1 2 3 8 9\n"
    "u5\t1 1 1 2 2 2 3 3 3 4 4 8 4\n"
    "u6\t1 1 1 2 2 2 3 3 3 4 4 4\n";

TEST(FiveCore, CascadeReachesFixpoint) {
  const Corpus c = parse_interactions(kCascade);
  const FilterOutcome out = apply_five_core_filter(c, 5);
  ASSERT_EQ(out.status, FilterStatus::kOk);
  const std::vector<std::int64_t> expected{1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4};
  ASSERT_EQ(out.corpus.num_users(), 2u);
  EXPECT_EQ(out.corpus.sequences[0].user, "u5");
  EXPECT_EQ(ids(out.corpus, 0), expected);
  EXPECT_EQ(ids(out.corpus, 1), expected);
  EXPECT_GE(out.sweeps, 3u);
  EXPECT_EQ(out.corpus.num_items(), 4u);

  const auto naive = oracle::naive_k_core(c, 5);
  ASSERT_EQ(naive.size(), out.corpus.num_users());
  for (std::size_t u = 0; u < out.corpus.num_users(); ++u)
    EXPECT_EQ(naive.at(out.corpus.sequences[u].user), ids(out.corpus, u));
}

TEST(FiveCore, IdempotentAndSatisfiesBounds) {
  std::string text;
  for (int u = 0; u < 40; ++u) {
    text += "u" + std::to_string(u) + "\t";
    for (int i = 0; i < 3 + (u * 7) % 9; ++i) text += std::to_string((u * 13 + i * i) % 17) + " ";
    text += "\n";
  }
  const Corpus c = parse_interactions(text);
  const Corpus once = apply_five_core_filter(c, 5).corpus;
  const Corpus twice = apply_five_core_filter(once, 5).corpus;
  ASSERT_EQ(once.num_users(), twice.num_users());
  for (std::size_t u = 0; u < once.num_users(); ++u) EXPECT_EQ(ids(once, u), ids(twice, u));

  std::map<ItemIndex, std::size_t> counts;
  for (const auto& s : once.sequences) {
    EXPECT_GE(s.items.size(), 5u);
    for (ItemIndex v : s.items) ++counts[v];
  }
  for (const auto& [v, n] : counts) EXPECT_GE(n, 5u);

  const auto naive = oracle::naive_k_core(c, 5);
  ASSERT_EQ(naive.size(), once.num_users());
  for (std::size_t u = 0; u < once.num_users(); ++u)
    EXPECT_EQ(naive.at(once.sequences[u].user), ids(once, u));
}

TEST(FiveCore, EmptyFixpointIsReported) {
  const FilterOutcome out = apply_five_core_filter(parse_interactions("a\t1 2 3\n"), 5);
  EXPECT_EQ(out.status, FilterStatus::kEmpty);
  EXPECT_TRUE(out.corpus.empty());
}

TEST(Truncate, KeepsSuffix) {
  std::string line = "u\t";
  for (int i = 1; i <= 60; ++i) line += std::to_string(i) + " ";
  const Corpus c = truncate_sequences(parse_interactions(line + "\nv\t1 2 3\n"), 50);
  const auto kept = ids(c, 0);
  ASSERT_EQ(kept.size(), 50u);
  EXPECT_EQ(kept.front(), 11);
  EXPECT_EQ(kept.back(), 60);
  EXPECT_EQ(ids(c, 1), (std::vector<std::int64_t>{1, 2, 3}));

  const Corpus two = truncate_sequences(parse_interactions("u\t1 2 3\n"), 2);
  EXPECT_EQ(ids(two, 0), (std::vector<std::int64_t>{2, 3}));
  EXPECT_THROW(truncate_sequences(c, 1), Error);
}

TEST(LeaveOneOut, Examples) {
  const Corpus c = parse_interactions("a\t1 2 3 4 5\nb\t1 2 3\nc\t1 2\n");
  const Split s = leave_one_out_split(c);
  EXPECT_EQ(s.excluded_users, 1u);
  ASSERT_EQ(s.train.num_users(), 2u);
  EXPECT_EQ(ids(s.train, 0), (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_EQ(ids(s.train, s.valid[0].input), (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_EQ(s.train.item_ids[static_cast<std::size_t>(s.valid[0].target)], 4);
  EXPECT_EQ(ids(s.train, s.test[0].input), (std::vector<std::int64_t>{1, 2, 3, 4}));
  EXPECT_EQ(s.train.item_ids[static_cast<std::size_t>(s.test[0].target)], 5);

  EXPECT_EQ(ids(s.train, 1), (std::vector<std::int64_t>{1}));
  EXPECT_EQ(ids(s.train, s.test[1].input), (std::vector<std::int64_t>{1, 2}));
}

TEST(LeaveOneOut, ReconstructsOriginal) {
  const Corpus c = parse_interactions("a\t4 1 2 2 5 3\nb\t9 8 7\nc\t1 1 1 1\n");
  const Split s = leave_one_out_split(c);
  for (std::size_t u = 0; u < s.train.num_users(); ++u) {
    Sequence rebuilt = s.train.sequences[u].items;
    rebuilt.push_back(s.valid[u].target);
    rebuilt.push_back(s.test[u].target);
    EXPECT_EQ(rebuilt, c.sequences[u].items);
    EXPECT_EQ(s.valid[u].user, u);
  }
}

TEST(FrequencyTable, Counts) {
  const Corpus c = parse_interactions("a\t3 7 7 9\nb\t7\n");
  const FrequencyTable f = build_frequency_table(c);
  auto count_of = [&](std::int64_t id) {
    for (std::size_t i = 0; i < c.num_items(); ++i)
      if (c.item_ids[i] == id) return f.count(static_cast<ItemIndex>(i));
    return std::int64_t{-1};
  };
  EXPECT_EQ(count_of(3), 1);
  EXPECT_EQ(count_of(7), 3);
  EXPECT_EQ(count_of(9), 1);
  EXPECT_EQ(f.total(), static_cast<std::int64_t>(c.num_interactions()));
  EXPECT_EQ(f.vocabulary_size(), 3u);

  const FrequencyTable single = build_frequency_table(parse_interactions("a\t1\n"));
  EXPECT_EQ(single.count(0), 1);

  const FrequencyTable disjoint = build_frequency_table(parse_interactions("a\t1 2\nb\t3 3\n"));
  EXPECT_EQ(disjoint.total(), 4);
  EXPECT_EQ(disjoint.count(2), 2);
}

TEST(FrequencyTable, CatalogItemsOutsideTrainingHaveZeroCount) {
  const Split s = leave_one_out_split(parse_interactions("a\t1 2 3 4\n"));
  const FrequencyTable f = build_frequency_table(s.train);
  EXPECT_EQ(f.catalog_size(), 4u);
  EXPECT_EQ(f.vocabulary_size(), 2u);
  EXPECT_FALSE(f.contains(3));
}

TEST(CorpusStats, Examples) {
  const Corpus c = parse_interactions("a\t3 7 7 9\nb\t7\n");
  const CorpusStats st = corpus_stats(c, build_frequency_table(c));
  EXPECT_DOUBLE_EQ(st.global_avg_frequency, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(st.global_avg_length, 2.5);

  const Corpus one = parse_interactions("a\t4 4 4\n");
  const CorpusStats s1 = corpus_stats(one, build_frequency_table(one));
  EXPECT_DOUBLE_EQ(s1.global_avg_frequency, 3.0);
  EXPECT_DOUBLE_EQ(s1.global_avg_length, 3.0);
}

TEST(FrequencyBins, HalfOpenIntervals) {
  const FrequencyTable f(std::vector<std::int64_t>{7, 10, 10000, 49, 50});
  const std::int64_t edges[] = {10, 50};
  const FrequencyBins b = assign_frequency_bins(f, edges);
  ASSERT_EQ(b.num_bins(), 3u);
  EXPECT_EQ(b.labels[b.item_bin[0]], "low");
  EXPECT_EQ(b.labels[b.item_bin[1]], "medium");
  EXPECT_EQ(b.labels[b.item_bin[2]], "high");
  EXPECT_EQ(b.labels[b.item_bin[3]], "medium");
  EXPECT_EQ(b.labels[b.item_bin[4]], "high");
}

TEST(FrequencyBins, EmptyEdgesGiveOneBinAndBadEdgesThrow) {
  const FrequencyTable f(std::vector<std::int64_t>{1, 2, 3});
  const FrequencyBins b = assign_frequency_bins(f, {});
  EXPECT_EQ(b.num_bins(), 1u);
  for (auto bin : b.item_bin) EXPECT_EQ(bin, 0u);
  const std::int64_t bad[] = {5, 5};
  EXPECT_THROW(assign_frequency_bins(f, bad), Error);
}

TEST(FrequencyBins, TercilesPartitionVocabulary) {
  std::vector<std::int64_t> counts;
  for (int i = 1; i <= 30; ++i) counts.push_back(i * i);
  const FrequencyTable f(counts);
  const FrequencyBins b = assign_frequency_bins(f, item_tercile_edges(f));
  ASSERT_EQ(b.num_bins(), 3u);
  std::vector<std::size_t> sizes(3, 0);
  for (auto bin : b.item_bin) ++sizes[bin];
  EXPECT_EQ(sizes, (std::vector<std::size_t>{10, 10, 10}));
}

TEST(FrequencyBins, TercileEdgesCollapseOnTies) {
  const std::int64_t same[] = {4, 4, 4, 4, 4, 4};
  EXPECT_TRUE(tercile_edges(same).empty());
  const std::int64_t two[] = {1, 1, 1, 1, 9, 9};
  const auto e = tercile_edges(two);
  for (std::size_t i = 1; i < e.size(); ++i) EXPECT_LT(e[i - 1], e[i]);
}

}  // namespace
}  // namespace facl
