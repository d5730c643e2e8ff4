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

// Independent brute-force reference implementations. They share nothing
// with the library beyond its data types.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "facl/corpus.hpp"

namespace facl::oracle {

// Repeats "drop rare items, then drop short users" until nothing changes.
// Works on original item ids and returns user -> items.
inline std::map<std::string, std::vector<std::int64_t>> naive_k_core(
    const Corpus& corpus, std::size_t k) {
  std::map<std::string, std::vector<std::int64_t>> users;
  for (const auto& s : corpus.sequences)
    for (ItemIndex v : s.items) users[s.user].push_back(corpus.item_ids[static_cast<std::size_t>(v)]);
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::int64_t, std::size_t> count;
    for (const auto& [u, items] : users)
      for (auto v : items) ++count[v];
    for (auto& [u, items] : users) {
      const auto before = items.size();
      std::erase_if(items, [&](std::int64_t v) { return count[v] < k; });
      changed |= items.size() != before;
    }
    for (auto it = users.begin(); it != users.end();) {
      if (it->second.size() < k) {
        it = users.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  return users;
}

struct ScoredNeighbor {
  ItemIndex item;
  double score;
};

// All-pairs windowed co-occurrence, O(|V|^2 * total length^2).
inline std::vector<std::vector<ScoredNeighbor>> brute_correlation(
    const Corpus& train, int window, int top_k) {
  const std::size_t n = train.num_items();
  std::vector<double> f(n, 0.0);
  for (const auto& s : train.sequences)
    for (ItemIndex v : s.items) f[static_cast<std::size_t>(v)] += 1.0;
  std::vector<std::vector<ScoredNeighbor>> out(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      double c = 0.0;
      for (const auto& s : train.sequences)
        for (std::size_t i = 0; i < s.items.size(); ++i)
          for (std::size_t j = 0; j < s.items.size(); ++j) {
            if (i >= j || j - i >= static_cast<std::size_t>(window)) continue;
            const auto x = static_cast<std::size_t>(s.items[i]);
            const auto y = static_cast<std::size_t>(s.items[j]);
            if ((x == a && y == b) || (x == b && y == a)) c += 1.0;
          }
      if (c > 0) out[a].push_back({static_cast<ItemIndex>(b), c / std::sqrt(f[a] * f[b])});
    }
    std::stable_sort(out[a].begin(), out[a].end(),
                     [](const ScoredNeighbor& x, const ScoredNeighbor& y) { return x.score > y.score; });
    if (out[a].size() > static_cast<std::size_t>(top_k)) out[a].resize(static_cast<std::size_t>(top_k));
  }
  return out;
}

// Stationary distribution of unbounded rejection sampling over span starts:
// P(start) proportional to alpha(start).
inline std::vector<double> span_acceptance_distribution(
    const std::vector<std::int64_t>& counts_along_seq, std::size_t c, double global_avg) {
  const std::size_t n = counts_along_seq.size();
  std::vector<double> alpha;
  for (std::size_t s = 0; s + c <= n; ++s) {
    std::int64_t fmin = counts_along_seq[s];
    for (std::size_t i = s; i < s + c; ++i) fmin = std::min(fmin, counts_along_seq[i]);
    alpha.push_back(std::min(1.0, static_cast<double>(fmin) / global_avg));
  }
  const double z = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  for (double& a : alpha) a /= z;
  return alpha;
}

// Position of the target after sorting by (score desc, index asc).
inline std::size_t sort_rank(const std::vector<double>& scores, std::size_t target) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  });
  return static_cast<std::size_t>(std::find(idx.begin(), idx.end(), target) - idx.begin()) + 1;
}

inline double hr(const std::vector<std::size_t>& ranks, std::size_t k) {
  double hits = 0;
  for (auto r : ranks)
    if (r <= k) hits += 1;
  return hits / static_cast<double>(ranks.size());
}

inline double ndcg(const std::vector<std::size_t>& ranks, std::size_t k) {
  double sum = 0;
  for (auto r : ranks)
    if (r <= k) sum += std::log(2.0) / std::log(static_cast<double>(r) + 1.0);
  return sum / static_cast<double>(ranks.size());
}

// Term-by-term InfoNCE for one anchor: -log(exp(s_uu/t) / sum_j exp(s_uj/t)).
inline double infonce_anchor(const std::vector<std::vector<double>>& a,
                             const std::vector<std::vector<double>>& b, std::size_t u, double t) {
  auto cos = [](const std::vector<double>& x, const std::vector<double>& y) {
    double dot = 0, nx = 0, ny = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      dot += x[i] * y[i];
      nx += x[i] * x[i];
      ny += y[i] * y[i];
    }
    return dot / std::sqrt(nx * ny);
  };
  double denom = 0;
  for (std::size_t j = 0; j < b.size(); ++j) denom += std::exp(cos(a[u], b[j]) / t);
  return -std::log(std::exp(cos(a[u], b[u]) / t) / denom);
}

}  // namespace facl::oracle
