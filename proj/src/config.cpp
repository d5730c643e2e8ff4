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

#include "facl/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>

namespace facl {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kConfig,
              "invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

struct Entry {
  std::string key;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define FACL_NUM(KEY, TYPE, FIELD)                                               \
  Entry {                                                                        \
    KEY,                                                                         \
        [](ExperimentConfig& c, std::string_view v) {                            \
          c.FIELD = parse_number<TYPE>(KEY, v);                                  \
        },                                                                       \
        [](const ExperimentConfig& c) {                                          \
          if constexpr (std::is_floating_point_v<TYPE>) return format_double(c.FIELD); \
          else return std::to_string(c.FIELD);                                   \
        }                                                                        \
  }

#define FACL_BOOL(KEY, FIELD)                                                               \
  Entry {                                                                                   \
    KEY, [](ExperimentConfig& c, std::string_view v) { c.FIELD = parse_bool(KEY, v); },     \
        [](const ExperimentConfig& c) { return std::string(c.FIELD ? "true" : "false"); }   \
  }

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      FACL_NUM("gamma", double, run.augment.gamma),
      FACL_NUM("eta", double, run.augment.eta),
      FACL_NUM("cap_multiplier", double, run.augment.cap_multiplier),
      FACL_NUM("max_resamples", int, run.augment.max_resamples),
      FACL_NUM("correlation_top_k", int, run.augment.correlation_top_k),
      FACL_NUM("correlation_window", int, run.augment.correlation_window),
      Entry{"aug_policy",
            [](ExperimentConfig& c, std::string_view v) {
              c.run.augment.policy = parse_augment_policy(v);
            },
            [](const ExperimentConfig& c) { return std::string(to_string(c.run.augment.policy)); }},
      FACL_BOOL("length_aware_aug", run.augment.length_aware),
      FACL_NUM("beta", double, run.reweight.beta),
      FACL_BOOL("reweight", run.reweight.enabled),
      FACL_BOOL("weight_clip", run.reweight.clip),
      FACL_NUM("weight_min", double, run.reweight.min_weight),
      FACL_NUM("weight_max", double, run.reweight.max_weight),
      FACL_BOOL("normalize_weights", run.reweight.normalize),
      FACL_NUM("embed_dim", int, run.model.embed_dim),
      FACL_NUM("num_layers", int, run.model.num_layers),
      FACL_NUM("num_heads", int, run.model.num_heads),
      Entry{"max_len",
            [](ExperimentConfig& c, std::string_view v) {
              c.run.model.max_len = parse_number<std::size_t>("max_len", v);
              c.run.augment.max_len = c.run.model.max_len;
            },
            [](const ExperimentConfig& c) { return std::to_string(c.run.model.max_len); }},
      FACL_NUM("dropout", double, run.model.dropout_rate),
      Entry{"encoder",
            [](ExperimentConfig& c, std::string_view v) {
              c.run.model.encoder_kind = parse_encoder_kind(v);
            },
            [](const ExperimentConfig& c) {
              return std::string(to_string(c.run.model.encoder_kind));
            }},
      FACL_NUM("cl_weight", double, run.loss.cl_weight),
      FACL_NUM("temperature", double, run.loss.temperature),
      FACL_BOOL("symmetric_cl", run.loss.symmetric),
      FACL_BOOL("contrastive", run.train.contrastive),
      FACL_NUM("learning_rate", double, run.train.learning_rate),
      FACL_NUM("batch_size", std::size_t, run.train.batch_size),
      FACL_NUM("epochs", int, run.train.epochs),
      FACL_NUM("patience", int, run.train.patience),
      FACL_NUM("seed", std::uint64_t, run.train.seed),
      FACL_NUM("grad_clip", double, run.train.grad_clip),
      FACL_BOOL("all_prefixes", run.train.all_prefixes),
      FACL_NUM("min_count", std::size_t, min_count),
  };
  return entries;
}

#undef FACL_NUM
#undef FACL_BOOL

const Entry& find_entry(std::string_view key) {
  for (const auto& e : registry())
    if (e.key == key) return e;
  throw Error(ErrorCode::kConfig, "unknown config key '" + std::string(key) + "'");
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.run.augment.max_len = cfg.run.model.max_len;
  return cfg;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : registry()) keys.push_back(e.key);
  return keys;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  find_entry(key).set(cfg, trim(value));
}

std::string get_config_value(const ExperimentConfig& cfg, std::string_view key) {
  return find_entry(key).get(cfg);
}

ExperimentConfig parse_config(std::string_view text, const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::kConfig,
                  "config line " + std::to_string(line_no) + ": expected 'key = value'");
    set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  // The catalog size comes from the data, not the file.
  RunConfig check = cfg.run;
  if (check.model.num_items == 0) check.model.num_items = 1;
  check.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

std::string format_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& e : registry()) out += e.key + " = " + e.get(cfg) + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& e : registry()) {
    if (e.key == "seed") continue;
    const std::string line = e.key + "=" + e.get(cfg) + "\n";
    for (unsigned char ch : line) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace facl
