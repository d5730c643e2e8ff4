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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "facl/trainer.hpp"

namespace facl {

// A run configuration plus the data-related settings that live in the same
// flat config file.
struct ExperimentConfig {
  RunConfig run;
  std::size_t min_count = 5;  // k-core threshold applied by `prepare`

  void validate() const { run.validate(); }
};

// Default hyperparameters.
ExperimentConfig default_config();

// Every recognised key, in file order.
std::vector<std::string> config_keys();

// Sets one key from its text value. Throws Error(kConfig) on unknown keys or
// unparsable values.
void set_config_value(ExperimentConfig& cfg, std::string_view key,
                      std::string_view value);
std::string get_config_value(const ExperimentConfig& cfg, std::string_view key);

// `key = value` lines; '#' starts a comment. Keys not mentioned keep their
// values from `base`.
ExperimentConfig parse_config(std::string_view text,
                              const ExperimentConfig& base = default_config());
ExperimentConfig load_config(const std::string& path,
                             const ExperimentConfig& base = default_config());

// Full effective config, one key per line; parse_config inverts it.
std::string format_config(const ExperimentConfig& cfg);

// FNV-1a over the formatted config with the seed removed, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace facl
