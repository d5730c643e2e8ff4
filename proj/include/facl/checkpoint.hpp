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

#include <iosfwd>
#include <string>
#include <vector>

#include "facl/model.hpp"

namespace facl {

// Binary layout: "FACLCKPT", u32 version, u64 header length, header text
// (the effective config), u32 tensor count, then per tensor: u32 name
// length, name, u64 rows, u64 cols, rows*cols float64 values. All integers
// and floats are little-endian; values are stored column-major.
struct Checkpoint {
  std::string header;
  ModelParams<double> params;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

// Throws Error(kFormat) on a bad magic, unsupported version or truncation.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::string& path);

struct TensorSummary {
  std::string name;
  long rows = 0;
  long cols = 0;
  double norm = 0.0;
};

std::vector<TensorSummary> summarize(const ModelParams<double>& params);

}  // namespace facl
