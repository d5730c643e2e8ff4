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

#include "facl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace facl {

namespace {

constexpr char kMagic[8] = {'F', 'A', 'C', 'L', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value))
    throw Error(ErrorCode::kFormat, "truncated checkpoint");
  return value;
}

std::string get_string(std::istream& in, std::uint64_t n) {
  if (n > (1u << 30)) throw Error(ErrorCode::kFormat, "implausible string length in checkpoint");
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n)))
    throw Error(ErrorCode::kFormat, "truncated checkpoint");
  return s;
}

// Rebuilds the block list implied by tensor names such as "block3.wq".
std::size_t block_count(const std::vector<std::string>& names) {
  std::size_t n = 0;
  for (const auto& name : names) {
    if (name.rfind("block", 0) != 0) continue;
    const auto dot = name.find('.');
    n = std::max<std::size_t>(n, std::stoul(name.substr(5, dot - 5)) + 1);
  }
  return n;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, ckpt.header.size());
  out.write(ckpt.header.data(), static_cast<std::streamsize>(ckpt.header.size()));
  std::uint32_t count = 0;
  for_each_tensor(ckpt.params, [&](const std::string&, const auto&) { ++count; });
  put<std::uint32_t>(out, count);
  for_each_tensor(ckpt.params, [&](const std::string& name, const auto& t) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(t.rows()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(t.cols()));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  });
  if (!out) throw Error(ErrorCode::kIo, "failed to write checkpoint");
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path);
  write_checkpoint(out, ckpt);
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw Error(ErrorCode::kFormat, "not a checkpoint file (bad magic)");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion)
    throw Error(ErrorCode::kFormat, "unsupported checkpoint version " + std::to_string(version));
  Checkpoint ckpt;
  ckpt.header = get_string(in, get<std::uint64_t>(in));

  struct Raw {
    std::string name;
    MatrixX<double> data;
  };
  std::vector<Raw> raw;
  std::vector<std::string> names;
  const auto count = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < count; ++i) {
    Raw r;
    r.name = get_string(in, get<std::uint32_t>(in));
    const auto rows = get<std::uint64_t>(in);
    const auto cols = get<std::uint64_t>(in);
    if (rows > (1u << 26) || cols > (1u << 26) || rows * cols > (1ull << 31))
      throw Error(ErrorCode::kFormat, "implausible tensor shape for " + r.name);
    r.data.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    if (r.data.size() > 0 &&
        !in.read(reinterpret_cast<char*>(r.data.data()),
                 static_cast<std::streamsize>(r.data.size() * sizeof(double))))
      throw Error(ErrorCode::kFormat, "truncated checkpoint");
    names.push_back(r.name);
    raw.push_back(std::move(r));
  }

  ckpt.params.blocks.resize(block_count(names));
  std::size_t next = 0;
  for_each_tensor(ckpt.params, [&](const std::string& name, auto& t) {
    if (next >= raw.size() || raw[next].name != name)
      throw Error(ErrorCode::kFormat, "unexpected tensor layout near '" + name + "'");
    const MatrixX<double>& src = raw[next].data;
    using T = std::decay_t<decltype(t)>;
    if (T::RowsAtCompileTime == 1 && src.rows() != 1)
      throw Error(ErrorCode::kFormat, "tensor '" + name + "' must be a row vector");
    t = Eigen::Map<const T>(src.data(), src.rows(), src.cols());
    ++next;
  });
  if (next != raw.size()) throw Error(ErrorCode::kFormat, "unexpected extra tensors in checkpoint");
  return ckpt;
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return read_checkpoint(in);
}

std::vector<TensorSummary> summarize(const ModelParams<double>& params) {
  std::vector<TensorSummary> out;
  for_each_tensor(params, [&](const std::string& name, const auto& t) {
    out.push_back({name, static_cast<long>(t.rows()), static_cast<long>(t.cols()), t.norm()});
  });
  return out;
}

}  // namespace facl
