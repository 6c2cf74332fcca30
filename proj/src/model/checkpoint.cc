//
// Copyright 2026 The SketchSQL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "sketchsql/model.h"

namespace sketchsql {

namespace {

constexpr char kMagic[4] = {'S', 'K', 'Q', 'L'};

template <typename T>
void PutLe(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T GetLe(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw IoError("truncated checkpoint");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
  return v;
}

void PutString(std::ostream& out, const std::string& s) {
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string GetBytes(std::istream& in, std::size_t n) {
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw IoError("truncated checkpoint");
  }
  return s;
}

std::string GetString(std::istream& in) { return GetBytes(in, GetLe<std::uint32_t>(in)); }

}  // namespace

void Model::Save(std::ostream& out) const {
  out.write(kMagic, 4);
  PutLe<std::uint32_t>(out, kCheckpointVersion);
  const std::string config = config_.ToJson().dump();
  PutLe<std::uint64_t>(out, config.size());
  out.write(config.data(), static_cast<std::streamsize>(config.size()));
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(vocab_.size()));
  for (const auto& t : vocab_.tokens()) PutString(out, t);
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(params_.size()));
  for (const auto& p : params_) {
    PutString(out, p.name);
    PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.rows()));
    PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.cols()));
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      PutLe<std::uint64_t>(out, std::bit_cast<std::uint64_t>(p.value.data()[i]));
    }
  }
  if (!out) throw IoError("failed writing checkpoint");
}

void Model::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  Save(out);
}

Model Model::Load(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("not a checkpoint (bad magic)");
  }
  const auto version = GetLe<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto config_len = GetLe<std::uint64_t>(in);
  if (config_len > (1u << 20)) throw IoError("checkpoint config block too large");
  ModelConfig config;
  try {
    config = ModelConfig::FromJson(nlohmann::json::parse(GetBytes(in, config_len)));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad checkpoint config: ") + e.what());
  }
  const auto n_tokens = GetLe<std::uint32_t>(in);
  std::vector<std::string> tokens;
  tokens.reserve(n_tokens);
  for (std::uint32_t i = 0; i < n_tokens; ++i) tokens.push_back(GetString(in));
  Model m(config, Vocabulary(tokens));

  const auto n_tensors = GetLe<std::uint32_t>(in);
  std::set<std::string> seen;
  for (std::uint32_t t = 0; t < n_tensors; ++t) {
    const std::string name = GetString(in);
    const auto rows = GetLe<std::uint32_t>(in);
    const auto cols = GetLe<std::uint32_t>(in);
    auto it = m.index_.find(name);
    if (it == m.index_.end()) throw IoError("checkpoint has unknown tensor '" + name + "'");
    ad::Parameter& p = m.params_[it->second];
    if (p.value.rows() != rows || p.value.cols() != cols) {
      throw IoError("tensor '" + name + "' has the wrong shape");
    }
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      p.value.data()[i] = std::bit_cast<double>(GetLe<std::uint64_t>(in));
    }
    seen.insert(name);
  }
  if (seen.size() != m.params_.size()) throw IoError("checkpoint is missing tensors");
  return m;
}

Model Model::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return Load(in);
}

}  // namespace sketchsql
