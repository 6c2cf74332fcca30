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

#include <openssl/evp.h>

#include <fstream>
#include <memory>

#include "sketchsql/cli.h"
#include "sketchsql/dataio.h"

#ifndef SKETCHSQL_VERSION
#define SKETCHSQL_VERSION "0.0.0"
#endif

namespace sketchsql {

std::string_view ToolVersion() { return SKETCHSQL_VERSION; }

std::string Sha256File(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 unavailable");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 15];
  }
  return hex;
}

std::string RunManifest::CommandLine() const {
  std::string s = "sketchsql " + subcommand;
  for (const auto& [key, value] : config.items()) {
    auto add = [&](const nlohmann::json& v) {
      const std::string text = v.is_string() ? v.get<std::string>() : v.dump();
      s += " '--" + key + "=" + text + "'";
    };
    if (value.is_array()) {
      for (const auto& v : value) add(v);
    } else if (!(value.is_string() && value.get<std::string>().empty())) {
      add(value);
    }
  }
  return s;
}

nlohmann::json RunManifest::ToJson() const {
  return {{"subcommand", subcommand},
          {"config", config},
          {"seeds", seeds},
          {"input_digests", input_digests},
          {"outputs", outputs},
          {"tool_version", tool_version},
          {"started", started},
          {"finished", finished},
          {"command_line", CommandLine()}};
}

RunManifest RunManifest::FromJson(const nlohmann::json& j) {
  RunManifest m;
  m.subcommand = j.at("subcommand").get<std::string>();
  m.config = j.value("config", nlohmann::json::object());
  m.seeds = j.value("seeds", std::map<std::string, std::uint64_t>{});
  m.input_digests = j.value("input_digests", std::map<std::string, std::string>{});
  m.outputs = j.value("outputs", std::vector<std::string>{});
  m.tool_version = j.value("tool_version", "");
  m.started = j.value("started", "");
  m.finished = j.value("finished", "");
  return m;
}

}  // namespace sketchsql
