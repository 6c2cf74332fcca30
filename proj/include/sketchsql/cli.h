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

// The `sketchsql` command line.
//
// Option values come from flags, then from the --config file, then from the
// defaults. The config file is flat: one `key = value` per line, where key is
// a long option name without the dashes ('_' and '-' are interchangeable),
// '#' starts a comment, and a list is written `[a, b]`. Keys that the chosen
// subcommand does not have are ignored, so one file can serve several
// subcommands.
//
// Outputs go to --out, which defaults to $SKETCHSQL_OUT, then to
// ./sketchsql-out. Every run writes manifest-<subcommand>.json there.
//
// Exit status: 0 on success, 1 when validation fails or an input is
// unusable, 2 on a usage error.

#ifndef SKETCHSQL_CLI_H_
#define SKETCHSQL_CLI_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sketchsql {

inline constexpr std::string_view kOutDirEnv = "SKETCHSQL_OUT";
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

std::string_view ToolVersion();

/// Lowercase hex SHA-256 of a file's bytes. Throws IoError when unreadable.
std::string Sha256File(const std::filesystem::path& path);

struct RunManifest {
  std::string subcommand;
  // Every option of the subcommand after flags, config file and defaults.
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> input_digests;  // path -> sha256
  std::vector<std::string> outputs;
  std::string tool_version;
  std::string started;   // ISO 8601, UTC
  std::string finished;

  /// `sketchsql <subcommand> --key=value ...` rebuilt from `config`.
  std::string CommandLine() const;
  nlohmann::json ToJson() const;
  static RunManifest FromJson(const nlohmann::json& j);
};

/// Runs one subcommand. `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
           std::ostream& err);

}  // namespace sketchsql

#endif  // SKETCHSQL_CLI_H_
