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

#include "sketchsql/cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sketchsql/dataio.h"

namespace sketchsql {
namespace {

namespace fs = std::filesystem;

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result Cli(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int status = RunCli(args, in, out, err);
  return {status, out.str(), err.str()};
}

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sketchsql_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

nlohmann::json ReadJson(const fs::path& p) {
  std::ifstream f(p);
  return nlohmann::json::parse(f);
}

TEST(CliTest, NoArgumentsPrintsUsage) {
  const Result r = Cli({});
  EXPECT_EQ(r.status, kExitUsage);
  EXPECT_NE(r.out.find("Subcommands:"), std::string::npos);
}

TEST(CliTest, UnknownFlagIsAUsageError) {
  const Result r = Cli({"synth", "--no-such-flag"});
  EXPECT_EQ(r.status, kExitUsage);
  EXPECT_NE(r.err.find("--no-such-flag"), std::string::npos);
  EXPECT_NE(r.err.find("Usage:"), std::string::npos);
}

TEST(CliTest, RenderJerseySketch) {
  const fs::path dir = Scratch("render");
  const Result r = Cli({"render", "--sketch", R"({"sel": 0, "agg": 0, "conds": [[1, 0, "42"]]})",
                        "--headers", "Player Name,Jersey", "--out", dir.string()});
  EXPECT_EQ(r.status, kExitOk) << r.err;
  EXPECT_EQ(r.out, "SELECT (Player Name) FROM _ WHERE Jersey = 42\n");
  EXPECT_TRUE(fs::exists(dir / "manifest-render.json"));
  EXPECT_EQ(Cli({"render", "--sketch", "{nope", "--headers", "a", "--out", dir.string()}).status,
            kExitValidation);
}

TEST(CliTest, Sha256KnownVector) {
  const fs::path dir = Scratch("sha");
  std::ofstream(dir / "abc") << "abc";
  EXPECT_EQ(Sha256File(dir / "abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_THROW(Sha256File(dir / "missing"), IoError);
}

TEST(CliTest, FlagsBeatConfigFileBeatsDefaults) {
  const fs::path dir = Scratch("precedence");
  std::ofstream(dir / "run.cfg") << "# shared settings\n"
                                    "n_tables = 3\n"
                                    "seed = 9\n"
                                    "epochs = 7\n";
  const Result r = Cli({"synth", "--config", (dir / "run.cfg").string(), "--seed", "4",
                        "--probe-tables", "0", "--out", dir.string()});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  const auto m = ReadJson(dir / "manifest-synth.json");
  EXPECT_EQ(m["config"]["n-tables"], "3");
  EXPECT_EQ(m["config"]["seed"], "4");
  EXPECT_EQ(m["config"]["rows"], "12");
  EXPECT_FALSE(m["config"].contains("epochs"));
  EXPECT_TRUE(m["input_digests"].contains((dir / "run.cfg").string()));
  EXPECT_EQ(LoadTables(dir / "tables.jsonl").size(), 3u);
}

TEST(CliTest, ManifestAloneReproducesTheRun) {
  const fs::path a = Scratch("repro_a");
  ASSERT_EQ(Cli({"synth", "--n-tables", "4", "--seed", "12", "--out", a.string()}).status, kExitOk);
  const RunManifest m = RunManifest::FromJson(ReadJson(a / "manifest-synth.json"));
  EXPECT_EQ(m.subcommand, "synth");
  EXPECT_EQ(m.seeds.at("seed"), 12u);
  EXPECT_FALSE(m.started.empty());

  const fs::path b = Scratch("repro_b");
  std::vector<std::string> args = {m.subcommand};
  for (const auto& [key, value] : m.config.items()) {
    const std::string v = key == "out" ? b.string() : value.get<std::string>();
    if (!v.empty()) args.push_back("--" + key + "=" + v);
  }
  ASSERT_EQ(Cli(args).status, kExitOk);
  for (const auto& out : m.outputs) {
    const fs::path name = fs::path(out).filename();
    EXPECT_EQ(Sha256File(a / name), Sha256File(b / name)) << name;
  }
}

TEST(CliTest, ValidationFailureExitsOne) {
  const fs::path dir = Scratch("validate");
  ASSERT_EQ(Cli({"synth", "--n-tables", "2", "--out", dir.string()}).status, kExitOk);
  Corpus c = LoadExamples(dir / "train.jsonl");
  c.examples[0].gold.select_column = 99;
  WriteExamples(dir / "bad.jsonl", c);
  const Result r = Cli({"validate", "--data", (dir / "bad.jsonl").string(), "--tables",
                        (dir / "tables.jsonl").string(), "--out", dir.string()});
  EXPECT_EQ(r.status, kExitValidation);
  EXPECT_TRUE(fs::exists(dir / "manifest-validate.json"));
  EXPECT_EQ(ReadJson(dir / "validate.json")["violations"].size(), 1u);

  EXPECT_EQ(Cli({"validate", "--data", (dir / "missing.jsonl").string(), "--tables",
                 (dir / "tables.jsonl").string(), "--out", dir.string()})
                .status,
            kExitValidation);
}

TEST(CliTest, OutputDirectoryFromEnvironment) {
  const fs::path dir = Scratch("env");
  ::setenv(std::string(kOutDirEnv).c_str(), dir.string().c_str(), 1);
  const Result r = Cli({"synth", "--n-tables", "2"});
  ::unsetenv(std::string(kOutDirEnv).c_str());
  ASSERT_EQ(r.status, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "manifest-synth.json"));
  EXPECT_TRUE(fs::exists(dir / "tables.jsonl"));
}

TEST(CliTest, ReplLeavesInputsUntouched) {
  const fs::path dir = Scratch("repl");
  const std::string out = dir.string();
  ASSERT_EQ(Cli({"synth", "--n-tables", "3", "--out", out}).status, kExitOk);
  ASSERT_EQ(Cli({"train", "--data", out + "/train.jsonl", "--tables", out + "/tables.jsonl",
                 "--epochs", "1", "--d-model", "16", "--heads", "2", "--out", out})
                .status,
            kExitOk);
  std::vector<std::string> inputs = {out + "/tables.jsonl", out + "/model.ckpt"};
  std::vector<std::string> before;
  for (const auto& p : inputs) before.push_back(Sha256File(p));
  const Result r = Cli({"repl", "--checkpoint", out + "/model.ckpt", "--tables",
                        out + "/tables.jsonl", "--strategy", "rel", "--out", out},
                       "what is it\n:table missing\n:quit\n");
  EXPECT_EQ(r.status, kExitOk) << r.err;
  EXPECT_NE(r.out.find("SELECT"), std::string::npos);
  EXPECT_NE(r.out.find("unknown table"), std::string::npos);
  for (std::size_t i = 0; i < inputs.size(); ++i) EXPECT_EQ(Sha256File(inputs[i]), before[i]);
}

}  // namespace
}  // namespace sketchsql
