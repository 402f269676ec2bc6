// Copyright 2026 The bandext Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bandext/cgan.hpp"
#include "bandext/core.hpp"
#include "bandext/synth.hpp"
#include "test_support.hpp"

namespace bandext {
namespace {

namespace fs = std::filesystem;
using bandext::testing::TempDir;
using bandext::testing::read_bytes;

struct Outcome {
  int code = -1;
  std::string err;
};

// Runs the real binary so exit codes and stream handling are exercised.
Outcome cli(const std::string& args, const fs::path& scratch, const std::string& env = "BANDEXT_SEED= ") {
  const auto err_file = scratch / "stderr.txt";
  const std::string cmd = "env " + env + " '" BANDEXT_CLI_PATH "' " + args + " > /dev/null 2> '" +
                          err_file.string() + "'";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_file);
  std::stringstream ss;
  ss << in.rdbuf();
  o.err = ss.str();
  return o;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// Byte map of every regular file under root, keyed by relative path.
std::map<std::string, std::vector<unsigned char>> snapshot(const fs::path& root) {
  std::map<std::string, std::vector<unsigned char>> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = read_bytes(e.path());
  return files;
}

fs::path tiny_train_config(const fs::path& dir) {
  cgan::TrainConfig cfg;
  cfg.epochs = 2;
  cfg.checkpoint_every = 1;
  cfg.generator.encoder = {4, 4, 4, 4};
  cfg.generator.decoder = {4, 4, 4, 4};
  cfg.discriminator.conv = {4, 4, 4};
  const auto path = dir / "train.json";
  std::ofstream(path) << cgan::config_to_json(cfg);
  return path;
}

TEST(Cli, UsageErrors) {
  TempDir dir("cli_usage");
  EXPECT_EQ(cli("", dir.path()).code, 2);
  EXPECT_EQ(cli("frobnicate", dir.path()).code, 2);
  EXPECT_EQ(cli("tie --out x", dir.path()).code, 2);
  EXPECT_EQ(cli("--help", dir.path()).code, 0);
}

TEST(Cli, MissingManifestIsDomainError) {
  TempDir dir("cli_missing");
  const auto missing = dir / "nowhere" / "manifest.json";
  const auto o = cli("tie --manifest " + q(missing) + " --out " + q(dir / "out"), dir.path());
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find(missing.string()), std::string::npos) << o.err;
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, SynthWritesDatasetAndRunRecord) {
  TempDir dir("cli_synth");
  ASSERT_EQ(cli("synth --seed 5 --out " + q(dir / "data"), dir.path()).code, 0);
  const auto manifest = load_manifest(dir / "data" / "manifest.json");
  EXPECT_EQ(manifest.pairs.size(), 12u);
  EXPECT_TRUE(fs::exists(dir / "data" / "run.json"));
  for (const auto& e : fs::directory_iterator(dir.path()))
    EXPECT_EQ(e.path().filename().string().find(".partial"), std::string::npos);
}

TEST(Cli, SeedFallsBackToEnvironment) {
  TempDir dir("cli_env");
  ASSERT_EQ(cli("synth --seed 77 --out " + q(dir / "flag"), dir.path()).code, 0);
  ASSERT_EQ(cli("synth --out " + q(dir / "env"), dir.path(), "BANDEXT_SEED=77").code, 0);
  ASSERT_EQ(cli("synth --out " + q(dir / "other"), dir.path(), "BANDEXT_SEED=78").code, 0);
  const auto flag = read_bytes(dir / "flag" / "W01_seismic.bxt");
  EXPECT_EQ(flag, read_bytes(dir / "env" / "W01_seismic.bxt"));
  EXPECT_NE(flag, read_bytes(dir / "other" / "W01_seismic.bxt"));
  EXPECT_EQ(cli("synth --out " + q(dir / "bad"), dir.path(), "BANDEXT_SEED=banana").code, 1);
}

TEST(Cli, FilterAndSpectrum) {
  TempDir dir("cli_filter");
  ASSERT_EQ(cli("synth --out " + q(dir / "data"), dir.path()).code, 0);
  const auto seismic = dir / "data" / "W01_seismic.bxt";
  ASSERT_EQ(cli("filter --input " + q(seismic) + " --band 0-0-8-16 --out " + q(dir / "f"), dir.path()).code, 0);
  const auto filtered = read_trace(dir / "f" / "W01_seismic.bxt");
  const auto expected = dsp::bandpass_trapezoid(read_trace(seismic), dsp::bands::kLowFrequency);
  ASSERT_EQ(filtered.size(), expected.size());
  // Samples are stored as 32-bit floats.
  for (std::size_t i = 0; i < filtered.size(); ++i)
    EXPECT_EQ(filtered.samples[i], static_cast<double>(static_cast<float>(expected.samples[i])));
  EXPECT_EQ(cli("filter --input " + q(seismic) + " --band 8-0-4-16 --out " + q(dir / "g"), dir.path()).code, 1);
  ASSERT_EQ(cli("spectrum --original " + q(seismic) + " --generated " + q(dir / "f" / "W01_seismic.bxt") +
                    " --out " + q(dir / "s"),
                dir.path())
                .code,
            0);
  EXPECT_TRUE(fs::exists(dir / "s" / "spectrum_report.csv"));
}

// synth, tie, select, train, infer, qc; twice with the same seed.
std::map<std::string, std::vector<unsigned char>> pipeline(const fs::path& root, const fs::path& config) {
  const auto s = [&](const std::string& args) {
    const auto o = cli(args, root);
    EXPECT_EQ(o.code, 0) << args << "\n" << o.err;
  };
  s("synth --seed 11 --out " + q(root / "data"));
  s("tie --manifest " + q(root / "data" / "manifest.json") + " --out " + q(root / "tie"));
  s("select --seed 11 --manifest " + q(root / "data" / "manifest.json") + " --out " + q(root / "sel"));
  s("train --seed 11 --manifest " + q(root / "sel" / "manifest.json") + " --config " + q(config) + " --out " +
    q(root / "model"));
  s("infer --seed 11 --realizations 4 --checkpoints " + q(root / "model") + " --input " +
    q(root / "data" / "W02_seismic.bxt") + " --out " + q(root / "infer"));
  s("qc --seed 11 --realizations 3 --manifest " + q(root / "sel" / "manifest.json") + " --checkpoints " +
    q(root / "model") + " --out " + q(root / "qc"));
  fs::remove(root / "stderr.txt");
  return snapshot(root);
}

TEST(Cli, PipelineIsByteDeterministic) {
  TempDir a("cli_pipe_a"), b("cli_pipe_b"), cfg("cli_pipe_cfg");
  const auto config = tiny_train_config(cfg.path());
  const auto first = pipeline(a.path(), config);
  const auto second = pipeline(b.path(), config);
  EXPECT_TRUE(first.count("model/ckpt_epoch_0002.bin"));
  EXPECT_TRUE(first.count("model/losses.csv"));
  EXPECT_TRUE(first.count("qc/qc_report.csv"));
  EXPECT_TRUE(first.count("tie/tie_scores.csv"));
  ASSERT_EQ(first.size(), second.size());
  for (const auto& [name, bytes] : first) {
    if (name.ends_with("run.json")) continue;  // records absolute paths
    ASSERT_TRUE(second.count(name)) << name;
    EXPECT_EQ(bytes, second.at(name)) << name;
  }
}

TEST(Cli, InferWorkerCountDoesNotChangeBytes) {
  TempDir dir("cli_workers");
  const auto config = tiny_train_config(dir.path());
  ASSERT_EQ(cli("synth --out " + q(dir / "data"), dir.path()).code, 0);
  ASSERT_EQ(cli("train --manifest " + q(dir / "data" / "manifest.json") + " --config " + q(config) + " --out " +
                    q(dir / "model"),
                dir.path())
                .code,
            0);
  Volume volume;
  Rng rng(3);
  for (int il = 0; il < 4; ++il)
    for (int xl = 0; xl < 4; ++xl)
      volume.traces[{il, xl}] = testing::make_trace(testing::random_samples(rng, 512), TraceKind::Seismic,
                                                    "t" + std::to_string(il) + std::to_string(xl));
  write_volume(volume, dir / "vol");
  for (const std::string w : {"1", "4"}) {
    const auto args = "infer --seed 3 --realizations 5 --workers " + w + " --checkpoints " + q(dir / "model") +
                      " --input " + q(dir / "vol") + " --out " + q(dir / ("w" + w));
    ASSERT_EQ(cli(args, dir.path()).code, 0);
  }
  const auto one = snapshot(dir / "w1" / "volume");
  EXPECT_EQ(one.size(), 17u);
  EXPECT_EQ(one, snapshot(dir / "w4" / "volume"));
}

}  // namespace
}  // namespace bandext
