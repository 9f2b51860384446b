// Copyright 2026 The dihedral-rb Authors
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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dihedral_rb/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = dihedral_rb::cli;
  CLI::App app{"Dihedral randomized benchmarking simulator"};
  app.require_subcommand(1);

  std::string run_config;
  std::uint64_t seed = 0;
  std::vector<int> lengths;
  std::string out_dir;
  int threads = 0;
  auto* run = app.add_subcommand("run", "Simulate an experiment, write decay data and a fit report");
  run->add_option("config", run_config, "Experiment config file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the master seed");
  auto* lengths_opt = run->add_option("--lengths", lengths, "Override the sequence-length grid")->delimiter(',');
  auto* out_opt = run->add_option("--out-dir", out_dir,
                                  std::string("Directory for relative output paths (default $") + cli::kOutDirEnv + ")");
  auto* threads_opt = run->add_option("--threads", threads, "Worker threads for sequence evaluation")->check(CLI::PositiveNumber);

  std::string verify_config;
  auto* verify = app.add_subcommand("verify", "Check a config without simulating");
  verify->add_option("config", verify_config, "Experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigInvalid;
  }

  if (*verify) return cli::verify(verify_config, std::cout, std::cerr);

  cli::RunOverrides overrides;
  if (*seed_opt) overrides.seed = seed;
  if (*lengths_opt) overrides.lengths = lengths;
  if (*out_opt) overrides.out_dir = std::filesystem::path(out_dir);
  if (*threads_opt) overrides.threads = threads;
  return cli::run(run_config, overrides, std::cout, std::cerr);
}
