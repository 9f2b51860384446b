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

#include "dihedral_rb/config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gtest/gtest.h"

using namespace dihedral_rb;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test");
}

const std::string kMinimal =
    "lengths = 2 4 8\n"
    "sequences_per_length = 10\n"
    "[group]\n"
    "j = 4\n";

}  // namespace

TEST(ParseConfig, MinimalDefaults) {
  const auto cfg = parse(kMinimal);
  EXPECT_EQ(cfg.plan.j, 4);
  EXPECT_EQ(cfg.plan.mode, Mode::standard);
  EXPECT_EQ(cfg.plan.lengths, (std::vector<int>{2, 4, 8}));
  EXPECT_EQ(cfg.plan.sequences_per_length, 10);
  EXPECT_EQ(cfg.plan.shots, 0);
  EXPECT_EQ(cfg.plan.seed, 0u);
  EXPECT_EQ(cfg.plan.threads, 1);
  EXPECT_EQ(cfg.bootstrap_resamples, 200);
  EXPECT_EQ(cfg.plan.noise.gate_error.kind, NoiseKind::none);
  EXPECT_FALSE(cfg.plan.noise.target_error);
  EXPECT_FALSE(cfg.plan.use_b2);
  EXPECT_EQ(cfg.data_path, "test.csv");
  EXPECT_EQ(cfg.report_path, "test.report.json");
}

TEST(ParseConfig, FullConfig) {
  const auto cfg = parse(
      "mode = interleaved\n"
      "lengths = 2, 4, 6\n"
      "sequences_per_length = 3\n"
      "shots = 100\n"
      "seed = 18446744073709551615\n"
      "prep = plus\n"
      "measurement = effect 1 1 0 0\n"
      "use_b2 = false\n"
      "threads = 3\n"
      "bootstrap = 0\n"
      "[group]\nj = 8\n"
      "[noise]\n"
      "gate = depolarizing p=0.99\n"
      "target = over_rotation angle=0.1 axis=0,0,2\n"
      "override = 3,1: depolarizing fidelity=0.9\n"
      "override = 0,0: none\n"
      "[output]\ndata_path = out/d.csv\nreport_path = out/r.json\n");
  EXPECT_EQ(cfg.plan.mode, Mode::interleaved);
  EXPECT_EQ(cfg.plan.lengths, (std::vector<int>{2, 4, 6}));
  EXPECT_EQ(cfg.plan.shots, 100);
  EXPECT_EQ(cfg.plan.seed, 18446744073709551615ull);
  EXPECT_EQ(cfg.plan.prep.bloch(), Eigen::Vector3d(1, 0, 0));
  EXPECT_EQ(cfg.plan.measurement.c, Eigen::Vector4d(1, 1, 0, 0));
  EXPECT_EQ(cfg.plan.use_b2, false);
  EXPECT_EQ(cfg.plan.threads, 3);
  EXPECT_EQ(cfg.bootstrap_resamples, 0);
  EXPECT_EQ(cfg.plan.noise.gate_error.kind, NoiseKind::depolarizing);
  ASSERT_TRUE(cfg.plan.noise.target_error);
  EXPECT_TRUE(build(*cfg.plan.noise.target_error).is_approx(z_rotation(0.1)));
  ASSERT_EQ(cfg.plan.noise.overrides.size(), 2u);
  EXPECT_TRUE(build(cfg.plan.noise.overrides.at(GroupElement{8, 3, 1})).is_approx(depolarizing(0.8)));
  EXPECT_EQ(cfg.data_path, "out/d.csv");
  EXPECT_EQ(cfg.report_path, "out/r.json");
}

TEST(ParseConfig, ZeroThreadsMeansHardware) {
  const auto cfg = parse("threads = 0\n" + kMinimal);
  EXPECT_GE(cfg.plan.threads, 1);
}

TEST(ParseConfig, Rejections) {
  EXPECT_THROW(parse("colour = red\n" + kMinimal), ConfigError);
  EXPECT_THROW(parse(kMinimal + "[noise]\nstrength = 3\n"), ConfigError);
  EXPECT_THROW(parse("lengths = 2 4\n[group]\nj = 4\n"), ConfigError);
  EXPECT_THROW(parse("sequences_per_length = 2\n[group]\nj = 4\n"), ConfigError);
  EXPECT_THROW(parse("lengths = 2\nsequences_per_length = 2\n"), ConfigError);
  EXPECT_THROW(parse("mode = fast\n" + kMinimal), ConfigError);
  EXPECT_THROW(parse("seed = -1\n" + kMinimal), ConfigError);
  EXPECT_THROW(parse("use_b2 = yes\n" + kMinimal), ConfigError);
  EXPECT_THROW(parse("lengths = 2 x\nsequences_per_length = 2\n[group]\nj = 4\n"), ConfigError);
  EXPECT_THROW(parse("bootstrap = -3\n" + kMinimal), ConfigError);
  EXPECT_THROW(parse(kMinimal + "j = 0\n"), ConfigError);
  EXPECT_THROW(parse(kMinimal + "[noise]\noverride = 4,0: none\n"), ConfigError);
  EXPECT_THROW(parse(kMinimal + "[noise]\noverride = 1,0: none\noverride = 1,0: none\n"), ConfigError);
}

TEST(ParseNoiseSpec, Grammar) {
  EXPECT_EQ(parse_noise_spec("none").kind, NoiseKind::none);
  EXPECT_TRUE(build(parse_noise_spec("depolarizing p=0.9")).is_approx(depolarizing(0.9)));
  EXPECT_TRUE(build(parse_noise_spec("depolarizing fidelity=0.95")).is_approx(depolarizing(0.9)));
  EXPECT_NEAR(avg_fidelity(build(parse_noise_spec("over_rotation fidelity=0.99"))), 0.99, 1e-12);
  EXPECT_TRUE(build(parse_noise_spec("over_rotation angle=0.3 axis=1,0,0"))
                  .is_approx(unitary_to_superop({Eigen::Vector3d::UnitX(), 0.3})));
  const auto composed = parse_noise_spec("over_rotation angle=0.2 ; depolarizing p=0.5");
  EXPECT_EQ(composed.kind, NoiseKind::composed);
  EXPECT_TRUE(build(composed).is_approx(compose(depolarizing(0.5), z_rotation(0.2))));
}

TEST(ParseNoiseSpec, Errors) {
  EXPECT_THROW(parse_noise_spec(""), ConfigError);
  EXPECT_THROW(parse_noise_spec("amplitude_damping g=0.1"), ConfigError);
  EXPECT_THROW(parse_noise_spec("depolarizing"), ConfigError);
  EXPECT_THROW(parse_noise_spec("depolarizing p=0.9 fidelity=0.95"), ConfigError);
  EXPECT_THROW(parse_noise_spec("depolarizing p=-0.1"), ConfigError);
  EXPECT_THROW(parse_noise_spec("depolarizing p=1.5"), ConfigError);
  EXPECT_THROW(parse_noise_spec("depolarizing p=abc"), ConfigError);
  EXPECT_THROW(parse_noise_spec("depolarizing p=0.9 q=1"), ConfigError);
  EXPECT_THROW(parse_noise_spec("depolarizing 0.9"), ConfigError);
  EXPECT_THROW(parse_noise_spec("over_rotation fidelity=0.2"), ConfigError);
  EXPECT_THROW(parse_noise_spec("over_rotation angle=0.1 axis=0,0"), ConfigError);
  EXPECT_THROW(parse_noise_spec("over_rotation angle=0.1 axis=0,0,0"), ConfigError);
}

TEST(ParseState, NamedAndBloch) {
  EXPECT_EQ(parse_state("zero").c, ket0().c);
  EXPECT_EQ(parse_state("one").c, ket1().c);
  EXPECT_EQ(parse_state("minus_i").bloch(), Eigen::Vector3d(0, -1, 0));
  EXPECT_EQ(parse_state("mixed").c, maximally_mixed().c);
  EXPECT_EQ(parse_state("bloch 0.6 0 0.8").bloch(), Eigen::Vector3d(0.6, 0, 0.8));
  EXPECT_THROW(parse_state("bloch 1 2"), ConfigError);
  EXPECT_THROW(parse_state("up"), ConfigError);
  EXPECT_THROW(parse_effect("effect 1 0 0"), ConfigError);
  EXPECT_EQ(parse_effect("plus").c, ket_plus().c);
}

TEST(ParseOverride, Examples) {
  const auto [g, spec] = parse_override("5,1: depolarizing p=0.8", 8);
  EXPECT_EQ(g, (GroupElement{8, 5, 1}));
  EXPECT_TRUE(build(spec).is_approx(depolarizing(0.8)));
  EXPECT_THROW(parse_override("5 1 depolarizing p=0.8", 8), ConfigError);
  EXPECT_THROW(parse_override("5: none", 8), ConfigError);
  EXPECT_THROW(parse_override("1,2: none", 8), ConfigError);
}

TEST(LoadConfig, BundledConfigsParseAndValidate) {
  for (const char* name : {"paper_d8.cfg", "paper_interleaved_regime1.cfg", "paper_interleaved_regime2.cfg",
                           "noiseless.cfg"}) {
    const auto cfg = load_config(std::filesystem::path(DIHEDRAL_RB_CONFIG_DIR) / name);
    EXPECT_NO_THROW(cfg.plan.validate()) << name;
  }
  const auto d8 = load_config(std::filesystem::path(DIHEDRAL_RB_CONFIG_DIR) / "paper_d8.cfg");
  EXPECT_EQ(d8.plan.j, 8);
  EXPECT_NEAR(avg_fidelity(build(d8.plan.noise.gate_error)), 0.9975, 1e-12);
  EXPECT_NEAR(avg_fidelity(build(*d8.plan.noise.target_error)), 0.99, 1e-12);
  EXPECT_THROW(load_config("/nonexistent/x.cfg"), ConfigError);
}
