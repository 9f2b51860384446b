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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "dihedral_rb/cli.hpp"
#include "test_support.hpp"

using namespace dihedral_rb;
namespace dt = dihedral_rb::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const fs::path kConfigs = DIHEDRAL_RB_CONFIG_DIR;

fs::path scratch_dir() {
  const auto d = fs::temp_directory_path() / "dihedral_rb_acceptance";
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Run a bundled config through the CLI entry point into `dir`; returns the
/// parsed report.
nlohmann::json run_bundled(const std::string& name, const fs::path& dir, double& runtime) {
  cli::RunOverrides o;
  o.out_dir = dir;
  std::ostringstream out, err;
  const auto t0 = Clock::now();
  const int code = cli::run(kConfigs / name, o, out, err);
  runtime = seconds_since(t0);
  if (code != cli::kOk) throw std::runtime_error(name + " exited " + std::to_string(code) + ": " + err.str());
  const auto cfg = load_config(kConfigs / name);
  return nlohmann::json::parse(slurp(dir / cfg.report_path));
}

bool within(double v, double centre, double tol) { return std::abs(v - centre) <= tol; }

Outcome twirl_closed_form() {
  std::mt19937_64 rng(101);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Superoperator e = from_kraus(dt::random_unital_kraus(rng, 1 + i % 4));
    for (int j : {4, 8}) {
      const auto [p0, p1] = decay_params(e);
      const Eigen::Matrix4d closed = Eigen::Vector4d(1, p1, p1, p0).asDiagonal();
      worst = std::max(worst, (twirl(e, j).matrix() - closed).cwiseAbs().maxCoeff());
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-12 && t < 1.0, fmt("max deviation %.3g (tol 1e-12), %.3f s (limit 1 s)", worst, t)};
}

Outcome exact_decay_oracle() {
  std::mt19937_64 rng(102);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Superoperator e = from_kraus(dt::random_kraus(rng, 1 + trial % 3));
    std::normal_distribution<double> g;
    const Eigen::Vector3d r = Eigen::Vector3d(g(rng), g(rng), g(rng)).normalized() * 0.9;
    const Eigen::Vector3d s = Eigen::Vector3d(g(rng), g(rng), g(rng)).normalized();
    const PauliVector prep = bloch_state(r.x(), r.y(), r.z());
    const PauliVector effect = bloch_state(s.x(), s.y(), s.z());
    const auto [p0, p1] = decay_params(e);
    const auto k = spam_constants(e, prep, effect);
    for (int m = 1; m <= 3; ++m) {
      for (int b = 0; b < 4; ++b) {
        const double brute = dt::exhaustive_pr(e, 4, prep, effect, m, b / 2, b % 2);
        worst = std::max(worst, std::abs(brute - survival_model(k, p0, p1, m, b / 2, b % 2)));
      }
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-10 && t < 10.0, fmt("max deviation %.3g (tol 1e-10), %.3f s (limit 10 s)", worst, t)};
}

Outcome d8_reproduction(const fs::path& dir) {
  double t = 0.0;
  const auto report = run_bundled("paper_d8.cfg", dir, t);
  const double f = report["result"]["fidelity"]["value"].get<double>();
  const double err = report["result"]["fidelity"]["stderr"].get<double>();
  return {within(f, 0.9925, 0.002) && t < 120.0,
          fmt("F_avg = %.6f +- %.6f (target 0.9925 +- 0.002), %.1f s", f, err, t)};
}

Outcome regime1(const fs::path& dir) {
  double t = 0.0;
  const auto report = run_bundled("paper_interleaved_regime1.cfg", dir, t);
  const double f = report["target"]["fidelity"]["value"].get<double>();
  const double err = report["target"]["fidelity"]["stderr"].get<double>();
  return {within(f, 0.990, 0.002) && t < 120.0,
          fmt("F_T = %.6f +- %.6f (target 0.990 +- 0.002), %.1f s", f, err, t)};
}

Outcome regime2(const fs::path& dir) {
  double t = 0.0;
  const auto report = run_bundled("paper_interleaved_regime2.cfg", dir, t);
  const auto& target = report["target"]["fidelity"];
  const double point = target["value"].get<double>();
  const double lo = target["interval"][0].get<double>();
  const double hi = target["interval"][1].get<double>();
  const auto cfg = load_config(kConfigs / "paper_interleaved_regime2.cfg");
  const double truth = avg_fidelity(build(*cfg.plan.noise.target_error));
  const bool lo_ok = within(lo, 0.928, 0.01);
  const bool hi_ok = within(hi, 0.995, 0.01);
  const bool inside = lo <= truth && truth <= hi;
  const bool point_ok = within(point, 0.966, 0.01);
  return {lo_ok && hi_ok && inside && point_ok,
          fmt("interval [%.4f, %.4f] vs [0.928, 0.995] +- 0.01 (low %s, high %s); true F_T %.4f %s; "
              "point %.4f vs 0.966 +- 0.01 (%s); %.1f s",
              lo, hi, lo_ok ? "ok" : "off", hi_ok ? "ok" : "off", truth, inside ? "inside" : "outside", point,
              point_ok ? "ok" : "off", t)};
}

Outcome bound_validity() {
  std::mt19937_64 rng(106);
  std::uniform_int_distribution<int> rank(1, 4);
  int violations = 0, outside = 0, skipped = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 1000; ++i) {
    const auto ref = dt::random_kraus(rng, rank(rng));
    const auto target = dt::random_kraus(rng, rank(rng));
    const double chi_ref = chi00(avg_fidelity(from_kraus(ref)));
    const double chi_t = chi00(avg_fidelity(from_kraus(target)));
    const double chi_comp = chi00(avg_fidelity(from_kraus(dt::compose_kraus(target, ref))));
    const double margin = bound_margin(chi_comp, chi_ref, chi_t);
    worst = std::min(worst, margin);
    if (margin < -1e-10) ++violations;
    if (chi_ref <= 0.0 || chi_comp <= 0.0) {
      ++skipped;
      continue;
    }
    const auto b = interleaved_bound(chi_comp, chi_ref);
    if (chi_t < b.chi_low - 1e-10 || chi_t > b.chi_high + 1e-10) ++outside;
  }
  return {violations == 0 && outside == 0,
          fmt("%d violations, smallest margin %.3g; %d true values outside the solved interval (%d pairs with "
              "chi = 0 not solvable)",
              violations, worst, outside, skipped)};
}

Outcome fit_recovery() {
  double worst = 0.0;
  std::vector<double> ms;
  for (double m = 1; m <= 300; m = std::ceil(m * 1.5)) ms.push_back(m);
  ms.push_back(300);
  for (double a : {0.25, 0.5, 1.0}) {
    for (double p : {0.9, 0.99, 0.999}) {
      std::vector<DecayPoint> pts;
      for (double m : ms) pts.push_back({m, a * std::pow(p, m), 0.0});
      worst = std::max(worst, std::abs(fit_single_exponential(pts).rate - p));
    }
  }
  return {worst < 1e-6, fmt("max |dp| = %.3g (tol 1e-6)", worst)};
}

Outcome haar_check() {
  std::mt19937_64 rng(108);
  double worst = 0.0, worst_se = 0.0, worst_z = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto kraus = dt::random_kraus(rng, 1 + i % 4);
    double se = 0.0;
    const double mc = dt::haar_fidelity(kraus, 100000, rng, &se);
    const double diff = std::abs(mc - avg_fidelity(from_kraus(kraus)));
    worst = std::max(worst, diff);
    worst_se = std::max(worst_se, se);
    worst_z = std::max(worst_z, diff / se);
  }
  return {worst <= 1e-3, fmt("max |F - F_MC| = %.3g (tol 1e-3); largest MC stderr %.2g, largest |z| %.2f", worst,
                             worst_se, worst_z)};
}

Outcome group_exhaustives() {
  int failures = 0;
  for (int j = 1; j <= 16; ++j) {
    const auto all = elements(j);
    const auto e = GroupElement::identity(j);
    if (all.size() != static_cast<std::size_t>(2 * j)) ++failures;
    for (const auto& a : all) {
      if (multiply(a, e) != a || multiply(e, a) != a) ++failures;
      if (multiply(a, inverse(a)) != e || multiply(inverse(a), a) != e) ++failures;
      const Eigen::Matrix4d ua = dt::liouville_by_traces({dt::dihedral_unitary(j, a.z, a.x)});
      if (!to_superop(a).matrix().isApprox(ua, 1e-12) && (to_superop(a).matrix() - ua).cwiseAbs().maxCoeff() > 1e-12) {
        ++failures;
      }
      for (const auto& b : all) {
        const auto ab = multiply(a, b);
        if (!ab.is_valid()) ++failures;
        if ((to_superop(ab).matrix() - (to_superop(a) * to_superop(b)).matrix()).cwiseAbs().maxCoeff() > 1e-12) {
          ++failures;
        }
        for (const auto& c : all) {
          if (multiply(ab, c) != multiply(a, multiply(b, c))) ++failures;
        }
      }
    }
  }
  return {failures == 0, fmt("%d failed checks over j = 1..16", failures)};
}

Outcome determinism(const fs::path& dir) {
  const auto a = dir / "first";
  const auto b = dir / "second";
  double ta = 0.0, tb = 0.0;
  run_bundled("paper_d8.cfg", a, ta);
  run_bundled("paper_d8.cfg", b, tb);
  const auto csv_a = slurp(a / "paper_d8.csv");
  const auto csv_b = slurp(b / "paper_d8.csv");
  return {!csv_a.empty() && csv_a == csv_b, fmt("%zu-byte CSVs %s", csv_a.size(), csv_a == csv_b ? "identical" : "differ")};
}

}  // namespace

int main() {
  const auto dir = scratch_dir();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"twirl closed form", twirl_closed_form},
      {"exact decay oracle", exact_decay_oracle},
      {"D8 benchmark reproduction", [&] { return d8_reproduction(dir / "d8"); }},
      {"interleaved regime 1", [&] { return regime1(dir / "regime1"); }},
      {"interleaved regime 2", [&] { return regime2(dir / "regime2"); }},
      {"bound validity oracle", bound_validity},
      {"fit recovery", fit_recovery},
      {"Haar cross-check", haar_check},
      {"group exhaustives", group_exhaustives},
      {"determinism", [&] { return determinism(dir / "determinism"); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail << std::endl;
  }
  fs::remove_all(dir);
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
