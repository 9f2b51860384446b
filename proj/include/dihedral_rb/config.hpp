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

// Experiment configuration files.
//
// INI-style `key = value` text read with Boost.Program_options; `[section]`
// headers prefix their keys (group.j, noise.gate, output.data_path, ...).
// Unknown keys are rejected. Example:
//
//   mode = standard
//   lengths = 2 4 8 16 32
//   sequences_per_length = 500
//   shots = 0
//   seed = 1
//   prep = bloch 0.7071067811865476 0 0.7071067811865476
//   measurement = bloch 0.7071067811865476 0 0.7071067811865476
//
//   [group]
//   j = 8
//
//   [noise]
//   gate = depolarizing fidelity=0.9975
//   target = over_rotation fidelity=0.99 axis=0,0,1
//   override = 3,1: depolarizing p=0.9
//
//   [output]
//   data_path = d8.csv
//   report_path = d8.json
//
// Noise terms are `none`, `depolarizing p=P | fidelity=F`, and
// `over_rotation angle=RAD | fidelity=F [axis=X,Y,Z]`; several terms joined
// by `;` are applied left to right.

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <boost/program_options.hpp>

#include "dihedral_rb/errors.hpp"
#include "dihedral_rb/group.hpp"
#include "dihedral_rb/liouville.hpp"
#include "dihedral_rb/noise.hpp"
#include "dihedral_rb/protocol.hpp"

namespace dihedral_rb {

/// Default preparation and measurement: the x-z plane state at 45 degrees,
/// which gives both decay curves a nonzero amplitude. A pole state such as
/// `zero` leaves the faithful-sector curve identically zero.
inline constexpr const char* kDefaultState = "bloch 0.70710678118654752 0 0.70710678118654752";

struct ExperimentConfig {
  ExperimentPlan plan;
  int bootstrap_resamples = 200;
  std::string data_path;
  std::string report_path;
};

namespace config_detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string> words(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline double to_double(std::string_view s, std::string_view what) {
  const std::string text(trim(s));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size()) {
    throw ConfigError("invalid number for " + std::string(what) + ": '" + text + "'");
  }
  return v;
}

inline int to_int(std::string_view s, std::string_view what) {
  const auto text = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("invalid integer for " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return v;
}

inline Eigen::Vector3d parse_axis(std::string_view s) {
  const auto parts = split(s, ',');
  if (parts.size() != 3) throw ConfigError("axis needs three comma-separated components");
  Eigen::Vector3d a(to_double(parts[0], "axis"), to_double(parts[1], "axis"), to_double(parts[2], "axis"));
  if (a.norm() == 0.0) throw ConfigError("axis must be nonzero");
  return a.normalized();
}

inline NoiseSpec parse_term(std::string_view term) {
  const auto tokens = words(term);
  if (tokens.empty()) throw ConfigError("empty noise term");
  const std::string& kind = tokens[0];
  std::map<std::string, std::string> args;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string::npos) throw ConfigError("noise argument '" + tokens[i] + "' is not key=value");
    if (!args.emplace(tokens[i].substr(0, eq), tokens[i].substr(eq + 1)).second) {
      throw ConfigError("duplicate noise argument '" + tokens[i].substr(0, eq) + "'");
    }
  }
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = args.find(key);
    if (it == args.end()) return std::nullopt;
    std::string v = it->second;
    args.erase(it);
    return v;
  };

  NoiseSpec spec;
  try {
    if (kind == "none") {
      spec = NoiseSpec::none();
    } else if (kind == "depolarizing") {
      const auto p = take("p");
      const auto f = take("fidelity");
      if (p.has_value() == f.has_value()) throw ConfigError("depolarizing needs exactly one of p= or fidelity=");
      const double value = p ? to_double(*p, "depolarizing p") : depolarizing_for_fidelity(to_double(*f, "fidelity"));
      depolarizing(value);  // range check
      spec = NoiseSpec::depolarizing_channel(value);
    } else if (kind == "over_rotation") {
      const auto angle = take("angle");
      const auto f = take("fidelity");
      const auto axis_text = take("axis");
      if (angle.has_value() == f.has_value()) {
        throw ConfigError("over_rotation needs exactly one of angle= or fidelity=");
      }
      const Eigen::Vector3d axis = axis_text ? parse_axis(*axis_text) : Eigen::Vector3d::UnitZ();
      spec = angle ? NoiseSpec::over_rotation({axis, to_double(*angle, "angle")})
                   : over_rotation_for_fidelity(axis, to_double(*f, "fidelity"));
    } else {
      throw ConfigError("unknown noise kind '" + kind + "'");
    }
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (!args.empty()) throw ConfigError("unknown argument '" + args.begin()->first + "' for noise kind " + kind);
  return spec;
}

}  // namespace config_detail

inline NoiseSpec parse_noise_spec(std::string_view text) {
  const auto terms = config_detail::split(text, ';');
  if (terms.size() == 1) return config_detail::parse_term(terms[0]);
  std::vector<NoiseSpec> parts;
  for (const auto& t : terms) parts.push_back(config_detail::parse_term(t));
  return NoiseSpec::composed(std::move(parts));
}

/// `zero | one | plus | minus | plus_i | minus_i | mixed | bloch X Y Z`.
inline PauliVector parse_state(std::string_view text) {
  const auto w = config_detail::words(text);
  if (w.empty()) throw ConfigError("empty state");
  if (w.size() == 1) {
    if (w[0] == "zero") return ket0();
    if (w[0] == "one") return ket1();
    if (w[0] == "plus") return ket_plus();
    if (w[0] == "minus") return bloch_state(-1, 0, 0);
    if (w[0] == "plus_i") return bloch_state(0, 1, 0);
    if (w[0] == "minus_i") return bloch_state(0, -1, 0);
    if (w[0] == "mixed") return maximally_mixed();
  }
  if (w[0] == "bloch" && w.size() == 4) {
    return bloch_state(config_detail::to_double(w[1], "bloch"), config_detail::to_double(w[2], "bloch"),
                       config_detail::to_double(w[3], "bloch"));
  }
  throw ConfigError("unrecognised state '" + std::string(text) + "'");
}

/// A named state (measured as its projector) or `effect CI CX CY CZ`.
inline PauliVector parse_effect(std::string_view text) {
  const auto w = config_detail::words(text);
  if (!w.empty() && w[0] == "effect") {
    if (w.size() != 5) throw ConfigError("effect needs four Pauli coefficients");
    PauliVector e;
    for (int k = 0; k < 4; ++k) e[k] = config_detail::to_double(w[k + 1], "effect");
    return e;
  }
  return parse_state(text);
}

inline std::vector<int> parse_lengths(std::string_view text) {
  std::string normalized(text);
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::vector<int> out;
  for (const auto& w : config_detail::words(normalized)) out.push_back(config_detail::to_int(w, "lengths"));
  return out;
}

inline Mode parse_mode(std::string_view text) {
  const auto t = config_detail::trim(text);
  if (t == "standard") return Mode::standard;
  if (t == "interleaved") return Mode::interleaved;
  throw ConfigError("mode must be 'standard' or 'interleaved'");
}

inline std::string_view mode_name(Mode m) { return m == Mode::standard ? "standard" : "interleaved"; }

/// `z,x: noise-term` override of the base error of one group element.
inline std::pair<GroupElement, NoiseSpec> parse_override(std::string_view text, int j) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("noise.override must look like 'z,x: spec'");
  const auto label = config_detail::split(text.substr(0, colon), ',');
  if (label.size() != 2) throw ConfigError("noise.override element must be 'z,x'");
  const GroupElement g{j, config_detail::to_int(label[0], "override z"), config_detail::to_int(label[1], "override x")};
  if (!g.is_valid()) throw ConfigError("noise.override element is not in D_j");
  return {g, parse_noise_spec(text.substr(colon + 1))};
}

/// Parse and schema-check a configuration. `name` is used in messages and
/// to derive default output file names.
inline ExperimentConfig parse_config(std::istream& in, const std::string& name = "experiment") {
  namespace po = boost::program_options;
  po::options_description schema;
  // clang-format off
  schema.add_options()
      ("mode", po::value<std::string>()->default_value("standard"))
      ("lengths", po::value<std::string>())
      ("sequences_per_length", po::value<std::string>())
      ("shots", po::value<std::string>()->default_value("0"))
      ("seed", po::value<std::string>()->default_value("0"))
      ("prep", po::value<std::string>()->default_value(kDefaultState))
      ("measurement", po::value<std::string>()->default_value(kDefaultState))
      ("use_b2", po::value<std::string>())
      ("threads", po::value<std::string>()->default_value("1"))
      ("bootstrap", po::value<std::string>()->default_value("200"))
      ("group.j", po::value<std::string>())
      ("noise.gate", po::value<std::string>()->default_value("none"))
      ("noise.target", po::value<std::string>())
      ("noise.override", po::value<std::vector<std::string>>()->composing())
      ("output.data_path", po::value<std::string>())
      ("output.report_path", po::value<std::string>());
  // clang-format on

  po::variables_map vm;
  try {
    po::store(po::parse_config_file(in, schema, false), vm);
    po::notify(vm);
  } catch (const po::error& e) {
    throw ConfigError(name + ": " + e.what());
  }
  auto str = [&](const char* key) { return vm[key].as<std::string>(); };
  auto require = [&](const char* key) {
    if (!vm.count(key)) throw ConfigError(name + ": missing required key '" + std::string(key) + "'");
    return str(key);
  };

  ExperimentConfig cfg;
  ExperimentPlan& plan = cfg.plan;
  plan.j = config_detail::to_int(require("group.j"), "group.j");
  if (plan.j < 1) throw ConfigError("group.j must be positive");
  plan.mode = parse_mode(str("mode"));
  plan.lengths = parse_lengths(require("lengths"));
  plan.sequences_per_length = config_detail::to_int(require("sequences_per_length"), "sequences_per_length");
  plan.shots = config_detail::to_int(str("shots"), "shots");
  {
    const std::string seed(config_detail::trim(str("seed")));
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(seed.data(), seed.data() + seed.size(), v);
    if (seed.empty() || ec != std::errc() || ptr != seed.data() + seed.size()) {
      throw ConfigError("invalid seed '" + seed + "'");
    }
    plan.seed = v;
  }
  plan.prep = parse_state(str("prep"));
  plan.measurement = parse_effect(str("measurement"));
  if (vm.count("use_b2")) {
    const auto v = config_detail::trim(str("use_b2"));
    if (v == "true") {
      plan.use_b2 = true;
    } else if (v == "false") {
      plan.use_b2 = false;
    } else {
      throw ConfigError("use_b2 must be 'true' or 'false'");
    }
  }
  plan.threads = config_detail::to_int(str("threads"), "threads");
  if (plan.threads == 0) plan.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  cfg.bootstrap_resamples = config_detail::to_int(str("bootstrap"), "bootstrap");
  if (cfg.bootstrap_resamples < 0) throw ConfigError("bootstrap must be >= 0");

  plan.noise.gate_error = parse_noise_spec(str("noise.gate"));
  if (vm.count("noise.target")) plan.noise.target_error = parse_noise_spec(str("noise.target"));
  if (vm.count("noise.override")) {
    for (const auto& o : vm["noise.override"].as<std::vector<std::string>>()) {
      auto [g, spec] = parse_override(o, plan.j);
      if (!plan.noise.overrides.emplace(g, spec).second) throw ConfigError("duplicate noise.override entry");
    }
  }
  cfg.data_path = vm.count("output.data_path") ? str("output.data_path") : name + ".csv";
  cfg.report_path = vm.count("output.report_path") ? str("output.report_path") : name + ".report.json";
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config(in, path.stem().string());
}

}  // namespace dihedral_rb
