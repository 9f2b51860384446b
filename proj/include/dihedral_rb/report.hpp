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

// Decay-data CSV and fit-report JSON.

#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dihedral_rb/estimation.hpp"
#include "dihedral_rb/protocol.hpp"

namespace dihedral_rb {

/// Shortest round-trip representation; keeps output byte-stable.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Columns m,b1,b2,mean,stderr,k,shots; rows sorted by (m, b1, b2), only
/// measured settings.
inline void write_decay_csv(std::ostream& out, const DecayDataset& data) {
  out << "m,b1,b2,mean,stderr,k,shots\n";
  for (const auto& row : data.rows) {
    for (int b1 = 0; b1 < 2; ++b1) {
      for (int b2 = 0; b2 < (data.uses_b2 ? 2 : 1); ++b2) {
        const Estimate& e = row.pr[setting_index(b1, b2)];
        out << row.m << ',' << b1 << ',' << b2 << ',' << format_double(e.mean) << ','
            << format_double(e.stderr_) << ',' << data.sequences_per_length << ',' << data.shots << '\n';
      }
    }
  }
}

inline nlohmann::json curve_json(const CurveFit& c) {
  nlohmann::json j = {
      {"rate", c.fit.rate},
      {"rate_stderr", c.rate_err},
      {"amplitude", c.fit.amplitude},
      {"amplitude_stderr", c.amplitude_err},
      {"iterations", c.fit.iterations},
      {"residual_norm", c.fit.residual_norm},
      {"weighted", c.fit.weighted},
      {"rate_clamped", c.fit.rate_clamped},
  };
  if (c.fit.with_offset) j["offset"] = c.fit.offset;
  return j;
}

inline nlohmann::json report_json(const FitReport& r) {
  nlohmann::json j = {
      {"p0", {{"value", r.p0}, {"stderr", r.p0_err}}},
      {"p1", {{"value", r.p1}, {"stderr", r.p1_err}}},
      {"amplitude0", r.amplitude0},
      {"amplitude1", r.amplitude1},
      {"fidelity", {{"value", r.fidelity}, {"stderr", r.fidelity_err}, {"interval", {r.fidelity_low, r.fidelity_high}}}},
      {"fits", {{"curve0", curve_json(r.curve0)}, {"curve1", curve_json(r.curve1)}}},
  };
  return j;
}

inline nlohmann::json dataset_json(const DecayDataset& d) {
  std::vector<int> lengths;
  for (const auto& row : d.rows) lengths.push_back(row.m);
  return {{"j", d.j},
          {"lengths", lengths},
          {"mode", d.mode == Mode::standard ? "standard" : "interleaved"},
          {"sequences_per_length", d.sequences_per_length},
          {"shots", d.shots},
          {"seed", d.seed}};
}

inline nlohmann::json standard_report(const DecayDataset& data, const FitReport& fit) {
  nlohmann::json j = dataset_json(data);
  j["result"] = report_json(fit);
  return j;
}

inline nlohmann::json interleaved_report(const DecayDataset& reference_data, const FitReport& reference,
                                         const DecayDataset& interleaved_data, const FitReport& combined) {
  nlohmann::json j = dataset_json(interleaved_data);
  j["reference"] = report_json(reference);
  j["reference"]["j"] = reference_data.j;
  j["composite"] = report_json(combined);
  if (combined.interleaved) {
    const auto& e = *combined.interleaved;
    j["target"] = {
        {"fidelity",
         {{"value", e.bound.fidelity_point},
          {"stderr", e.target_fidelity_err},
          {"interval", {e.bound.fidelity_low, e.bound.fidelity_high}}}},
        {"chi", {{"value", e.bound.chi_point}, {"interval", {e.bound.chi_low, e.bound.chi_high}}}},
        {"chi_reference", e.chi_reference},
        {"chi_composite", e.chi_composite},
        {"chi_clamped", e.chi_clamped},
    };
  }
  return j;
}

}  // namespace dihedral_rb
