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

// Error channels and their assignment to gates.

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dihedral_rb/errors.hpp"
#include "dihedral_rb/group.hpp"
#include "dihedral_rb/liouville.hpp"

namespace dihedral_rb {

enum class NoiseKind { none, depolarizing, over_rotation, composed };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::none;
  double depolarizing = 1.0;  ///< Bloch shrink factor p of diag(1, p, p, p).
  UnitarySpec rotation;
  std::vector<NoiseSpec> children;  ///< composed: applied in listed order.

  static NoiseSpec none() { return {}; }
  static NoiseSpec depolarizing_channel(double p) {
    NoiseSpec s;
    s.kind = NoiseKind::depolarizing;
    s.depolarizing = p;
    return s;
  }
  static NoiseSpec over_rotation(const UnitarySpec& u) {
    NoiseSpec s;
    s.kind = NoiseKind::over_rotation;
    s.rotation = u;
    return s;
  }
  static NoiseSpec composed(std::vector<NoiseSpec> parts) {
    NoiseSpec s;
    s.kind = NoiseKind::composed;
    s.children = std::move(parts);
    return s;
  }
};

inline Superoperator depolarizing(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("depolarizing parameter must lie in [0, 1]");
  return Superoperator::diagonal(1.0, p, p, p);
}

/// Depolarizing parameter p with avg_fidelity(depolarizing(p)) == fidelity.
inline double depolarizing_for_fidelity(double fidelity) {
  const double p = 2.0 * fidelity - 1.0;
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("depolarizing fidelity must lie in [1/2, 1]");
  return p;
}

/// A rotation whose average fidelity equals `target_fidelity`:
/// F = 1/2 + (1 + 2 cos theta) / 6, so theta = arccos(3F - 2).
inline NoiseSpec over_rotation_for_fidelity(const Eigen::Vector3d& axis, double target_fidelity) {
  const double c = 3.0 * target_fidelity - 2.0;
  if (!(c >= -1.0 && c <= 1.0)) {
    throw InvalidInput("over-rotation fidelity must lie in [1/3, 1]");
  }
  return NoiseSpec::over_rotation({axis, std::acos(c)});
}

/// Builds the channel and checks complete positivity.
inline Superoperator build(const NoiseSpec& spec) {
  Superoperator out;
  switch (spec.kind) {
    case NoiseKind::none:
      return out;
    case NoiseKind::depolarizing:
      out = depolarizing(spec.depolarizing);
      break;
    case NoiseKind::over_rotation:
      out = unitary_to_superop(spec.rotation);
      break;
    case NoiseKind::composed:
      for (const auto& child : spec.children) out = compose(build(child), out);
      break;
  }
  if (!is_cptp(out)) throw UnphysicalModel("noise channel is not CPTP");
  return out;
}

/// Assignment of error channels to gates. Errors act after the ideal gate.
///
/// With `target_error` set, a standard run over D_j (j even) splits every
/// element with odd z into R_j(1) after the D_{j/2} element (z - 1, x); the
/// D_{j/2} factor carries the base error and R_j(1) carries `target_error`.
/// In interleaved mode `target_error` is the error of the interleaved
/// R_{2j}(1) gate.
struct GateNoiseMap {
  NoiseSpec gate_error;
  std::map<GroupElement, NoiseSpec> overrides;
  std::optional<NoiseSpec> target_error;

  const NoiseSpec& base_error(const GroupElement& g) const {
    auto it = overrides.find(g);
    return it == overrides.end() ? gate_error : it->second;
  }
};

/// Tag for the interleaved step R_{2j}(1) o g.
struct InterleavedStep {
  GroupElement base;
};

/// R_{j}(1) as a Bloch rotation by 2 pi / j.
inline Superoperator smallest_rotation(int j) { return z_rotation(2.0 * std::numbers::pi / j); }

/// Noisy implementation of a group gate.
inline Superoperator resolve(const GateNoiseMap& map, const GroupElement& g) {
  if (!g.is_valid()) throw ConfigError("gate is not an element of D_j");
  if (map.target_error && g.j % 2 == 0 && g.z % 2 == 1) {
    const GroupElement base{g.j, g.z - 1, g.x};
    const Superoperator noisy_base = compose(build(map.base_error(base)), to_superop(base));
    const Superoperator noisy_t = compose(build(*map.target_error), smallest_rotation(g.j));
    return compose(noisy_t, noisy_base);
  }
  return compose(build(map.base_error(g)), to_superop(g));
}

/// Noisy implementation of R_{2j}(1) o g in an interleaved sequence.
inline Superoperator resolve(const GateNoiseMap& map, const InterleavedStep& step) {
  const GroupElement& g = step.base;
  if (!g.is_valid()) throw ConfigError("gate is not an element of D_j");
  const Superoperator noisy_base = compose(build(map.base_error(g)), to_superop(g));
  const NoiseSpec target = map.target_error.value_or(NoiseSpec::none());
  return compose(compose(build(target), smallest_rotation(2 * g.j)), noisy_base);
}

/// Error channel of the composite noisy gate relative to its ideal: noisy o ideal^-1.
inline Superoperator effective_error(const Superoperator& noisy, const Superoperator& ideal) {
  return Superoperator(noisy.matrix() * ideal.matrix().transpose());
}

}  // namespace dihedral_rb
