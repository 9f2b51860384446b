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

// The dihedral group D_j = <R_j(1), X> at the Bloch-sphere level, its
// Pauli-Liouville representation, and channel twirling over it.

#pragma once

#include <array>
#include <compare>
#include <numbers>
#include <string_view>
#include <utility>
#include <vector>

#include "dihedral_rb/errors.hpp"
#include "dihedral_rb/liouville.hpp"

namespace dihedral_rb {

/// The gate R_j(z) X^x, where R_j(z) rotates the Bloch sphere by 2 pi z / j
/// about the z axis.
struct GroupElement {
  int j = 1;
  int z = 0;
  int x = 0;

  static GroupElement identity(int j) { return {j, 0, 0}; }
  static GroupElement rotation(int j, int z) { return {j, ((z % j) + j) % j, 0}; }
  static GroupElement flip(int j) { return {j, 0, 1}; }

  bool is_valid() const { return j >= 1 && z >= 0 && z < j && (x == 0 || x == 1); }

  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

inline GroupElement make_element(int j, int z, int x) {
  GroupElement g{j, z, x};
  if (!g.is_valid()) throw InvalidInput("group element out of range");
  return g;
}

/// All 2j elements, rotations first.
inline std::vector<GroupElement> elements(int j) {
  if (j < 1) throw InvalidInput("group order parameter j must be positive");
  std::vector<GroupElement> out;
  out.reserve(2 * static_cast<std::size_t>(j));
  for (int x = 0; x < 2; ++x) {
    for (int z = 0; z < j; ++z) out.push_back({j, z, x});
  }
  return out;
}

/// a * b: apply b first, then a. X R(z) = R(-z) X on the Bloch sphere.
inline GroupElement multiply(const GroupElement& a, const GroupElement& b) {
  if (a.j != b.j) throw InvalidInput("cannot multiply elements of different dihedral groups");
  const int j = a.j;
  const int z = (a.z + (a.x ? j - b.z : b.z)) % j;
  return {j, z, a.x ^ b.x};
}

inline GroupElement operator*(const GroupElement& a, const GroupElement& b) { return multiply(a, b); }

inline GroupElement inverse(const GroupElement& a) {
  if (a.x == 1) return a;
  return {a.j, (a.j - a.z) % a.j, 0};
}

/// The Pauli Z gate, which belongs to D_j only for even j.
inline bool contains_z(int j) { return j % 2 == 0; }
inline GroupElement z_gate(int j) {
  if (!contains_z(j)) throw ConfigError("Z is not an element of D_j for odd j");
  return {j, j / 2, 0};
}

/// X^b1 Z^b2, the Pauli correction appended to the inversion gate.
inline GroupElement pauli_correction(int j, int b1, int b2) {
  GroupElement g = GroupElement::identity(j);
  if (b2) g = z_gate(j);
  if (b1) g = multiply(GroupElement::flip(j), g);
  return g;
}

/// Block form 1 (+) faithful 2x2 (+) (-1)^x on (I, (X, Y), Z).
inline Superoperator to_superop(const GroupElement& a) {
  const double angle = 2.0 * std::numbers::pi * a.z / a.j;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double sign = a.x ? -1.0 : 1.0;
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = c;
  m(1, 2) = -sign * s;
  m(2, 1) = s;
  m(2, 2) = sign * c;
  m(3, 3) = sign;
  return Superoperator(m);
}

enum class Irrep { trivial, faithful, parity };

struct IrrepInfo {
  Irrep label;
  std::string_view name;
  int dimension;
  std::array<int, 2> indices;  ///< Liouville rows/cols; second entry is -1 for 1-d irreps.
};

inline constexpr std::array<IrrepInfo, 3> kIrreps = {{
    {Irrep::trivial, "trivial", 1, {0, -1}},
    {Irrep::faithful, "faithful", 2, {1, 2}},
    {Irrep::parity, "parity", 1, {3, -1}},
}};

/// Exact group average (2j)^-1 sum_g g^-1 E g.
inline Superoperator twirl(const Superoperator& e, int j) {
  Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
  for (const auto& g : elements(j)) {
    const Superoperator u = to_superop(g);
    acc += u.matrix().transpose() * e.matrix() * u.matrix();
  }
  return Superoperator(acc / (2.0 * j));
}

struct DecayParams {
  double p0;  ///< Z-Z entry, decay of the parity sector.
  double p1;  ///< Mean of the X-X and Y-Y entries, decay of the faithful sector.
};

inline DecayParams decay_params(const Superoperator& e) {
  return {e(3, 3), (e(1, 1) + e(2, 2)) / 2.0};
}

/// Average fidelity expressed through the decay parameters.
inline double fidelity_from_decay(double p0, double p1) { return 0.5 + (p0 + 2.0 * p1) / 6.0; }

}  // namespace dihedral_rb
