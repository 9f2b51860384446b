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

// Single-qubit channels in the Pauli-Liouville representation.
//
// A density operator is stored as the coefficient vector c with
// rho = (c_I I + c_X X + c_Y Y + c_Z Z) / 2, so c_k = Tr(P_k rho). A channel is
// the real 4x4 matrix M_jk = Tr(P_j E(P_k)) / 2, under which the identity
// channel is the identity matrix and channel composition is matrix product.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>

#include <Eigen/Dense>

#include "dihedral_rb/errors.hpp"

namespace dihedral_rb {

inline constexpr double kInvariantTolerance = 1e-12;
inline constexpr double kCptpTolerance = 1e-10;

/// Coefficients (I, X, Y, Z) of a Hermitian operator in the Pauli basis,
/// scaled so that a normalized state has c_I = 1. Effects share the layout
/// without the trace constraint.
struct PauliVector {
  Eigen::Vector4d c = Eigen::Vector4d::Zero();

  double operator[](int k) const { return c[k]; }
  double& operator[](int k) { return c[k]; }

  Eigen::Vector3d bloch() const { return c.tail<3>(); }
};

inline PauliVector bloch_state(double x, double y, double z) {
  return PauliVector{Eigen::Vector4d(1.0, x, y, z)};
}
inline PauliVector ket0() { return bloch_state(0, 0, 1); }
inline PauliVector ket1() { return bloch_state(0, 0, -1); }
inline PauliVector ket_plus() { return bloch_state(1, 0, 0); }
inline PauliVector maximally_mixed() { return bloch_state(0, 0, 0); }

inline bool is_physical_state(const PauliVector& s, double tol = kInvariantTolerance) {
  return std::abs(s[0] - 1.0) <= tol && s.bloch().norm() <= 1.0 + tol;
}

/// 0 <= E <= I, i.e. both eigenvalues (c_I +- |c_bloch|) / 2 lie in [0, 1].
inline bool is_valid_effect(const PauliVector& e, double tol = kInvariantTolerance) {
  const double r = e.bloch().norm();
  return e[0] - r >= -tol && e[0] + r <= 2.0 + tol;
}

class Superoperator {
 public:
  Superoperator() : m_(Eigen::Matrix4d::Identity()) {}
  explicit Superoperator(const Eigen::Matrix4d& m) : m_(m) {}

  static Superoperator identity() { return Superoperator(); }
  static Superoperator diagonal(double i, double x, double y, double z) {
    return Superoperator(Eigen::Vector4d(i, x, y, z).asDiagonal().toDenseMatrix());
  }

  const Eigen::Matrix4d& matrix() const { return m_; }
  double operator()(int row, int col) const { return m_(row, col); }

  bool is_trace_preserving(double tol = kInvariantTolerance) const {
    return (m_.row(0) - Eigen::RowVector4d(1, 0, 0, 0)).cwiseAbs().maxCoeff() <= tol;
  }

  bool is_unital(double tol = kInvariantTolerance) const {
    return m_.col(0).tail<3>().cwiseAbs().maxCoeff() <= tol;
  }

  bool is_approx(const Superoperator& other, double tol = kInvariantTolerance) const {
    return (m_ - other.m_).cwiseAbs().maxCoeff() <= tol;
  }

  /// Apply `rhs` first, then `*this`.
  friend Superoperator operator*(const Superoperator& lhs, const Superoperator& rhs) {
    return Superoperator(lhs.m_ * rhs.m_);
  }

 private:
  Eigen::Matrix4d m_;
};

/// Bloch-sphere rotation. `angle` is the rotation angle of the Bloch vector,
/// so the T gate is {z, pi/4}.
struct UnitarySpec {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double angle = 0.0;
};

inline Superoperator unitary_to_superop(const UnitarySpec& u) {
  if (std::abs(u.axis.norm() - 1.0) > kInvariantTolerance) {
    throw InvalidInput("rotation axis must be a unit vector");
  }
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.bottomRightCorner<3, 3>() = Eigen::AngleAxisd(u.angle, u.axis).toRotationMatrix();
  return Superoperator(m);
}

inline Superoperator z_rotation(double angle) {
  return unitary_to_superop({Eigen::Vector3d::UnitZ(), angle});
}

/// compose(a, b) applies b first, then a.
inline Superoperator compose(const Superoperator& a, const Superoperator& b) { return a * b; }

inline PauliVector apply(const Superoperator& m, const PauliVector& s) {
  return PauliVector{m.matrix() * s.c};
}

/// Tr(E rho). Throws UnphysicalModel when the result leaves [0, 1].
inline double expectation(const PauliVector& effect, const PauliVector& state) {
  const double p = effect.c.dot(state.c) / 2.0;
  if (p < -kInvariantTolerance || p > 1.0 + kInvariantTolerance) {
    throw UnphysicalModel("expectation value outside [0, 1]");
  }
  return p;
}

/// Average gate fidelity against the identity: 1/2 + (M_XX + M_YY + M_ZZ) / 6.
inline double avg_fidelity(const Superoperator& m) {
  return 0.5 + (m(1, 1) + m(2, 2) + m(3, 3)) / 6.0;
}

/// Process-matrix identity element of a qubit channel from its average fidelity.
inline double chi00(double fidelity) { return 1.5 * fidelity - 0.5; }
inline double chi00_inv(double chi) { return (chi + 0.5) / 1.5; }

// ---------------------------------------------------------------------------
// Kraus / Choi utilities

using Matrix2c = Eigen::Matrix2cd;

inline const std::array<Matrix2c, 4>& pauli_matrices() {
  static const std::array<Matrix2c, 4> paulis = [] {
    using C = std::complex<double>;
    std::array<Matrix2c, 4> p;
    p[0] << 1, 0, 0, 1;
    p[1] << 0, 1, 1, 0;
    p[2] << 0, C(0, -1), C(0, 1), 0;
    p[3] << 1, 0, 0, -1;
    return p;
  }();
  return paulis;
}

inline Superoperator from_kraus(std::span<const Matrix2c> kraus) {
  const auto& p = pauli_matrices();
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (int k = 0; k < 4; ++k) {
    Matrix2c image = Matrix2c::Zero();
    for (const auto& op : kraus) image += op * p[k] * op.adjoint();
    for (int j = 0; j < 4; ++j) m(j, k) = (p[j] * image).trace().real() / 2.0;
  }
  return Superoperator(m);
}

/// Unnormalized Choi matrix sum_ab |a><b| (x) E(|a><b|).
inline Eigen::Matrix4cd choi(const Superoperator& m) {
  const auto& p = pauli_matrices();
  Eigen::Matrix4cd j = Eigen::Matrix4cd::Zero();
  for (int row = 0; row < 4; ++row) {
    for (int col = 0; col < 4; ++col) {
      if (m(row, col) == 0.0) continue;
      const Matrix2c left = p[col].transpose();
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          j.block<2, 2>(2 * a, 2 * b) += 0.5 * m(row, col) * left(a, b) * p[row];
        }
      }
    }
  }
  return j;
}

inline double min_choi_eigenvalue(const Superoperator& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(choi(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

inline bool is_cptp(const Superoperator& m, double tol = kCptpTolerance) {
  return m.is_trace_preserving(tol) && min_choi_eigenvalue(m) >= -tol;
}

}  // namespace dihedral_rb
