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

#pragma once

#include <stdexcept>
#include <string>

namespace dihedral_rb {

/// Malformed argument to a library call (bad axis, out-of-range parameter).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An experiment or noise configuration that cannot be executed as written.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state, effect or channel that violates physicality (Bloch ball, POVM
/// bounds, complete positivity) or a probability that left [0, 1].
class UnphysicalModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decay fit did not produce a usable estimate.
class FitFailure : public std::runtime_error {
 public:
  FitFailure(const std::string& what, int iterations, double residual_norm)
      : std::runtime_error(what), iterations_(iterations), residual_norm_(residual_norm) {}

  int iterations() const { return iterations_; }
  double residual_norm() const { return residual_norm_; }

 private:
  int iterations_;
  double residual_norm_;
};

}  // namespace dihedral_rb
