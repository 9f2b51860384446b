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

// Dihedral benchmarking sequences: sampling, inversion, and survival
// probability estimation (exact or shot-sampled).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "dihedral_rb/errors.hpp"
#include "dihedral_rb/group.hpp"
#include "dihedral_rb/liouville.hpp"
#include "dihedral_rb/noise.hpp"

namespace dihedral_rb {

enum class Mode { standard, interleaved };

/// Pauli correction settings (b1, b2) indexed as 2 * b1 + b2.
inline constexpr int setting_index(int b1, int b2) { return 2 * b1 + b2; }

struct ExperimentPlan {
  int j = 8;
  Mode mode = Mode::standard;
  std::vector<int> lengths;
  int sequences_per_length = 1;
  int shots = 0;  ///< 0: exact expectation per sequence.
  PauliVector prep = ket0();
  PauliVector measurement = ket0();
  GateNoiseMap noise;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  ///< Separates independent experiments sharing a seed.
  int threads = 1;
  /// Whether to run the b2 = 1 settings; defaults to "whenever Z is in D_j".
  std::optional<bool> use_b2;

  bool uses_b2() const { return use_b2.value_or(contains_z(j)); }

  void validate() const {
    if (j < 1) throw ConfigError("group.j must be positive");
    if (uses_b2() && !contains_z(j)) throw ConfigError("b2 = 1 requires even j (Z is not in D_j)");
    if (lengths.empty()) throw ConfigError("at least one sequence length is required");
    if (!std::is_sorted(lengths.begin(), lengths.end()) ||
        std::adjacent_find(lengths.begin(), lengths.end()) != lengths.end()) {
      throw ConfigError("sequence lengths must be strictly increasing");
    }
    for (int m : lengths) {
      if (m < 1) throw ConfigError("sequence lengths must be >= 1");
      if (mode == Mode::interleaved && m % 2 != 0) {
        throw ConfigError("interleaved mode requires even sequence lengths");
      }
    }
    if (sequences_per_length < 1) throw ConfigError("sequences_per_length must be >= 1");
    if (shots < 0) throw ConfigError("shots must be >= 0");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (!is_physical_state(prep)) throw UnphysicalModel("state preparation is not a physical state");
    if (!is_valid_effect(measurement)) throw UnphysicalModel("measurement is not a valid POVM effect");
  }
};

struct SequenceRecord {
  int j = 1;
  Mode mode = Mode::standard;
  std::vector<int> z;
  std::vector<int> x;
  int b1 = 0;
  int b2 = 0;
  GroupElement inversion;

  std::size_t length() const { return z.size(); }
  GroupElement gate(std::size_t t) const { return {j, z[t], x[t]}; }
};

/// Ideal composite of the applied gates (everything before the inversion),
/// expressed in D_j. In interleaved mode each step is R_{2j}(1) o g_t and the
/// product is tracked in D_{2j}; even length brings it back into D_j.
inline GroupElement ideal_composite(const SequenceRecord& r) {
  if (r.mode == Mode::standard) {
    GroupElement h = GroupElement::identity(r.j);
    for (std::size_t t = 0; t < r.length(); ++t) h = multiply(r.gate(t), h);
    return h;
  }
  const int big = 2 * r.j;
  const GroupElement step_rotation{big, 1, 0};
  GroupElement h = GroupElement::identity(big);
  for (std::size_t t = 0; t < r.length(); ++t) {
    h = multiply(step_rotation, multiply(GroupElement{big, 2 * r.z[t], r.x[t]}, h));
  }
  if (h.z % 2 != 0) throw ConfigError("interleaved mode requires even sequence lengths");
  return {r.j, h.z / 2, h.x};
}

/// X^b1 Z^b2 composed with the inverse of the ideal composite.
inline GroupElement inversion_gate(const SequenceRecord& r) {
  return multiply(pauli_correction(r.j, r.b1, r.b2), inverse(ideal_composite(r)));
}

inline SequenceRecord with_correction(SequenceRecord r, int b1, int b2) {
  if (b2 && !contains_z(r.j)) throw ConfigError("b2 = 1 requires even j (Z is not in D_j)");
  r.b1 = b1;
  r.b2 = b2;
  r.inversion = inversion_gate(r);
  return r;
}

template <class Rng>
SequenceRecord sample_sequence(const ExperimentPlan& plan, int m, int b1, int b2, Rng& rng) {
  if (m < 1) throw ConfigError("sequence length must be >= 1");
  if (plan.mode == Mode::interleaved && m % 2 != 0) {
    throw ConfigError("interleaved mode requires even sequence lengths");
  }
  SequenceRecord r;
  r.j = plan.j;
  r.mode = plan.mode;
  r.z.resize(m);
  r.x.resize(m);
  std::uniform_int_distribution<int> rotation(0, plan.j - 1);
  std::uniform_int_distribution<int> flip(0, 1);
  for (int t = 0; t < m; ++t) {
    r.z[t] = rotation(rng);
    r.x[t] = flip(rng);
  }
  return with_correction(std::move(r), b1, b2);
}

/// Noisy superoperators for every gate the plan can apply, resolved once.
class NoisyGateTable {
 public:
  explicit NoisyGateTable(const ExperimentPlan& plan) : j_(plan.j), mode_(plan.mode) {
    for (const auto& g : elements(j_)) {
      group_.push_back(resolve(plan.noise, g));
      if (mode_ == Mode::interleaved) step_.push_back(resolve(plan.noise, InterleavedStep{g}));
    }
  }

  /// Gate applied at a sequence step.
  const Superoperator& step(int z, int x) const {
    return mode_ == Mode::interleaved ? step_[index(z, x)] : group_[index(z, x)];
  }
  /// A bare group gate (used for the inversion).
  const Superoperator& gate(const GroupElement& g) const { return group_[index(g.z, g.x)]; }

 private:
  std::size_t index(int z, int x) const { return static_cast<std::size_t>(x * j_ + z); }

  int j_;
  Mode mode_;
  std::vector<Superoperator> group_;
  std::vector<Superoperator> step_;
};

/// State after the m noisy sequence gates, before the inversion.
inline PauliVector propagate(const SequenceRecord& r, const NoisyGateTable& table, const PauliVector& prep) {
  Eigen::Vector4d s = prep.c;
  for (std::size_t t = 0; t < r.length(); ++t) s = table.step(r.z[t], r.x[t]).matrix() * s;
  return PauliVector{s};
}

inline double survival_exact(const SequenceRecord& r, const NoisyGateTable& table, const ExperimentPlan& plan) {
  const PauliVector before = propagate(r, table, plan.prep);
  return expectation(plan.measurement, apply(table.gate(r.inversion), before));
}

inline double survival_exact(const SequenceRecord& r, const ExperimentPlan& plan) {
  return survival_exact(r, NoisyGateTable(plan), plan);
}

/// Empirical mean of `shots` Bernoulli(p) outcomes.
template <class Rng>
double sample_shots(double p, int shots, Rng& rng) {
  if (shots < 1) throw InvalidInput("shot count must be >= 1");
  if (p < -kInvariantTolerance || p > 1.0 + kInvariantTolerance) {
    throw UnphysicalModel("survival probability outside [0, 1]");
  }
  std::binomial_distribution<int> successes(shots, std::clamp(p, 0.0, 1.0));
  return static_cast<double>(successes(rng)) / shots;
}

template <class Rng>
double survival_sampled(const SequenceRecord& r, const ExperimentPlan& plan, int shots, Rng& rng) {
  return sample_shots(survival_exact(r, plan), shots, rng);
}

/// Deterministic per-sequence generator from (seed, stream, m, index).
inline std::mt19937_64 sequence_rng(const ExperimentPlan& plan, int m, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(plan.seed), static_cast<std::uint32_t>(plan.seed >> 32),
                    static_cast<std::uint32_t>(plan.stream), static_cast<std::uint32_t>(plan.stream >> 32),
                    static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Sample mean and standard error of the mean.
inline Estimate mean_and_stderr(std::span<const double> v) {
  Estimate e;
  if (v.empty()) return e;
  double sum = 0.0;
  for (double x : v) sum += x;
  e.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - e.mean) * (x - e.mean);
    e.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return e;
}

/// Survival estimates of one random sequence under each measured (b1, b2)
/// setting; unmeasured settings stay NaN.
using SequenceOutcome = std::array<double, 4>;

/// Evaluate sequence `index` of length `m`: one draw of gates shared by all
/// correction settings, then shots per setting in (b1, b2) order.
inline SequenceOutcome evaluate_sequence(const ExperimentPlan& plan, const NoisyGateTable& table, int m, int index) {
  auto rng = sequence_rng(plan, m, index);
  const SequenceRecord base = sample_sequence(plan, m, 0, 0, rng);
  const PauliVector before = propagate(base, table, plan.prep);
  SequenceOutcome out;
  out.fill(std::numeric_limits<double>::quiet_NaN());
  for (int b1 = 0; b1 < 2; ++b1) {
    for (int b2 = 0; b2 < (plan.uses_b2() ? 2 : 1); ++b2) {
      const GroupElement inv = multiply(pauli_correction(plan.j, b1, b2), base.inversion);
      const double p = expectation(plan.measurement, apply(table.gate(inv), before));
      out[setting_index(b1, b2)] = plan.shots > 0 ? sample_shots(p, plan.shots, rng) : p;
    }
  }
  return out;
}

/// All k sequences of one length, evaluated on up to plan.threads workers.
/// Results are stored by sequence index, so the output does not depend on
/// the thread count.
inline std::vector<SequenceOutcome> evaluate_length(const ExperimentPlan& plan, const NoisyGateTable& table, int m) {
  const int k = plan.sequences_per_length;
  std::vector<SequenceOutcome> out(static_cast<std::size_t>(k));
  const int workers = std::clamp(plan.threads, 1, k);
  if (workers == 1) {
    for (int i = 0; i < k; ++i) out[i] = evaluate_sequence(plan, table, m, i);
    return out;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = w; i < k; i += workers) out[i] = evaluate_sequence(plan, table, m, i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

inline Estimate estimate_pr(const ExperimentPlan& plan, int m, int b1, int b2) {
  plan.validate();
  if (b2 && !plan.uses_b2()) throw ConfigError("b2 = 1 is not enabled for this plan");
  const NoisyGateTable table(plan);
  const auto outcomes = evaluate_length(plan, table, m);
  std::vector<double> v;
  v.reserve(outcomes.size());
  for (const auto& o : outcomes) v.push_back(o[setting_index(b1, b2)]);
  return mean_and_stderr(v);
}

/// Which linear combination of the Pr(m, b1, b2) a decay curve uses.
///
/// For even j:  S0 = Pr00 + Pr01 - Pr10 - Pr11 = 4A p0^m,
///              S1 = Pr00 - Pr01             = 2B p1^m.
/// For odd j (no b2): S0 = Pr00 - Pr10 = 2A p0^m + 2B1 p1^m, a single
/// exponential when the preparation has no Y component, and
/// S1 = Pr00 + Pr10 = 2B2 p1^m + 2C, fitted with an offset.
inline double curve0(const SequenceOutcome& q, bool uses_b2) {
  return uses_b2 ? q[0] + q[1] - q[2] - q[3] : q[0] - q[2];
}
inline double curve1(const SequenceOutcome& q, bool uses_b2) {
  return uses_b2 ? q[0] - q[1] : q[0] + q[2];
}

struct DecayRow {
  int m = 0;
  std::array<Estimate, 4> pr;  ///< Indexed by setting_index; NaN mean if unmeasured.
  Estimate s0;
  Estimate s1;
  std::vector<SequenceOutcome> samples;
};

struct DecayDataset {
  int j = 1;
  Mode mode = Mode::standard;
  int sequences_per_length = 0;
  int shots = 0;
  std::uint64_t seed = 0;
  bool uses_b2 = true;
  std::vector<DecayRow> rows;
};

/// Summary statistics of one length from its per-sequence outcomes.
inline DecayRow summarize(int m, std::vector<SequenceOutcome> samples, bool uses_b2) {
  DecayRow row;
  row.m = m;
  std::vector<double> v(samples.size());
  for (int s = 0; s < 4; ++s) {
    for (std::size_t i = 0; i < samples.size(); ++i) v[i] = samples[i][s];
    row.pr[s] = mean_and_stderr(v);
  }
  for (std::size_t i = 0; i < samples.size(); ++i) v[i] = curve0(samples[i], uses_b2);
  row.s0 = mean_and_stderr(v);
  for (std::size_t i = 0; i < samples.size(); ++i) v[i] = curve1(samples[i], uses_b2);
  row.s1 = mean_and_stderr(v);
  row.samples = std::move(samples);
  return row;
}

inline DecayDataset decay_dataset(const ExperimentPlan& plan) {
  plan.validate();
  const NoisyGateTable table(plan);
  DecayDataset data;
  data.j = plan.j;
  data.mode = plan.mode;
  data.sequences_per_length = plan.sequences_per_length;
  data.shots = plan.shots;
  data.seed = plan.seed;
  data.uses_b2 = plan.uses_b2();
  for (int m : plan.lengths) data.rows.push_back(summarize(m, evaluate_length(plan, table, m), data.uses_b2));
  return data;
}

/// SPAM constants of the exact decay model
///   Pr(m, b1, b2) = (-1)^b1 A p0^m + ((-1)^(b1+b2) B1 + (-1)^b2 B2) p1^m + C
/// for gate-independent noise `error`.
struct SpamConstants {
  double a = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double c = 0.0;
};

inline SpamConstants spam_constants(const Superoperator& error, const PauliVector& prep, const PauliVector& effect) {
  // Tr(E error(P_k)) = sum_j e_j M_jk, and Tr(rho P_k) = c_k.
  const Eigen::RowVector4d traces = effect.c.transpose() * error.matrix();
  return {0.5 * traces[3] * prep[3], 0.5 * traces[2] * prep[2], 0.5 * traces[1] * prep[1], 0.5 * traces[0]};
}

inline double survival_model(const SpamConstants& k, double p0, double p1, int m, int b1, int b2) {
  const double s1 = b1 ? -1.0 : 1.0;
  const double s2 = b2 ? -1.0 : 1.0;
  return s1 * k.a * std::pow(p0, m) + (s1 * s2 * k.b1 + s2 * k.b2) * std::pow(p1, m) + k.c;
}

}  // namespace dihedral_rb
