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

// Decay-curve fitting and fidelity estimation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dihedral_rb/errors.hpp"
#include "dihedral_rb/group.hpp"
#include "dihedral_rb/liouville.hpp"
#include "dihedral_rb/protocol.hpp"

namespace dihedral_rb {

inline constexpr double kRateCeiling = 1.05;
inline constexpr double kRateFloor = 1e-12;
inline constexpr int kFitIterationCap = 500;

struct DecayPoint {
  double m = 0.0;
  double y = 0.0;
  double stderr_ = 0.0;
};

/// y = amplitude * rate^m (+ offset).
struct ExponentialFit {
  double amplitude = 0.0;
  double rate = 0.0;
  double offset = 0.0;
  double amplitude_err = 0.0;  ///< Asymptotic (Jacobian) standard errors.
  double rate_err = 0.0;
  double offset_err = 0.0;
  bool with_offset = false;
  bool weighted = false;
  bool rate_clamped = false;
  int iterations = 0;
  double residual_norm = 0.0;

  double operator()(double m) const { return amplitude * std::pow(rate, m) + offset; }
};

namespace detail {

inline std::vector<DecayPoint> usable(std::span<const DecayPoint> points) {
  std::vector<DecayPoint> out;
  for (const auto& p : points) {
    if (std::isfinite(p.m) && std::isfinite(p.y) && std::isfinite(p.stderr_)) out.push_back(p);
  }
  if (out.size() < 3) throw FitFailure("decay fit needs at least 3 usable lengths", 0, 0.0);
  return out;
}

/// Inverse-variance weights, or unit weights if any standard error is zero.
inline Eigen::VectorXd weights(const std::vector<DecayPoint>& pts, bool& weighted) {
  weighted = std::all_of(pts.begin(), pts.end(), [](const DecayPoint& p) { return p.stderr_ > 0.0; });
  Eigen::VectorXd w(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) w[i] = weighted ? 1.0 / pts[i].stderr_ : 1.0;
  return w;
}

inline double clamp_rate(double p) { return std::clamp(p, kRateFloor, kRateCeiling); }

/// Levenberg-Marquardt on theta = (a, p[, c]) with the rate kept in (0, 1.05].
inline ExponentialFit levenberg_marquardt(const std::vector<DecayPoint>& pts, Eigen::VectorXd theta, bool offset) {
  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  const Eigen::Index k = theta.size();
  ExponentialFit fit;
  fit.with_offset = offset;
  const Eigen::VectorXd w = weights(pts, fit.weighted);

  auto residuals = [&](const Eigen::VectorXd& t, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(n);
    if (jac) jac->resize(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = pts[i].m;
      const double pm = std::pow(t[1], m);
      const double model = t[0] * pm + (offset ? t[2] : 0.0);
      r[i] = w[i] * (pts[i].y - model);
      if (jac) {
        (*jac)(i, 0) = w[i] * pm;
        (*jac)(i, 1) = w[i] * t[0] * m * (m == 0.0 ? 0.0 : std::pow(t[1], m - 1.0));
        if (offset) (*jac)(i, 2) = w[i];
      }
    }
  };

  theta[1] = clamp_rate(theta[1]);
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  residuals(theta, r, &jac);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  bool converged = false;
  int it = 0;
  for (; it < kFitIterationCap && !converged; ++it) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index d = 0; d < k; ++d) a(d, d) += lambda * std::max(jtj(d, d), 1e-300);
      const Eigen::VectorXd step = a.ldlt().solve(g);
      Eigen::VectorXd trial = theta + step;
      trial[1] = clamp_rate(trial[1]);
      Eigen::VectorXd r_trial;
      residuals(trial, r_trial, nullptr);
      const double trial_cost = r_trial.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        const double rel_step = ((trial - theta).array().abs() / (theta.array().abs() + 1e-12)).maxCoeff();
        const double rel_gain = cost > 0.0 ? (cost - trial_cost) / cost : 0.0;
        theta = trial;
        cost = trial_cost;
        residuals(theta, r, &jac);
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        if (rel_step < 1e-12 || rel_gain < 1e-15 || cost == 0.0) converged = true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e20) {
          // No descent direction left at double precision: a stationary point.
          converged = true;
          break;
        }
      }
    }
  }
  fit.iterations = it;
  fit.residual_norm = std::sqrt(cost);
  if (!converged || !theta.allFinite()) {
    throw FitFailure("decay fit did not converge", fit.iterations, fit.residual_norm);
  }

  fit.amplitude = theta[0];
  fit.rate = theta[1];
  fit.offset = offset ? theta[2] : 0.0;
  fit.rate_clamped = fit.rate >= kRateCeiling || fit.rate <= kRateFloor;

  if (n > k) {
    const double scale = cost / static_cast<double>(n - k);
    const Eigen::MatrixXd cov = (jac.transpose() * jac).completeOrthogonalDecomposition().pseudoInverse() * scale;
    fit.amplitude_err = std::sqrt(std::max(cov(0, 0), 0.0));
    fit.rate_err = std::sqrt(std::max(cov(1, 1), 0.0));
    if (offset) fit.offset_err = std::sqrt(std::max(cov(2, 2), 0.0));
  }
  return fit;
}

}  // namespace detail

/// Weighted least-squares fit of y = a p^m. Starts from a log-linear
/// regression over the positive points.
inline ExponentialFit fit_single_exponential(std::span<const DecayPoint> points) {
  const auto pts = detail::usable(points);
  std::vector<const DecayPoint*> positive;
  for (const auto& p : pts) {
    if (p.y > 0.0) positive.push_back(&p);
  }
  if (positive.size() < 2) throw FitFailure("decay fit needs at least 2 positive points", 0, 0.0);

  double sm = 0.0, sl = 0.0, smm = 0.0, sml = 0.0;
  for (const auto* p : positive) {
    const double l = std::log(p->y);
    sm += p->m;
    sl += l;
    smm += p->m * p->m;
    sml += p->m * l;
  }
  const double count = static_cast<double>(positive.size());
  const double denom = count * smm - sm * sm;
  double log_rate = 0.0;
  if (denom != 0.0) log_rate = (count * sml - sm * sl) / denom;
  const double log_amp = (sl - log_rate * sm) / count;

  Eigen::VectorXd theta(2);
  theta << std::exp(log_amp), std::exp(log_rate);
  return detail::levenberg_marquardt(pts, theta, false);
}

/// Weighted least-squares fit of y = a p^m + c. Starts from the best rate on
/// a grid, with (a, c) solved linearly at each grid rate.
inline ExponentialFit fit_exponential_with_offset(std::span<const DecayPoint> points) {
  const auto pts = detail::usable(points);
  bool weighted = false;
  const Eigen::VectorXd w = detail::weights(pts, weighted);
  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());

  Eigen::VectorXd best(3);
  double best_cost = std::numeric_limits<double>::infinity();
  for (int g = 1; g <= 1000; ++g) {
    const double p = kRateCeiling * g / 1000.0;
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      design(i, 0) = w[i] * std::pow(p, pts[i].m);
      design(i, 1) = w[i];
      rhs[i] = w[i] * pts[i].y;
    }
    const Eigen::Vector2d ac = design.colPivHouseholderQr().solve(rhs);
    const double cost = (design * ac - rhs).squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best << ac[0], p, ac[1];
    }
  }
  return detail::levenberg_marquardt(pts, best, true);
}

// ---------------------------------------------------------------------------
// Dataset-level fitting with bootstrap over sequences

struct FitOptions {
  int bootstrap_resamples = 200;
  std::uint64_t seed = 0;
  double interval_level = 0.95;
};

struct CurveFit {
  ExponentialFit fit;
  double amplitude_err = 0.0;  ///< Bootstrap standard deviations.
  double rate_err = 0.0;
  std::vector<double> bootstrap_rates;  ///< NaN where a resample failed to fit.
};

struct InterleavedBound {
  double chi_point = 0.0;
  double chi_low = 0.0;
  double chi_high = 0.0;
  double fidelity_point = 0.0;
  double fidelity_low = 0.0;
  double fidelity_high = 0.0;
};

struct InterleavedEstimate {
  double reference_fidelity = 0.0;
  double composite_fidelity = 0.0;
  double chi_reference = 0.0;
  double chi_composite = 0.0;
  double target_fidelity_err = 0.0;
  bool chi_clamped = false;
  InterleavedBound bound;
};

struct FitReport {
  CurveFit curve0;  ///< Parity sector, rate p0.
  CurveFit curve1;  ///< Faithful sector, rate p1.
  double p0 = 0.0;
  double p0_err = 0.0;
  double p1 = 0.0;
  double p1_err = 0.0;
  double amplitude0 = 0.0;  ///< 4A for even j.
  double amplitude1 = 0.0;  ///< 2B for even j.
  double fidelity = 0.0;
  double fidelity_err = 0.0;
  double fidelity_low = 0.0;  ///< Bootstrap percentile interval.
  double fidelity_high = 0.0;
  std::optional<InterleavedEstimate> interleaved;
};

inline std::vector<DecayPoint> curve_points(const DecayDataset& data, int curve) {
  std::vector<DecayPoint> pts;
  for (const auto& row : data.rows) {
    const Estimate& e = curve == 0 ? row.s0 : row.s1;
    pts.push_back({static_cast<double>(row.m), e.mean, e.stderr_});
  }
  return pts;
}

namespace detail {

inline double percentile(std::vector<double> v, double q) {
  std::erase_if(v, [](double x) { return !std::isfinite(x); });
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double finite_stddev(const std::vector<double>& v) {
  std::vector<double> f;
  for (double x : v) {
    if (std::isfinite(x)) f.push_back(x);
  }
  if (f.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : f) mean += x;
  mean /= static_cast<double>(f.size());
  double ss = 0.0;
  for (double x : f) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(f.size() - 1));
}

}  // namespace detail

/// F = 1/2 + (p0 + 2 p1) / 6 with sigma_F = sqrt(sigma0^2 + 4 sigma1^2) / 6.
inline FitReport assemble_standard(const CurveFit& fit0, const CurveFit& fit1, double interval_level = 0.95) {
  FitReport r;
  r.curve0 = fit0;
  r.curve1 = fit1;
  r.p0 = fit0.fit.rate;
  r.p1 = fit1.fit.rate;
  r.p0_err = fit0.rate_err;
  r.p1_err = fit1.rate_err;
  r.amplitude0 = fit0.fit.amplitude;
  r.amplitude1 = fit1.fit.amplitude;
  r.fidelity = fidelity_from_decay(r.p0, r.p1);
  r.fidelity_err = std::sqrt(r.p0_err * r.p0_err + 4.0 * r.p1_err * r.p1_err) / 6.0;

  std::vector<double> boot;
  const std::size_t n = std::min(fit0.bootstrap_rates.size(), fit1.bootstrap_rates.size());
  for (std::size_t i = 0; i < n; ++i) boot.push_back(fidelity_from_decay(fit0.bootstrap_rates[i], fit1.bootstrap_rates[i]));
  const double tail = (1.0 - interval_level) / 2.0;
  r.fidelity_low = detail::percentile(boot, tail);
  r.fidelity_high = detail::percentile(boot, 1.0 - tail);
  if (!std::isfinite(r.fidelity_low)) r.fidelity_low = r.fidelity_high = r.fidelity;
  return r;
}

/// Fit both decay curves of a dataset. Single exponentials for even j; for
/// odd j the faithful-sector curve carries an offset. Uncertainties come
/// from resampling sequences within each length and refitting.
inline FitReport fit_dataset(const DecayDataset& data, const FitOptions& options = {}) {
  const bool offset1 = !data.uses_b2;
  auto fit_curve = [&](const std::vector<DecayPoint>& pts, bool offset) {
    return offset ? fit_exponential_with_offset(pts) : fit_single_exponential(pts);
  };

  CurveFit c0, c1;
  c0.fit = fit_curve(curve_points(data, 0), false);
  c1.fit = fit_curve(curve_points(data, 1), offset1);

  std::vector<double> amps0, amps1;
  for (int b = 0; b < options.bootstrap_resamples; ++b) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(b), 0x5eedu};
    std::mt19937_64 rng(seq);
    std::vector<DecayPoint> pts0, pts1;
    for (const auto& row : data.rows) {
      const std::size_t k = row.samples.size();
      std::uniform_int_distribution<std::size_t> pick(0, k - 1);
      std::vector<double> v0(k), v1(k);
      for (std::size_t i = 0; i < k; ++i) {
        const auto& q = row.samples[pick(rng)];
        v0[i] = curve0(q, data.uses_b2);
        v1[i] = curve1(q, data.uses_b2);
      }
      const Estimate e0 = mean_and_stderr(v0);
      const Estimate e1 = mean_and_stderr(v1);
      pts0.push_back({static_cast<double>(row.m), e0.mean, e0.stderr_});
      pts1.push_back({static_cast<double>(row.m), e1.mean, e1.stderr_});
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
      const auto f = fit_curve(pts0, false);
      c0.bootstrap_rates.push_back(f.rate);
      amps0.push_back(f.amplitude);
    } catch (const FitFailure&) {
      c0.bootstrap_rates.push_back(nan);
    }
    try {
      const auto f = fit_curve(pts1, offset1);
      c1.bootstrap_rates.push_back(f.rate);
      amps1.push_back(f.amplitude);
    } catch (const FitFailure&) {
      c1.bootstrap_rates.push_back(nan);
    }
  }
  c0.rate_err = detail::finite_stddev(c0.bootstrap_rates);
  c1.rate_err = detail::finite_stddev(c1.bootstrap_rates);
  c0.amplitude_err = detail::finite_stddev(amps0);
  c1.amplitude_err = detail::finite_stddev(amps1);
  return assemble_standard(c0, c1, options.interval_level);
}

/// Slack of the composite-fidelity product rule at chi_target: positive
/// where |chi_comp - chi_ref chi_target| is within
/// 2 sqrt((1 - chi_ref) chi_ref (1 - chi_target) chi_target) + (1 - chi_ref)(1 - chi_target).
inline double bound_margin(double chi_comp, double chi_ref, double chi_target) {
  const double under = (1.0 - chi_ref) * chi_ref * (1.0 - chi_target) * chi_target;
  return 2.0 * std::sqrt(std::max(under, 0.0)) + (1.0 - chi_ref) * (1.0 - chi_target) -
         std::abs(chi_comp - chi_ref * chi_target);
}

/// Point estimate chi_comp / chi_ref for the target gate and the set of
/// target values consistent with the product rule. The margin is concave in
/// chi_target, so the consistent set is an interval found by bisection from
/// its maximiser.
inline InterleavedBound interleaved_bound(double chi_comp, double chi_ref) {
  if (chi_ref == 0.0) throw InvalidInput("reference chi must be nonzero");
  if (!(chi_ref > 0.0 && chi_ref <= 1.0) || !(chi_comp > 0.0 && chi_comp <= 1.0)) {
    throw InvalidInput("chi values must lie in (0, 1]");
  }
  constexpr double tol = 1e-8;
  auto margin = [&](double t) { return bound_margin(chi_comp, chi_ref, t); };

  // Golden-section search for the maximiser on [0, 1].
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double fa = margin(a), fb = margin(b);
  while (hi - lo > 1e-12) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = margin(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = margin(a);
    }
  }
  double peak = (lo + hi) / 2.0;
  for (double end : {0.0, 1.0}) {
    if (margin(end) > margin(peak)) peak = end;
  }

  InterleavedBound out;
  out.chi_point = chi_comp / chi_ref;
  if (margin(peak) < 0.0) {
    out.chi_low = out.chi_high = std::clamp(out.chi_point, 0.0, 1.0);
  } else {
    auto crossing = [&](double inside, double outside) {
      if (margin(outside) >= 0.0) return outside;
      while (std::abs(outside - inside) > tol) {
        const double mid = (inside + outside) / 2.0;
        (margin(mid) >= 0.0 ? inside : outside) = mid;
      }
      return outside;  // never narrower than the exact set
    };
    out.chi_low = crossing(peak, 0.0);
    out.chi_high = crossing(peak, 1.0);
  }
  out.fidelity_point = chi00_inv(out.chi_point);
  out.fidelity_low = std::clamp(chi00_inv(out.chi_low), 0.0, 1.0);
  out.fidelity_high = std::clamp(chi00_inv(out.chi_high), 0.0, 1.0);
  return out;
}

/// Target-gate estimate from a reference run over D_j and an interleaved run.
inline FitReport assemble_interleaved(const FitReport& reference, const FitReport& interleaved) {
  FitReport out = interleaved;
  InterleavedEstimate est;
  est.reference_fidelity = reference.fidelity;
  est.composite_fidelity = interleaved.fidelity;
  const double raw_ref = chi00(reference.fidelity);
  const double raw_comp = chi00(interleaved.fidelity);
  est.chi_reference = std::clamp(raw_ref, kRateFloor, 1.0);
  est.chi_composite = std::clamp(raw_comp, kRateFloor, 1.0);
  est.chi_clamped = est.chi_reference != raw_ref || est.chi_composite != raw_comp;
  est.bound = interleaved_bound(est.chi_composite, est.chi_reference);

  // chi_T = chi_comp / chi_ref, sigma_chi = 1.5 sigma_F.
  const double rel_comp = 1.5 * interleaved.fidelity_err / est.chi_composite;
  const double rel_ref = 1.5 * reference.fidelity_err / est.chi_reference;
  est.target_fidelity_err = est.bound.chi_point * std::hypot(rel_comp, rel_ref) / 1.5;
  out.interleaved = est;
  return out;
}

}  // namespace dihedral_rb
