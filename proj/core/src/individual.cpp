// Copyright 2026 The Mace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mace/individual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mace/detail/parallel.hpp"
#include "mace/errors.hpp"

namespace mace {

DpBound dp_bound(double epsilon, double prior_p) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("dp_bound: epsilon must be finite and non-negative");
  }
  if (!(prior_p > 0.0) || !(prior_p < 1.0)) {
    throw ValidationError("dp_bound: prior_p must lie strictly inside (0, 1)");
  }
  DpBound out;
  out.epsilon = epsilon;
  out.prior_p = prior_p;
  out.lambda = std::log(prior_p / (1.0 - prior_p));
  out.bound = std::max(std::fabs(std::tanh(0.5 * (epsilon + out.lambda))),
                       std::fabs(std::tanh(0.5 * (-epsilon + out.lambda))));
  return out;
}

namespace {

void check_prior(double prior_p) {
  if (!(prior_p > 0.0) || !(prior_p < 1.0)) {
    throw ValidationError("prior_p must lie strictly inside (0, 1)");
  }
}

void check_delta(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw ValidationError("confidence delta must lie strictly inside (0, 1)");
  }
}

double signed_contrast(double p_hat, double q_hat, double prior_p) {
  const double pp = p_hat * prior_p;
  const double qq = q_hat * (1.0 - prior_p);
  return (pp - qq) / (pp + qq);
}

// Contrast at a corner of the confidence rectangle; a massless corner is
// resolved to the conservative extreme for its side.
double corner_contrast(double p_hat, double q_hat, double prior_p,
                       double empty_value) {
  const double pp = p_hat * prior_p;
  const double qq = q_hat * (1.0 - prior_p);
  if (pp + qq == 0.0) return empty_value;
  return (pp - qq) / (pp + qq);
}

}  // namespace

double f_p_hat(const QueryOutput& z0, const Density& member_density,
               const Density& nonmember_density, double prior_p) {
  check_prior(prior_p);
  const double p_hat = member_density.value_at(z0);
  const double q_hat = nonmember_density.value_at(z0);
  if (p_hat * prior_p + q_hat * (1.0 - prior_p) == 0.0) {
    throw NumericError(
        "f_p_hat: estimated mixture mass at the point is zero; the contrast "
        "is undefined there");
  }
  return signed_contrast(p_hat, q_hat, prior_p);
}

IndividualRiskEstimate individual_risk_accuracy(
    const QueryOutput& z0, const Density& member_density,
    const Density& nonmember_density, double prior_p, double delta) {
  check_prior(prior_p);
  check_delta(delta);
  const double f = f_p_hat(z0, member_density, nonmember_density, prior_p);

  // Each marginal interval carries delta/2 failure mass; the rectangle
  // then holds with probability at least 1 - delta.
  const double level = 1.0 - 0.5 * delta;
  const ConfidenceInterval p_ci = member_density.value_ci(z0, level);
  const ConfidenceInterval q_ci = nonmember_density.value_ci(z0, level);

  // The contrast rises in p_hat and falls in q_hat, so the rectangle
  // extremes sit at opposite corners.
  const double lo = corner_contrast(p_ci.lower, q_ci.upper, prior_p, -1.0);
  const double hi = corner_contrast(p_ci.upper, q_ci.lower, prior_p, 1.0);

  IndividualRiskEstimate out;
  out.metric_name = "ACC";
  out.f_p_signed = f;
  out.point = std::fabs(f);
  out.ci.level = 1.0 - delta;
  if (lo <= 0.0 && 0.0 <= hi) {
    out.ci.lower = 0.0;
    out.ci.upper = std::max(-lo, hi);
  } else if (hi < 0.0) {
    out.ci.lower = -hi;
    out.ci.upper = -lo;
  } else {
    out.ci.lower = lo;
    out.ci.upper = hi;
  }
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct MobiusBranch {
  double num_slope, num_icept;
  double den_slope, den_icept;

  double value(double r) const {
    if (std::isinf(r)) {
      if (den_slope != 0.0) return num_slope / den_slope;
      if (num_slope == 0.0 && den_icept != 0.0) return num_icept / den_icept;
      throw NumericError(
          "individual_risk_generalized: metric is unbounded over the "
          "confidence rectangle (condition 3)");
    }
    const double den = den_slope * r + den_icept;
    const double scale = std::fabs(den_slope * r) + std::fabs(den_icept);
    if (den == 0.0 || std::fabs(den) <= 1e-12 * scale) {
      throw NumericError(
          "individual_risk_generalized: denominator vanishes inside the "
          "confidence rectangle (condition 3)");
    }
    return (num_slope * r + num_icept) / den;
  }

  double den_sign(double r) const {
    double den;
    if (std::isinf(r)) {
      den = den_slope != 0.0 ? den_slope : den_icept;
    } else {
      den = den_slope * r + den_icept;
    }
    return den > 0.0 ? 1.0 : (den < 0.0 ? -1.0 : 0.0);
  }
};

MobiusBranch branch_for(const DerivedCoefficients& dc, bool indicator) {
  const double i = indicator ? 1.0 : 0.0;
  return {dc.c1 + i * dc.c3, dc.c2 + i * dc.c4, dc.d1 + i * dc.d3,
          dc.d2 + i * dc.d4};
}

// Odds ratio r = (p_hat * p) / (q_hat * (1 - p)) for one rectangle
// corner.  Zero-over-zero appears only when the whole rectangle is
// degenerate on that side and is resolved by the caller.
double odds_ratio(double p_hat, double q_hat, double prior_p) {
  const double pp = p_hat * prior_p;
  const double qq = q_hat * (1.0 - prior_p);
  if (qq == 0.0) return pp == 0.0 ? std::numeric_limits<double>::quiet_NaN() : kInf;
  return pp / qq;
}

// Extremizes the plug-in conditional metric over r in [r_lo, r_hi],
// using that each indicator branch is a Mobius function of r (monotone
// between poles).  Candidate values at the segment ends are sufficient;
// a denominator sign change inside a segment means a pole and no finite
// interval exists.
ConfidenceInterval extremize_over_r(const DerivedCoefficients& dc, double t,
                                    double r_lo, double r_hi, double level) {
  // The prediction indicator is 1 exactly when r exceeds t/(1-t); for t
  // outside [0, 1) the indicator is constant over the whole ray.
  const bool has_switch = t >= 0.0 && t < 1.0;
  const double r_star = has_switch ? t / (1.0 - t) : 0.0;

  std::vector<double> candidates;
  auto eval_segment = [&candidates](const MobiusBranch& b, double a, double c) {
    if (b.den_sign(a) * b.den_sign(c) <= 0.0) {
      throw NumericError(
          "individual_risk_generalized: denominator changes sign across the "
          "confidence rectangle (condition 3)");
    }
    candidates.push_back(b.value(a));
    candidates.push_back(b.value(c));
  };

  if (!has_switch) {
    eval_segment(branch_for(dc, t < 0.0), r_lo, r_hi);
  } else if (r_hi <= r_star) {
    eval_segment(branch_for(dc, false), r_lo, r_hi);
  } else if (r_lo > r_star) {
    eval_segment(branch_for(dc, true), r_lo, r_hi);
  } else {
    eval_segment(branch_for(dc, false), r_lo, r_star);
    eval_segment(branch_for(dc, true), r_star, r_hi);
  }

  ConfidenceInterval ci;
  ci.level = level;
  ci.lower = *std::min_element(candidates.begin(), candidates.end());
  ci.upper = *std::max_element(candidates.begin(), candidates.end());
  return ci;
}

}  // namespace

IndividualRiskEstimate individual_risk_generalized(
    const QueryOutput& z0, const Density& member_density,
    const Density& nonmember_density, double prior_p,
    const GeneralizedMetric& metric, double delta) {
  check_prior(prior_p);
  check_delta(delta);
  const std::optional<double> threshold = metric.bayes_threshold();
  if (!threshold) {
    throw NumericError(
        "individual_risk_generalized: metric '" + metric.name() +
        "' has no closed-form decision threshold (condition 1); use the "
        "empirical threshold search instead");
  }
  const double t = *threshold;

  const double p_hat = member_density.value_at(z0);
  const double q_hat = nonmember_density.value_at(z0);
  const double pp = p_hat * prior_p;
  const double qq = q_hat * (1.0 - prior_p);
  if (pp + qq == 0.0) {
    throw NumericError(
        "individual_risk_generalized: estimated mixture mass at the point is "
        "zero");
  }
  const double eta = pp / (pp + qq);
  if (std::fabs(eta - t) <= 1e-9) {
    throw NumericError(
        "individual_risk_generalized: posterior at the point ties the "
        "decision threshold (condition 2); the prediction is ambiguous");
  }
  const bool indicator = (1.0 - t) * pp > t * qq;

  const DerivedCoefficients dc = metric.derived();
  const double i = indicator ? 1.0 : 0.0;
  const double num = dc.c1 * pp + dc.c2 * qq + i * (dc.c3 * pp + dc.c4 * qq);
  const double den = dc.d1 * pp + dc.d2 * qq + i * (dc.d3 * pp + dc.d4 * qq);
  const double den_scale = std::fabs(dc.d1 * pp) + std::fabs(dc.d2 * qq) +
                           i * (std::fabs(dc.d3 * pp) + std::fabs(dc.d4 * qq));
  if (den == 0.0 || std::fabs(den) <= 1e-12 * den_scale) {
    throw NumericError(
        "individual_risk_generalized: plug-in denominator vanishes at the "
        "point (condition 3)");
  }

  const double level = 1.0 - 0.5 * delta;
  const ConfidenceInterval p_ci = member_density.value_ci(z0, level);
  const ConfidenceInterval q_ci = nonmember_density.value_ci(z0, level);

  double r_lo = odds_ratio(p_ci.lower, q_ci.upper, prior_p);
  double r_hi = odds_ratio(p_ci.upper, q_ci.lower, prior_p);
  // NaN marks a 0/0 corner: the degenerate side pins the ratio to the
  // value seen at the other corner.
  if (std::isnan(r_lo)) r_lo = std::isnan(r_hi) ? 0.0 : r_hi;
  if (std::isnan(r_hi)) r_hi = r_lo;

  IndividualRiskEstimate out;
  out.metric_name = metric.name();
  out.f_p_signed = (pp - qq) / (pp + qq);
  out.point = num / den;
  out.ci = extremize_over_r(dc, t, r_lo, r_hi, 1.0 - delta);
  // The point estimate lies on one of the evaluated branches between the
  // segment ends, so it is inside by construction; guard regardless.
  out.ci.lower = std::min(out.ci.lower, out.point);
  out.ci.upper = std::max(out.ci.upper, out.point);
  return out;
}

BatchRiskResult individual_risk_batch(
    std::span<const QueryOutput> points, const Density& member_density,
    const Density& nonmember_density, double prior_p,
    const std::optional<GeneralizedMetric>& metric, double delta,
    unsigned threads) {
  check_prior(prior_p);
  check_delta(delta);
  if (metric && !metric->bayes_threshold()) {
    throw NumericError(
        "individual_risk_batch: metric '" + metric->name() +
        "' has no closed-form decision threshold (condition 1)");
  }

  BatchRiskResult result;
  result.estimates.resize(points.size());
  std::vector<char> fallback(points.size(), 0);

  detail::parallel_for(points.size(), threads, [&](std::size_t i) {
    const QueryOutput& z0 = points[i];
    const double mix = member_density.value_at(z0) * prior_p +
                       nonmember_density.value_at(z0) * (1.0 - prior_p);
    if (mix == 0.0) {
      // No fitted mass anywhere near this point: report the prior-only
      // value with the widest interval the metric can span.
      IndividualRiskEstimate est;
      est.uninformative = true;
      est.f_p_signed = std::numeric_limits<double>::quiet_NaN();
      if (!metric) {
        est.metric_name = "ACC";
        est.point = std::fabs(2.0 * prior_p - 1.0);
        est.ci = {0.0, 1.0, 1.0 - delta};
      } else {
        est.metric_name = metric->name();
        const DerivedCoefficients dc = metric->derived();
        const double t = *metric->bayes_threshold();
        const double eta = prior_p;
        const bool ind = eta > t;
        const MobiusBranch b = branch_for(dc, ind);
        const double r = prior_p / (1.0 - prior_p);
        est.point = b.value(r);
        est.ci = extremize_over_r(dc, t, 0.0, kInf, 1.0 - delta);
      }
      result.estimates[i] = std::move(est);
      fallback[i] = 1;
      return;
    }
    result.estimates[i] =
        metric ? individual_risk_generalized(z0, member_density,
                                             nonmember_density, prior_p,
                                             *metric, delta)
               : individual_risk_accuracy(z0, member_density,
                                          nonmember_density, prior_p, delta);
  });

  std::size_t n_fallback = 0;
  for (char f : fallback) n_fallback += f;
  if (n_fallback > 0) {
    std::ostringstream msg;
    msg << n_fallback << " of " << points.size()
        << " evaluation points carry zero fitted mixture mass; their risk "
           "entries are uninformative prior-only values";
    result.warnings.push_back(msg.str());
  }
  return result;
}

}  // namespace mace
