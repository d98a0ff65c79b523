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

#include "mace/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mace/errors.hpp"

namespace mace {

ConfusionRates ConfusionRates::from_counts(std::uint64_t tp_count,
                                           std::uint64_t fp_count,
                                           std::uint64_t fn_count,
                                           std::uint64_t tn_count) {
  const double total =
      static_cast<double>(tp_count + fp_count + fn_count + tn_count);
  if (total == 0.0) {
    throw ValidationError("ConfusionRates::from_counts: empty confusion matrix");
  }
  return {static_cast<double>(tp_count) / total,
          static_cast<double>(fp_count) / total,
          static_cast<double>(fn_count) / total,
          static_cast<double>(tn_count) / total};
}

GeneralizedMetric::GeneralizedMetric(std::string name, double a0, double a11,
                                     double a10, double a01, double a00,
                                     double b0, double b11, double b10,
                                     double b01, double b00)
    : name_(std::move(name)),
      a0_(a0), a11_(a11), a10_(a10), a01_(a01), a00_(a00),
      b0_(b0), b11_(b11), b10_(b10), b01_(b01), b00_(b00) {
  for (double v : {a0, a11, a10, a01, a00, b0, b11, b10, b01, b00}) {
    if (!std::isfinite(v)) {
      throw ValidationError("GeneralizedMetric: coefficients must be finite");
    }
  }
  if (b0 == 0.0 && b11 == 0.0 && b10 == 0.0 && b01 == 0.0 && b00 == 0.0) {
    throw ValidationError("GeneralizedMetric: denominator is identically zero");
  }
}

double GeneralizedMetric::evaluate(const ConfusionRates& r) const {
  for (double v : {r.tp, r.fp, r.fn, r.tn}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("GeneralizedMetric::evaluate: rates must be finite and non-negative");
    }
  }
  const double den = b0_ + b11_ * r.tp + b10_ * r.fp + b01_ * r.fn + b00_ * r.tn;
  if (den == 0.0) {
    std::ostringstream msg;
    msg << "GeneralizedMetric::evaluate: metric '" << name_
        << "' has zero denominator at rates tp=" << r.tp << " fp=" << r.fp
        << " fn=" << r.fn << " tn=" << r.tn;
    throw NumericError(msg.str());
  }
  const double num = a0_ + a11_ * r.tp + a10_ * r.fp + a01_ * r.fn + a00_ * r.tn;
  return num / den;
}

std::optional<double> GeneralizedMetric::bayes_threshold() const {
  // The closed form requires a prediction-independent denominator and a
  // numerator that actually separates the two predictions.  Comparisons
  // are tolerance-based so scaled variants of the named metrics qualify.
  double a_scale = std::fabs(a11_) + std::fabs(a10_) + std::fabs(a01_) +
                   std::fabs(a00_) + std::fabs(a0_);
  double b_scale = std::fabs(b11_) + std::fabs(b10_) + std::fabs(b01_) +
                   std::fabs(b00_) + std::fabs(b0_);
  if (a_scale == 0.0) return std::nullopt;
  const double b_tol = 1e-12 * (b_scale > 0.0 ? b_scale : 1.0);
  if (std::fabs(b11_ - b01_) > b_tol || std::fabs(b10_ - b00_) > b_tol) {
    return std::nullopt;
  }
  const double gap = a11_ - a10_ - a01_ + a00_;
  if (std::fabs(gap) <= 1e-12 * a_scale) return std::nullopt;
  return (a00_ - a10_) / gap;
}

DerivedCoefficients GeneralizedMetric::derived() const {
  return {a0_ + a01_, a0_ + a00_, a11_ - a01_, a10_ - a00_,
          b0_ + b01_, b0_ + b00_, b11_ - b01_, b10_ - b00_};
}

GeneralizedMetric named_metric(const std::string& name, double prior_p,
                               const std::array<double, 4>& wa_weights) {
  if (!(prior_p > 0.0) || !(prior_p < 1.0)) {
    throw ValidationError("named_metric: prior_p must lie strictly inside (0, 1)");
  }
  if (name == "ACC") {
    return {"ACC", 0, 1, 0, 0, 1, 1, 0, 0, 0, 0};
  }
  if (name == "PPV") {
    return {"PPV", 0, 1, 0, 0, 0, 0, 1, 1, 0, 0};
  }
  if (name == "TPR") {
    return {"TPR", 0, 1, 0, 0, 0, 0, 1, 0, 1, 0};
  }
  if (name == "TNR") {
    return {"TNR", 0, 0, 0, 0, 1, 0, 0, 1, 0, 1};
  }
  if (name == "AM") {
    // (advantage + 1) / 2 = (TP/p + TN/(1-p)) / 2, scaled through by
    // 2p(1-p) so the threshold formula yields exactly p in double
    // arithmetic: (p - 0) / (((1-p) - 0 - 0) + p) == p bitwise.
    const double q = 1.0 - prior_p;
    return {"AM", 0, q, 0, 0, prior_p, 2.0 * prior_p * q, 0, 0, 0, 0};
  }
  if (name == "WA") {
    // (w1 TP + w2 TN) / (w1 TP + w2 TN + w3 FP + w4 FN).  Positive
    // weights keep the denominator positive everywhere on the simplex.
    // (1,1,1,1) is exactly ACC; a closed-form threshold exists only
    // when w1 == w4 and w2 == w3.
    for (double w : wa_weights) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw ValidationError("named_metric: WA weights must be finite and positive");
      }
    }
    char label[96];
    std::snprintf(label, sizeof(label), "WA(%g,%g,%g,%g)", wa_weights[0],
                  wa_weights[1], wa_weights[2], wa_weights[3]);
    const double w1 = wa_weights[0];
    const double w2 = wa_weights[1];
    const double w3 = wa_weights[2];
    const double w4 = wa_weights[3];
    return {label, 0, w1, 0, 0, w2, 0, w1, w3, w4, w2};
  }
  throw ValidationError("named_metric: unknown metric name '" + name +
                        "' (expected ACC, PPV, TPR, TNR, AM, or WA)");
}

}  // namespace mace
