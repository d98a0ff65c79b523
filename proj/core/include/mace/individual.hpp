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

#ifndef MACE_INDIVIDUAL_HPP
#define MACE_INDIVIDUAL_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mace/density.hpp"
#include "mace/metrics.hpp"
#include "mace/types.hpp"

namespace mace {

// Ceiling on any individual's risk implied by epsilon-DP at a given
// membership prior.  lambda is the prior log-odds.
struct DpBound {
  double epsilon = 0.0;
  double prior_p = 0.5;
  double lambda = 0.0;
  double bound = 0.0;

  bool exceeded_by(double observed) const { return observed > bound; }
};

DpBound dp_bound(double epsilon, double prior_p);

// Signed posterior contrast at one point:
//
//   (p_hat * p - q_hat * (1 - p)) / (p_hat * p + q_hat * (1 - p))
//
// where p_hat and q_hat are the conditional density values under the
// member and non-member models.  Throws NumericError when the estimated
// mixture mass at the point is zero.
double f_p_hat(const QueryOutput& z0, const Density& member_density,
               const Density& nonmember_density, double prior_p);

struct IndividualRiskEstimate {
  double point = 0.0;
  ConfidenceInterval ci;
  // Signed contrast underlying the accuracy-style risk; NaN when it was
  // not computable (uninformative batch entries).
  double f_p_signed = 0.0;
  std::string metric_name;
  // True when the point carried no fitted mass and the estimate fell
  // back to the prior-only value with a maximally wide interval.
  bool uninformative = false;
};

// Per-point risk under the accuracy metric: |f_p_hat| with an interval
// obtained by extremizing the contrast over the two density confidence
// rectangles (each at level 1 - delta/2, composed to 1 - delta).
IndividualRiskEstimate individual_risk_accuracy(
    const QueryOutput& z0, const Density& member_density,
    const Density& nonmember_density, double prior_p, double delta);

// Per-point conditional value of a generalized metric under its
// Bayes-threshold rule.  Fails, by name, when (1) the metric has no
// closed-form threshold, (2) the posterior at z0 ties the threshold, or
// (3) the plug-in denominator vanishes (at the point or inside the
// confidence rectangle).
IndividualRiskEstimate individual_risk_generalized(
    const QueryOutput& z0, const Density& member_density,
    const Density& nonmember_density, double prior_p,
    const GeneralizedMetric& metric, double delta);

struct BatchRiskResult {
  std::vector<IndividualRiskEstimate> estimates;
  std::vector<std::string> warnings;
};

// Vectorized risk over many points.  Points with zero fitted mixture
// mass do not fail the batch; they produce uninformative entries and a
// warning.  metric == nullopt means the accuracy risk.  Results are
// identical for any thread count.
BatchRiskResult individual_risk_batch(std::span<const QueryOutput> points,
                                      const Density& member_density,
                                      const Density& nonmember_density,
                                      double prior_p,
                                      const std::optional<GeneralizedMetric>& metric,
                                      double delta, unsigned threads = 1);

}  // namespace mace

#endif  // MACE_INDIVIDUAL_HPP
