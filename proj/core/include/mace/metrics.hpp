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

#ifndef MACE_METRICS_HPP
#define MACE_METRICS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace mace {

// Confusion-matrix mass split.  Entries are proportions (or conditional
// probabilities); they must be non-negative and finite but are not
// required to sum to one, so the same type serves marginal and
// per-outcome conditional evaluations.
struct ConfusionRates {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double tn = 0.0;

  static ConfusionRates from_counts(std::uint64_t tp_count,
                                    std::uint64_t fp_count,
                                    std::uint64_t fn_count,
                                    std::uint64_t tn_count);
};

// Whether scores above the threshold are classified as members.
enum class ThresholdOrientation {
  positive_above,
  positive_below,
};

// Deterministic threshold rule on the membership posterior.  The tie
// eta == threshold predicts non-member under either orientation.
struct ThresholdClassifier {
  double threshold = 0.5;
  ThresholdOrientation orientation = ThresholdOrientation::positive_above;

  int predict(double eta) const {
    bool positive = orientation == ThresholdOrientation::positive_above
                        ? eta > threshold
                        : eta < threshold;
    return positive ? 1 : -1;
  }
};

// Constants the per-point estimator consumes; a pure reparameterization
// of the metric coefficients.
struct DerivedCoefficients {
  double c1, c2, c3, c4;
  double d1, d2, d3, d4;
};

// Ratio-of-affine family over confusion rates:
//
//   (a0 + a11*TP + a10*FP + a01*FN + a00*TN)
//   ----------------------------------------
//   (b0 + b11*TP + b10*FP + b01*FN + b00*TN)
//
// Scaling all ten coefficients by a positive constant leaves the metric
// unchanged; factories pick whichever scaling is numerically cleanest.
class GeneralizedMetric {
 public:
  GeneralizedMetric(std::string name, double a0, double a11, double a10,
                    double a01, double a00, double b0, double b11, double b10,
                    double b01, double b00);

  const std::string& name() const { return name_; }

  double evaluate(const ConfusionRates& rates) const;

  // Posterior threshold whose rule maximizes the metric, when the family
  // admits one in closed form (denominator free of the prediction, i.e.
  // b11 == b01 and b10 == b00, with a non-degenerate numerator).
  // nullopt means callers must fall back to the empirical search.
  std::optional<double> bayes_threshold() const;

  DerivedCoefficients derived() const;

  double a0() const { return a0_; }
  double a11() const { return a11_; }
  double a10() const { return a10_; }
  double a01() const { return a01_; }
  double a00() const { return a00_; }
  double b0() const { return b0_; }
  double b11() const { return b11_; }
  double b10() const { return b10_; }
  double b01() const { return b01_; }
  double b00() const { return b00_; }

 private:
  std::string name_;
  double a0_, a11_, a10_, a01_, a00_;
  double b0_, b11_, b10_, b01_, b00_;
};

// Named instantiations:
//   ACC  accuracy                         threshold 1/2
//   PPV  precision                        no closed-form threshold
//   TPR  recall                           threshold 0
//   TNR  specificity                      threshold 1
//   AM   membership advantage, affinely mapped onto [0, 1]; threshold p
//   WA   weighted accuracy with weights (w1, w2, w3, w4)
// prior_p is required by AM (and recorded for the rest).
GeneralizedMetric named_metric(const std::string& name, double prior_p,
                               const std::array<double, 4>& wa_weights = {
                                   1.0, 1.0, 1.0, 1.0});

}  // namespace mace

#endif  // MACE_METRICS_HPP
