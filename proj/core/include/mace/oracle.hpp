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

#ifndef MACE_ORACLE_HPP
#define MACE_ORACLE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "mace/metrics.hpp"
#include "mace/types.hpp"

// Ground-truth calculators for small synthetic worlds.  Everything here
// is computed straight from the definitions, sharing no logic with the
// estimators it is used to check.
namespace mace {

// Finite-support world: the query output takes value j (as a 1-D real)
// with probability member_pmf[j] for members and nonmember_pmf[j] for
// non-members.
struct FiniteToyDistribution {
  std::vector<double> member_pmf;
  std::vector<double> nonmember_pmf;
  double prior_p = 0.5;

  void validate() const;
};

// Population optimal membership advantage: the prior-weighted L1
// distance between the class laws.
double exact_advantage(const FiniteToyDistribution& toy);

// Population per-outcome risk |f_p| at outcome j.
double exact_individual_risk(const FiniteToyDistribution& toy, std::size_t j);

// Population conditional value of a ratio metric at outcome j under its
// optimal single-threshold rule, evaluated from the raw coefficients.
double exact_generalized_conditional(const FiniteToyDistribution& toy,
                                     const GeneralizedMetric& metric,
                                     std::size_t j);

struct ThresholdOptimum {
  double value = 0.0;
  double threshold = 0.5;  // posterior cut realizing the optimum
};

// Best achievable marginal metric value over every posterior-threshold
// rule (both orientations), by direct enumeration of the toy's
// prediction patterns.
ThresholdOptimum exact_metric_optimum(const FiniteToyDistribution& toy,
                                      const GeneralizedMetric& metric);

// Population advantage when both classes are unit-weight normals with a
// common sigma and equal priors.
double continuous_truth_tv(double mu1, double mu2, double sigma);

// Deterministic 1-D samplers for toy worlds.
std::vector<QueryOutput> sample_categorical(std::span<const double> pmf,
                                            std::size_t n, std::uint64_t seed);
std::vector<QueryOutput> sample_normal(double mu, double sigma, std::size_t n,
                                       std::uint64_t seed);
// d-dimensional spherical normal records (for synthetic-data tooling).
std::vector<std::vector<double>> sample_normal_records(
    std::span<const double> mu, double sigma, std::size_t n,
    std::uint64_t seed);

}  // namespace mace

#endif  // MACE_ORACLE_HPP
