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

#ifndef MACE_ADVANTAGE_HPP
#define MACE_ADVANTAGE_HPP

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "mace/density.hpp"
#include "mace/metrics.hpp"
#include "mace/types.hpp"

namespace mace {

enum class EstimatorKind {
  discrete,               // cell-mass L1 statistic
  continuous,             // kernel densities + Monte Carlo integral
  generalized_empirical,  // split / threshold-search / held-out evaluation
};

const char* to_string(EstimatorKind kind);

// How the posterior's class-conditional densities are modeled.
struct DensityConfig {
  enum class Kind { discrete, continuous };

  Kind kind = Kind::discrete;
  std::optional<std::size_t> bins;       // discrete: equal-width boxes; none = raw values
  std::optional<double> bandwidth;       // continuous: none = Scott's rule
  KernelId kernel = KernelId::gaussian;  // continuous only

  static DensityConfig discrete_native();
  static DensityConfig discrete_binned(std::size_t bins);
  static DensityConfig continuous(std::optional<double> bandwidth,
                                  KernelId kernel = KernelId::gaussian);
};

struct AdvantageEstimate {
  double point = 0.0;
  EstimatorKind kind = EstimatorKind::discrete;
  std::string metric_name = "ACC";
  std::size_t n_used = 0;
  double confidence_delta = 0.0;
  // Finite-sample deviation radius at level 1 - delta, when the
  // estimator admits one.
  std::optional<double> concentration_radius;
  std::optional<std::size_t> mc_samples;
  std::optional<double> mc_standard_error;
  std::optional<double> learned_threshold;
  std::optional<ThresholdOrientation> orientation;
  std::optional<std::size_t> skipped_grid_points;
  std::optional<std::array<std::size_t, 3>> partition_sizes;
};

// L1 distance between the prior-weighted cell masses of the two classes.
// With no scheme the outputs must be natively discrete.
AdvantageEstimate advantage_discrete(const LabeledQuerySet& set,
                                     const std::optional<BinningScheme>& scheme,
                                     double delta);

struct KdeConfig {
  std::optional<double> bandwidth;  // none = Scott's rule per class
  KernelId kernel = KernelId::gaussian;
};

// Monte Carlo integral of |p * p_kde - (1-p) * q_kde| with draws from
// the fitted mixture.  mc_samples == 0 selects min(20 N, 1e6).  Results
// are bit-identical for any thread count at a fixed seed.
AdvantageEstimate advantage_continuous(const LabeledQuerySet& set,
                                       const KdeConfig& kde, double delta,
                                       std::size_t mc_samples,
                                       std::uint64_t seed,
                                       unsigned threads = 1);

// Empirical pipeline for metrics without a usable closed-form threshold:
// fit the posterior on one third of the data, pick the best threshold
// and orientation on the second third over a uniform grid, report the
// metric on the held-out third.
AdvantageEstimate advantage_generalized(const LabeledQuerySet& set,
                                        const GeneralizedMetric& metric,
                                        const DensityConfig& density,
                                        std::size_t grid_resolution,
                                        std::uint64_t seed);

// Aggregates per-cell posterior contrasts back into the global
// advantage.  Must agree with advantage_discrete on the same fits; kept
// as an independent identity check between the per-point and global
// estimators.
AdvantageEstimate advantage_from_individual(const DiscreteDensity& member_density,
                                            const DiscreteDensity& nonmember_density,
                                            double prior_p);

// Membership posterior backed by a pair of fitted class densities.
// Points with zero fitted mixture mass fall back to the prior.
class PosteriorEstimator {
 public:
  static PosteriorEstimator fit(std::span<const QueryOutput> members,
                                std::span<const QueryOutput> nonmembers,
                                double prior_p, const DensityConfig& config);

  double eta(const QueryOutput& x) const;
  double prior() const { return prior_p_; }
  const Density& member_density() const { return *member_; }
  const Density& nonmember_density() const { return *nonmember_; }

 private:
  PosteriorEstimator() = default;

  std::shared_ptr<const Density> member_;
  std::shared_ptr<const Density> nonmember_;
  double prior_p_ = 0.5;
};

}  // namespace mace

#endif  // MACE_ADVANTAGE_HPP
