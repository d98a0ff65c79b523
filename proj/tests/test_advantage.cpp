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

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "mace/advantage.hpp"
#include "mace/errors.hpp"
#include "mace/oracle.hpp"
#include "mace/rng.hpp"

using namespace mace;

namespace {

LabeledQuerySet two_class_set(const std::vector<QueryOutput>& members,
                              const std::vector<QueryOutput>& nonmembers,
                              double prior_p) {
  std::vector<QueryOutput> outputs;
  std::vector<MembershipLabel> labels;
  for (const auto& x : members) {
    outputs.push_back(x);
    labels.push_back(MembershipLabel::member);
  }
  for (const auto& x : nonmembers) {
    outputs.push_back(x);
    labels.push_back(MembershipLabel::nonmember);
  }
  return LabeledQuerySet(std::move(outputs), std::move(labels), prior_p);
}

std::vector<QueryOutput> repeat_cells(
    const std::vector<std::pair<double, int>>& spec) {
  std::vector<QueryOutput> out;
  for (const auto& [value, count] : spec) {
    for (int i = 0; i < count; ++i) out.push_back({value});
  }
  return out;
}

}  // namespace

TEST_CASE("discrete statistic is 1 on disjoint supports") {
  const auto set = two_class_set(repeat_cells({{0.0, 8}}),
                                 repeat_cells({{1.0, 16}}), 0.5);
  const AdvantageEstimate est = advantage_discrete(set, std::nullopt, 0.05);
  CHECK(est.point == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(est.kind == EstimatorKind::discrete);
  CHECK(est.n_used == 24);
  CHECK(est.confidence_delta == 0.05);
  CHECK_FALSE(est.mc_samples.has_value());
  CHECK_FALSE(est.learned_threshold.has_value());
}

TEST_CASE("discrete statistic reduces to the prior gap on identical laws") {
  const std::vector<std::pair<double, int>> cells = {{0.0, 3}, {1.0, 5}};
  const auto even =
      two_class_set(repeat_cells(cells), repeat_cells(cells), 0.5);
  CHECK(advantage_discrete(even, std::nullopt, 0.05).point == 0.0);
  const auto skewed =
      two_class_set(repeat_cells(cells), repeat_cells(cells), 0.25);
  CHECK(advantage_discrete(skewed, std::nullopt, 0.05).point ==
        doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("concentration radius matches the bounded-differences form") {
  const auto set = two_class_set(repeat_cells({{0.0, 10000}}),
                                 repeat_cells({{1.0, 10000}}), 0.5);
  const AdvantageEstimate est = advantage_discrete(set, std::nullopt, 0.05);
  REQUIRE(est.concentration_radius.has_value());
  CHECK(*est.concentration_radius ==
        doctest::Approx(0.019206455826398416).epsilon(1e-15));
  // Quarter the sample, double the radius.
  const auto small = two_class_set(repeat_cells({{0.0, 2500}}),
                                   repeat_cells({{1.0, 2500}}), 0.5);
  const AdvantageEstimate est_small =
      advantage_discrete(small, std::nullopt, 0.05);
  CHECK(*est_small.concentration_radius ==
        doctest::Approx(2.0 * *est.concentration_radius).epsilon(1e-12));
}

TEST_CASE("discrete statistic ignores sample order") {
  const auto grouped = two_class_set(repeat_cells({{0.0, 6}, {1.0, 2}}),
                                     repeat_cells({{0.0, 2}, {1.0, 6}}), 0.4);
  // Same multiset, classes interleaved one by one.
  std::vector<QueryOutput> outputs;
  std::vector<MembershipLabel> labels;
  for (int i = 0; i < 8; ++i) {
    outputs.push_back({i < 6 ? 0.0 : 1.0});
    labels.push_back(MembershipLabel::member);
    outputs.push_back({i < 2 ? 0.0 : 1.0});
    labels.push_back(MembershipLabel::nonmember);
  }
  const LabeledQuerySet interleaved(std::move(outputs), std::move(labels), 0.4);
  CHECK(advantage_discrete(grouped, std::nullopt, 0.05).point ==
        advantage_discrete(interleaved, std::nullopt, 0.05).point);
}

TEST_CASE("binned statistic separates continuous clusters") {
  std::vector<QueryOutput> members, nonmembers;
  RngStream rng(3, 0);
  for (int i = 0; i < 200; ++i) {
    members.push_back({0.1 * rng.normal(2 * i)});
    nonmembers.push_back({10.0 + 0.1 * rng.normal(2 * i + 1)});
  }
  const auto set = two_class_set(members, nonmembers, 0.5);
  // Without a scheme the raw-value cells are meaningless and rejected.
  CHECK_THROWS_AS(advantage_discrete(set, std::nullopt, 0.05),
                  ValidationError);
  const BinningScheme scheme = BinningScheme::fit(set.outputs(), 16);
  const AdvantageEstimate est = advantage_discrete(set, scheme, 0.05);
  CHECK(est.point == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("advantage input validation") {
  const auto set = two_class_set(repeat_cells({{0.0, 4}}),
                                 repeat_cells({{1.0, 4}}), 0.5);
  CHECK_THROWS_AS(advantage_discrete(set, std::nullopt, 0.0), ValidationError);
  CHECK_THROWS_AS(advantage_discrete(set, std::nullopt, 1.0), ValidationError);

  const auto wide = two_class_set({{0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 1.0}},
                                  {{1.0, 1.0, 1.0, 1.0}, {1.0, 1.0, 1.0, 0.0}},
                                  0.5);
  CHECK_THROWS_WITH_AS(advantage_discrete(wide, std::nullopt, 0.05),
                       doctest::Contains("at most 3"), ValidationError);
  CHECK_THROWS_WITH_AS(
      advantage_continuous(wide, KdeConfig{}, 0.05, 0, 1),
      doctest::Contains("at most 3"), ValidationError);
}

TEST_CASE("per-cell aggregation reproduces the global statistic") {
  RngStream rng(17, 0);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<std::pair<double, int>> member_spec, nonmember_spec;
    for (int j = 0; j < 6; ++j) {
      member_spec.push_back(
          {static_cast<double>(j),
           1 + static_cast<int>(rng.index_below(12 * rep + 2 * j, 40))});
      nonmember_spec.push_back(
          {static_cast<double>(j),
           1 + static_cast<int>(rng.index_below(12 * rep + 2 * j + 1, 40))});
    }
    const double prior = 0.2 + 0.1 * rep;
    const auto set = two_class_set(repeat_cells(member_spec),
                                   repeat_cells(nonmember_spec), prior);
    const AdvantageEstimate global =
        advantage_discrete(set, std::nullopt, 0.05);
    const DiscreteDensity member_density =
        fit_discrete(set.member_outputs(), std::nullopt);
    const DiscreteDensity nonmember_density =
        fit_discrete(set.nonmember_outputs(), std::nullopt);
    const AdvantageEstimate from_cells =
        advantage_from_individual(member_density, nonmember_density, prior);
    CHECK(from_cells.point == doctest::Approx(global.point).epsilon(1e-9));
  }
}

TEST_CASE("per-cell aggregation demands one cell layout") {
  const DiscreteDensity native =
      fit_discrete(repeat_cells({{0.0, 4}, {1.0, 4}}), std::nullopt);
  const DiscreteDensity binned = fit_discrete(
      repeat_cells({{0.0, 4}, {1.0, 4}}), BinningScheme({0.0}, {1.0}, 2));
  CHECK_THROWS_AS(advantage_from_individual(native, binned, 0.5),
                  ValidationError);
}

TEST_CASE("continuous estimator recovers the two-normal truth") {
  std::vector<QueryOutput> members = sample_normal(0.0, 1.0, 2000, 41);
  std::vector<QueryOutput> nonmembers = sample_normal(1.0, 1.0, 2000, 42);
  const auto set = two_class_set(members, nonmembers, 0.5);
  const AdvantageEstimate est =
      advantage_continuous(set, KdeConfig{}, 0.05, 0, 9);
  const double truth = continuous_truth_tv(0.0, 1.0, 1.0);
  CHECK(truth == doctest::Approx(0.38292492254802624).epsilon(1e-14));
  CHECK(est.point == doctest::Approx(truth).epsilon(0.25));
  CHECK(std::fabs(est.point - truth) < 0.08);
  CHECK(est.kind == EstimatorKind::continuous);
  REQUIRE(est.mc_samples.has_value());
  CHECK(*est.mc_samples == 80000);  // 20 draws per sample, capped at 1e6
  REQUIRE(est.mc_standard_error.has_value());
  CHECK(*est.mc_standard_error > 0.0);
  CHECK(*est.mc_standard_error < 0.01);
  REQUIRE(est.concentration_radius.has_value());
  CHECK(*est.concentration_radius ==
        doctest::Approx(std::sqrt(2.0 / 4000.0 * std::log(40.0))));
}

TEST_CASE("continuous estimator is thread-count invariant") {
  std::vector<QueryOutput> members = sample_normal(0.0, 1.0, 400, 5);
  std::vector<QueryOutput> nonmembers = sample_normal(0.8, 1.0, 400, 6);
  const auto set = two_class_set(members, nonmembers, 0.5);
  const AdvantageEstimate one =
      advantage_continuous(set, KdeConfig{}, 0.05, 4000, 31, 1);
  const AdvantageEstimate three =
      advantage_continuous(set, KdeConfig{}, 0.05, 4000, 31, 3);
  CHECK(one.point == three.point);
  CHECK(*one.mc_standard_error == *three.mc_standard_error);
  // A different seed moves the Monte Carlo estimate.
  const AdvantageEstimate other =
      advantage_continuous(set, KdeConfig{}, 0.05, 4000, 32, 1);
  CHECK(other.point != one.point);
}

TEST_CASE("continuous estimator floors the monte carlo budget") {
  const auto set = two_class_set(sample_normal(0.0, 1.0, 50, 1),
                                 sample_normal(1.0, 1.0, 50, 2), 0.5);
  CHECK_THROWS_AS(advantage_continuous(set, KdeConfig{}, 0.05, 500, 1),
                  ValidationError);
  CHECK_NOTHROW(advantage_continuous(set, KdeConfig{}, 0.05, 1000, 1));
}

TEST_CASE("epanechnikov sampling path works in one and two dimensions") {
  const KdeConfig kde{0.5, KernelId::epanechnikov};
  const auto line = two_class_set(sample_normal(0.0, 1.0, 150, 7),
                                  sample_normal(2.0, 1.0, 150, 8), 0.5);
  const AdvantageEstimate est1 = advantage_continuous(line, kde, 0.05, 2000, 3);
  CHECK(est1.point > 0.3);
  CHECK(est1.point <= 1.0);

  std::vector<QueryOutput> members, nonmembers;
  for (auto& r : sample_normal_records(std::vector<double>{0.0, 0.0}, 1.0, 150, 9)) {
    members.push_back(std::move(r));
  }
  for (auto& r : sample_normal_records(std::vector<double>{2.0, 2.0}, 1.0, 150, 10)) {
    nonmembers.push_back(std::move(r));
  }
  const auto plane = two_class_set(members, nonmembers, 0.5);
  const AdvantageEstimate est2 =
      advantage_continuous(plane, kde, 0.05, 2000, 3, 2);
  CHECK(est2.point > 0.5);
  CHECK(est2.point <= 1.0);
}

TEST_CASE("empirical threshold search recovers a separable rule") {
  const auto set = two_class_set(repeat_cells({{0.0, 270}, {1.0, 30}}),
                                 repeat_cells({{0.0, 30}, {1.0, 270}}), 0.5);
  const GeneralizedMetric acc = named_metric("ACC", 0.5);
  const AdvantageEstimate est = advantage_generalized(
      set, acc, DensityConfig::discrete_native(), 99, 7);
  CHECK(est.kind == EstimatorKind::generalized_empirical);
  CHECK(est.metric_name == "ACC");
  CHECK(est.n_used == 600);
  REQUIRE(est.partition_sizes.has_value());
  CHECK((*est.partition_sizes)[0] + (*est.partition_sizes)[1] +
            (*est.partition_sizes)[2] ==
        600);
  REQUIRE(est.learned_threshold.has_value());
  CHECK(*est.learned_threshold > 0.0);
  CHECK(*est.learned_threshold < 1.0);
  REQUIRE(est.orientation.has_value());
  CHECK(*est.orientation == ThresholdOrientation::positive_above);
  CHECK(est.skipped_grid_points.has_value());

  // The held-out accuracy sits near the population optimum 0.9.
  FiniteToyDistribution toy;
  toy.member_pmf = {0.9, 0.1};
  toy.nonmember_pmf = {0.1, 0.9};
  toy.prior_p = 0.5;
  const ThresholdOptimum optimum = exact_metric_optimum(toy, acc);
  CHECK(optimum.value == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(est.point == doctest::Approx(optimum.value).epsilon(0.08));
}

TEST_CASE("threshold search handles thresholdless metrics by skipping") {
  const auto set = two_class_set(repeat_cells({{0.0, 135}, {1.0, 15}}),
                                 repeat_cells({{0.0, 15}, {1.0, 135}}), 0.5);
  const GeneralizedMetric ppv = named_metric("PPV", 0.5);
  const AdvantageEstimate est = advantage_generalized(
      set, ppv, DensityConfig::discrete_native(), 99, 11);
  // Rules that predict nobody positive are undefined for precision and
  // must be skipped, not crash the search.
  REQUIRE(est.skipped_grid_points.has_value());
  CHECK(*est.skipped_grid_points > 0);
  CHECK(est.point > 0.5);
  CHECK(est.point <= 1.0);
}

TEST_CASE("threshold search validates its grid") {
  const auto set = two_class_set(repeat_cells({{0.0, 3}}),
                                 repeat_cells({{1.0, 3}}), 0.5);
  CHECK_THROWS_AS(
      advantage_generalized(set, named_metric("ACC", 0.5),
                            DensityConfig::discrete_native(), 0, 1),
      ValidationError);
}

TEST_CASE("posterior estimator falls back to the prior off support") {
  const PosteriorEstimator posterior = PosteriorEstimator::fit(
      repeat_cells({{0.0, 9}, {1.0, 1}}), repeat_cells({{0.0, 1}, {1.0, 9}}),
      0.3, DensityConfig::discrete_native());
  CHECK(posterior.eta({0.0}) ==
        doctest::Approx((0.9 * 0.3) / (0.9 * 0.3 + 0.1 * 0.7)).epsilon(1e-12));
  CHECK(posterior.eta({5.0}) == 0.3);
  CHECK(posterior.prior() == 0.3);
}
