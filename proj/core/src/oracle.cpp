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

#include "mace/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mace/errors.hpp"
#include "mace/rng.hpp"

namespace mace {

void FiniteToyDistribution::validate() const {
  if (member_pmf.empty() || member_pmf.size() != nonmember_pmf.size()) {
    throw ValidationError("FiniteToyDistribution: pmfs must be non-empty and equal-length");
  }
  if (!(prior_p > 0.0) || !(prior_p < 1.0)) {
    throw ValidationError("FiniteToyDistribution: prior must lie strictly inside (0, 1)");
  }
  for (const auto* pmf : {&member_pmf, &nonmember_pmf}) {
    double sum = 0.0;
    for (double v : *pmf) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ValidationError("FiniteToyDistribution: pmf entries must be non-negative");
      }
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
      throw ValidationError("FiniteToyDistribution: pmf must sum to 1");
    }
  }
}

double exact_advantage(const FiniteToyDistribution& toy) {
  toy.validate();
  double total = 0.0;
  for (std::size_t j = 0; j < toy.member_pmf.size(); ++j) {
    total += std::fabs(toy.prior_p * toy.member_pmf[j] -
                       (1.0 - toy.prior_p) * toy.nonmember_pmf[j]);
  }
  return total;
}

double exact_individual_risk(const FiniteToyDistribution& toy, std::size_t j) {
  toy.validate();
  if (j >= toy.member_pmf.size()) {
    throw ValidationError("exact_individual_risk: outcome out of range");
  }
  const double pp = toy.prior_p * toy.member_pmf[j];
  const double qq = (1.0 - toy.prior_p) * toy.nonmember_pmf[j];
  if (pp + qq == 0.0) {
    throw NumericError("exact_individual_risk: outcome has zero mass");
  }
  return std::fabs(pp - qq) / (pp + qq);
}

namespace {

// Ratio metric evaluated from raw coefficients and explicit confusion
// masses; deliberately not routed through the metrics module.
double raw_metric_value(const GeneralizedMetric& m, double tp, double fp,
                        double fn, double tn) {
  const double den =
      m.b0() + m.b11() * tp + m.b10() * fp + m.b01() * fn + m.b00() * tn;
  if (den == 0.0) {
    throw NumericError("oracle: metric denominator is zero");
  }
  return (m.a0() + m.a11() * tp + m.a10() * fp + m.a01() * fn + m.a00() * tn) /
         den;
}

double raw_threshold(const GeneralizedMetric& m) {
  if (m.b11() != m.b01() || m.b10() != m.b00()) {
    throw ValidationError(
        "oracle: metric denominator depends on the prediction; no "
        "closed-form threshold");
  }
  const double gap = m.a11() - m.a10() - m.a01() + m.a00();
  if (gap == 0.0) {
    throw ValidationError("oracle: metric has a degenerate numerator gap");
  }
  return (m.a00() - m.a10()) / gap;
}

}  // namespace

double exact_generalized_conditional(const FiniteToyDistribution& toy,
                                     const GeneralizedMetric& metric,
                                     std::size_t j) {
  toy.validate();
  if (j >= toy.member_pmf.size()) {
    throw ValidationError("exact_generalized_conditional: outcome out of range");
  }
  const double pp = toy.prior_p * toy.member_pmf[j];
  const double qq = (1.0 - toy.prior_p) * toy.nonmember_pmf[j];
  if (pp + qq == 0.0) {
    throw NumericError("exact_generalized_conditional: outcome has zero mass");
  }
  const double eta = pp / (pp + qq);
  const double t = raw_threshold(metric);
  const bool predict_member = eta > t;
  const double tp = predict_member ? eta : 0.0;
  const double fp = predict_member ? 1.0 - eta : 0.0;
  const double fn = predict_member ? 0.0 : eta;
  const double tn = predict_member ? 0.0 : 1.0 - eta;
  return raw_metric_value(metric, tp, fp, fn, tn);
}

ThresholdOptimum exact_metric_optimum(const FiniteToyDistribution& toy,
                                      const GeneralizedMetric& metric) {
  toy.validate();
  const std::size_t cells = toy.member_pmf.size();
  std::vector<double> eta(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    const double pp = toy.prior_p * toy.member_pmf[j];
    const double qq = (1.0 - toy.prior_p) * toy.nonmember_pmf[j];
    eta[j] = pp + qq > 0.0 ? pp / (pp + qq) : 0.0;
  }
  std::vector<double> sorted_eta = eta;
  std::sort(sorted_eta.begin(), sorted_eta.end());
  sorted_eta.erase(std::unique(sorted_eta.begin(), sorted_eta.end()),
                   sorted_eta.end());

  // Candidate cuts: below every posterior, between neighbors, above all.
  std::vector<double> cuts;
  cuts.push_back(sorted_eta.front() - 1.0);
  for (std::size_t i = 0; i + 1 < sorted_eta.size(); ++i) {
    cuts.push_back(0.5 * (sorted_eta[i] + sorted_eta[i + 1]));
  }
  cuts.push_back(sorted_eta.back() + 1.0);

  bool found = false;
  ThresholdOptimum best;
  for (double cut : cuts) {
    for (bool above : {true, false}) {
      double tp = 0.0, fp = 0.0, fn = 0.0, tn = 0.0;
      for (std::size_t j = 0; j < cells; ++j) {
        const double pp = toy.prior_p * toy.member_pmf[j];
        const double qq = (1.0 - toy.prior_p) * toy.nonmember_pmf[j];
        const bool positive = above ? eta[j] > cut : eta[j] < cut;
        if (positive) {
          tp += pp;
          fp += qq;
        } else {
          fn += pp;
          tn += qq;
        }
      }
      double value;
      try {
        value = raw_metric_value(metric, tp, fp, fn, tn);
      } catch (const NumericError&) {
        continue;
      }
      if (!found || value > best.value) {
        found = true;
        best.value = value;
        best.threshold = cut;
      }
    }
  }
  if (!found) {
    throw NumericError("exact_metric_optimum: metric undefined for every rule");
  }
  return best;
}

double continuous_truth_tv(double mu1, double mu2, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("continuous_truth_tv: sigma must be positive");
  }
  const double gap = std::fabs(mu1 - mu2) / (2.0 * sigma);
  // Phi(gap) - Phi(-gap) with Phi via the complementary error function.
  const double phi = 0.5 * std::erfc(-gap * 0.70710678118654752440);
  return 2.0 * phi - 1.0;
}

std::vector<QueryOutput> sample_categorical(std::span<const double> pmf,
                                            std::size_t n,
                                            std::uint64_t seed) {
  if (n == 0) {
    throw ValidationError("sample_categorical: n must be positive");
  }
  if (pmf.empty()) {
    throw ValidationError("sample_categorical: empty pmf");
  }
  double sum = 0.0;
  for (double v : pmf) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("sample_categorical: pmf entries must be non-negative");
    }
    sum += v;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw ValidationError("sample_categorical: pmf must sum to 1");
  }
  std::vector<double> cumulative(pmf.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < pmf.size(); ++j) {
    acc += pmf[j];
    cumulative[j] = acc;
  }
  cumulative.back() = std::numeric_limits<double>::infinity();

  RngStream stream(seed, 0);
  std::vector<QueryOutput> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = stream.uniform(i);
    const std::size_t j = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) -
        cumulative.begin());
    out.push_back({static_cast<double>(j)});
  }
  return out;
}

std::vector<QueryOutput> sample_normal(double mu, double sigma, std::size_t n,
                                       std::uint64_t seed) {
  if (n == 0) {
    throw ValidationError("sample_normal: n must be positive");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("sample_normal: sigma must be positive");
  }
  RngStream stream(seed, 0);
  std::vector<QueryOutput> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({mu + sigma * stream.normal(i)});
  }
  return out;
}

std::vector<std::vector<double>> sample_normal_records(
    std::span<const double> mu, double sigma, std::size_t n,
    std::uint64_t seed) {
  if (n == 0) {
    throw ValidationError("sample_normal_records: n must be positive");
  }
  if (mu.empty()) {
    throw ValidationError("sample_normal_records: empty mean vector");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("sample_normal_records: sigma must be positive");
  }
  RngStream stream(seed, 0);
  std::vector<std::vector<double>> out;
  out.reserve(n);
  const std::size_t d = mu.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> rec(d);
    for (std::size_t k = 0; k < d; ++k) {
      rec[k] = mu[k] + sigma * stream.normal(i * d + k);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace mace
