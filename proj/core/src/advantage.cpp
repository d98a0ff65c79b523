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

#include "mace/advantage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mace/detail/parallel.hpp"
#include "mace/errors.hpp"
#include "mace/rng.hpp"
#include "mace/sampling.hpp"

namespace mace {

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::discrete:
      return "discrete";
    case EstimatorKind::continuous:
      return "continuous";
    case EstimatorKind::generalized_empirical:
      return "generalized_empirical";
  }
  return "unknown";
}

DensityConfig DensityConfig::discrete_native() {
  return {Kind::discrete, std::nullopt, std::nullopt, KernelId::gaussian};
}

DensityConfig DensityConfig::discrete_binned(std::size_t bins) {
  return {Kind::discrete, bins, std::nullopt, KernelId::gaussian};
}

DensityConfig DensityConfig::continuous(std::optional<double> bandwidth,
                                        KernelId kernel) {
  return {Kind::continuous, std::nullopt, bandwidth, kernel};
}

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw ValidationError("confidence delta must lie strictly inside (0, 1)");
  }
}

void check_density_dimension(std::size_t d) {
  if (d > 3) {
    throw ValidationError(
        "density-based advantage estimation supports at most 3 query "
        "dimensions; reduce the query (e.g. a column maximum) first");
  }
}

double mcdiarmid_radius(std::size_t n, double delta) {
  return std::sqrt(2.0 / static_cast<double>(n) * std::log(2.0 / delta));
}

}  // namespace

AdvantageEstimate advantage_discrete(const LabeledQuerySet& set,
                                     const std::optional<BinningScheme>& scheme,
                                     double delta) {
  check_delta(delta);
  check_density_dimension(set.dimension());
  const auto members = set.member_outputs();
  const auto nonmembers = set.nonmember_outputs();
  const DiscreteDensity member_density = fit_discrete(members, scheme);
  const DiscreteDensity nonmember_density = fit_discrete(nonmembers, scheme);

  const double p = set.prior();
  const double w1 = p / static_cast<double>(members.size());
  const double w2 = (1.0 - p) / static_cast<double>(nonmembers.size());

  // Ordered merge over the union of observed cells.
  double total = 0.0;
  auto it1 = member_density.cells().begin();
  auto end1 = member_density.cells().end();
  auto it2 = nonmember_density.cells().begin();
  auto end2 = nonmember_density.cells().end();
  while (it1 != end1 || it2 != end2) {
    if (it2 == end2 || (it1 != end1 && it1->first < it2->first)) {
      total += std::fabs(w1 * static_cast<double>(it1->second));
      ++it1;
    } else if (it1 == end1 || it2->first < it1->first) {
      total += std::fabs(w2 * static_cast<double>(it2->second));
      ++it2;
    } else {
      total += std::fabs(w1 * static_cast<double>(it1->second) -
                         w2 * static_cast<double>(it2->second));
      ++it1;
      ++it2;
    }
  }

  AdvantageEstimate est;
  est.point = total;
  est.kind = EstimatorKind::discrete;
  est.n_used = set.size();
  est.confidence_delta = delta;
  est.concentration_radius = mcdiarmid_radius(set.size(), delta);
  return est;
}

namespace {

// Regular-grid view of a 1-D kernel density: samples are linearly
// binned, the kernel is applied as a discrete convolution, and lookups
// interpolate between nodes.  Node spacing tracks the bandwidth so the
// approximation error stays orders of magnitude below the estimator's
// statistical error.
struct Grid1d {
  double lo = 0.0;
  double dx = 1.0;
  std::vector<double> f;

  double value(double x) const {
    const double pos = (x - lo) / dx;
    if (!(pos > 0.0) || pos >= static_cast<double>(f.size() - 1)) return 0.0;
    const auto g = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(g);
    return f[g] * (1.0 - frac) + f[g + 1] * frac;
  }
};

Grid1d build_grid(const KdeDensity& kde) {
  const auto& samples = kde.samples();
  const double h = kde.bandwidths()[0];
  const double cut = kde.kernel() == KernelId::gaussian ? 8.5 : 1.0;
  auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *mn_it - cut * h;
  const double hi = *mx_it + cut * h;
  const double span = hi - lo;

  std::size_t nodes = 4096;
  const double wanted = std::ceil(8.0 * span / h);
  if (wanted > static_cast<double>(nodes)) {
    nodes = static_cast<std::size_t>(
        std::min(wanted, static_cast<double>(std::size_t{1} << 18)));
  }

  Grid1d grid;
  grid.lo = lo;
  grid.dx = span / static_cast<double>(nodes - 1);
  grid.f.assign(nodes, 0.0);

  std::vector<double> weight(nodes, 0.0);
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  for (double x : samples) {
    const double pos = (x - grid.lo) / grid.dx;
    const auto g = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(g);
    weight[g] += (1.0 - frac) * inv_n;
    weight[g + 1] += frac * inv_n;
  }

  const auto taps = static_cast<std::size_t>(std::ceil(cut * h / grid.dx)) + 1;
  std::vector<double> kv(taps + 1);
  for (std::size_t j = 0; j <= taps; ++j) {
    kv[j] = kernel_value(kde.kernel(),
                         static_cast<double>(j) * grid.dx / h) / h;
  }
  for (std::size_t g = 0; g < nodes; ++g) {
    const double w = weight[g];
    if (w == 0.0) continue;
    const std::size_t j_lo = g >= taps ? g - taps : 0;
    const std::size_t j_hi = std::min(nodes - 1, g + taps);
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
      grid.f[j] += w * kv[j > g ? j - g : g - j];
    }
  }
  return grid;
}

// Exact product-kernel evaluation against a flat sample matrix.
double kde_value_flat(const std::vector<double>& samples, std::size_t d,
                      const std::vector<double>& bandwidths, KernelId kernel,
                      const double* x) {
  const std::size_t n = samples.size() / d;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double prod = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double h = bandwidths[k];
      prod *= kernel_value(kernel, (x[k] - samples[i * d + k]) / h) / h;
      if (prod == 0.0) break;
    }
    acc += prod;
  }
  return acc / static_cast<double>(n);
}

}  // namespace

AdvantageEstimate advantage_continuous(const LabeledQuerySet& set,
                                       const KdeConfig& kde, double delta,
                                       std::size_t mc_samples,
                                       std::uint64_t seed, unsigned threads) {
  check_delta(delta);
  if (mc_samples != 0 && mc_samples < 1000) {
    throw ValidationError(
        "advantage_continuous: at least 1000 Monte Carlo samples are "
        "required (0 selects the automatic count)");
  }
  const std::size_t d = set.dimension();
  check_density_dimension(d);

  const auto members = set.member_outputs();
  const auto nonmembers = set.nonmember_outputs();
  const KdeDensity member_density = fit_kde(members, kde.bandwidth, kde.kernel);
  const KdeDensity nonmember_density =
      fit_kde(nonmembers, kde.bandwidth, kde.kernel);

  std::size_t m = mc_samples;
  if (m == 0) {
    m = std::min<std::size_t>(20 * set.size(), 1000000);
  }

  Grid1d member_grid;
  Grid1d nonmember_grid;
  if (d == 1) {
    member_grid = build_grid(member_density);
    nonmember_grid = build_grid(nonmember_density);
  }

  const double p = set.prior();
  const double q = 1.0 - p;
  const RngStream class_stream(seed, 10);
  const RngStream index_stream(seed, 11);
  const RngStream noise_stream(seed, 12);
  const std::size_t noise_per_dim =
      kde.kernel == KernelId::epanechnikov ? 3 : 1;

  const auto& member_flat = member_density.samples();
  const auto& nonmember_flat = nonmember_density.samples();

  std::vector<double> values(m);
  detail::parallel_for(m, threads, [&](std::size_t j) {
    const bool from_member = class_stream.uniform(j) < p;
    const auto& flat = from_member ? member_flat : nonmember_flat;
    const auto& bw = from_member ? member_density.bandwidths()
                                 : nonmember_density.bandwidths();
    const std::size_t n_class = flat.size() / d;
    const std::size_t idx = index_stream.index_below(j, n_class);

    double x[3];
    for (std::size_t k = 0; k < d; ++k) {
      const std::uint64_t base = (static_cast<std::uint64_t>(j) * d + k) *
                                 noise_per_dim;
      double noise;
      if (kde.kernel == KernelId::epanechnikov) {
        // Median of three uniforms on [-1, 1] has the parabolic density.
        double u1 = 2.0 * noise_stream.uniform(base) - 1.0;
        double u2 = 2.0 * noise_stream.uniform(base + 1) - 1.0;
        double u3 = 2.0 * noise_stream.uniform(base + 2) - 1.0;
        noise = u1 + u2 + u3 - std::max({u1, u2, u3}) - std::min({u1, u2, u3});
      } else {
        noise = noise_stream.normal(base);
      }
      x[k] = flat[idx * d + k] + bw[k] * noise;
    }

    double p_hat;
    double q_hat;
    if (d == 1) {
      p_hat = member_grid.value(x[0]);
      q_hat = nonmember_grid.value(x[0]);
    } else {
      p_hat = kde_value_flat(member_flat, d, member_density.bandwidths(),
                             kde.kernel, x);
      q_hat = kde_value_flat(nonmember_flat, d, nonmember_density.bandwidths(),
                             kde.kernel, x);
    }
    const double pp = p * p_hat;
    const double qq = q * q_hat;
    const double mix = pp + qq;
    values[j] = mix > 0.0 ? std::fabs(pp - qq) / mix : 0.0;
  });

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double v : values) {
    const double c = v - mean;
    ss += c * c;
  }
  const double se =
      m > 1 ? std::sqrt(ss / (static_cast<double>(m) - 1.0) /
                        static_cast<double>(m))
            : 0.0;

  AdvantageEstimate est;
  est.point = mean;
  est.kind = EstimatorKind::continuous;
  est.n_used = set.size();
  est.confidence_delta = delta;
  est.concentration_radius = mcdiarmid_radius(set.size(), delta);
  est.mc_samples = m;
  est.mc_standard_error = se;
  return est;
}

PosteriorEstimator PosteriorEstimator::fit(std::span<const QueryOutput> members,
                                           std::span<const QueryOutput> nonmembers,
                                           double prior_p,
                                           const DensityConfig& config) {
  if (!(prior_p > 0.0) || !(prior_p < 1.0)) {
    throw ValidationError("PosteriorEstimator::fit: prior must lie strictly inside (0, 1)");
  }
  if (members.empty() || nonmembers.empty()) {
    throw ValidationError("PosteriorEstimator::fit: both classes need data");
  }
  PosteriorEstimator out;
  out.prior_p_ = prior_p;
  if (config.kind == DensityConfig::Kind::discrete) {
    std::optional<BinningScheme> scheme;
    if (config.bins) {
      std::vector<QueryOutput> pooled(members.begin(), members.end());
      pooled.insert(pooled.end(), nonmembers.begin(), nonmembers.end());
      scheme = BinningScheme::fit(pooled, *config.bins);
    }
    out.member_ =
        std::make_shared<DiscreteDensity>(fit_discrete(members, scheme));
    out.nonmember_ =
        std::make_shared<DiscreteDensity>(fit_discrete(nonmembers, scheme));
  } else {
    out.member_ = std::make_shared<KdeDensity>(
        fit_kde(members, config.bandwidth, config.kernel));
    out.nonmember_ = std::make_shared<KdeDensity>(
        fit_kde(nonmembers, config.bandwidth, config.kernel));
  }
  return out;
}

double PosteriorEstimator::eta(const QueryOutput& x) const {
  const double pp = member_->value_at(x) * prior_p_;
  const double qq = nonmember_->value_at(x) * (1.0 - prior_p_);
  const double mix = pp + qq;
  if (mix == 0.0) return prior_p_;
  return pp / mix;
}

AdvantageEstimate advantage_generalized(const LabeledQuerySet& set,
                                        const GeneralizedMetric& metric,
                                        const DensityConfig& density,
                                        std::size_t grid_resolution,
                                        std::uint64_t seed) {
  if (grid_resolution == 0) {
    throw ValidationError("advantage_generalized: grid_resolution must be positive");
  }
  check_density_dimension(set.dimension());
  const auto parts = split_three_ways(set, seed);

  const PosteriorEstimator posterior = PosteriorEstimator::fit(
      parts[0].member_outputs(), parts[0].nonmember_outputs(), set.prior(),
      density);

  // Posterior scores for the threshold-selection partition.
  const LabeledQuerySet& tune = parts[1];
  std::vector<double> etas(tune.size());
  for (std::size_t i = 0; i < tune.size(); ++i) {
    etas[i] = posterior.eta(tune.output(i));
  }

  const double denom = static_cast<double>(grid_resolution + 1);
  bool found = false;
  double best_value = 0.0;
  ThresholdClassifier best_rule;
  std::size_t skipped = 0;

  auto confusion = [](const LabeledQuerySet& part,
                      const std::vector<double>& scores,
                      const ThresholdClassifier& rule) {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < part.size(); ++i) {
      const bool member = part.label(i) == MembershipLabel::member;
      const bool positive = rule.predict(scores[i]) == 1;
      if (member && positive) ++tp;
      else if (!member && positive) ++fp;
      else if (member) ++fn;
      else ++tn;
    }
    return ConfusionRates::from_counts(tp, fp, fn, tn);
  };

  for (std::size_t k = 1; k <= grid_resolution; ++k) {
    const double t = static_cast<double>(k) / denom;
    for (ThresholdOrientation orientation :
         {ThresholdOrientation::positive_above,
          ThresholdOrientation::positive_below}) {
      const ThresholdClassifier rule{t, orientation};
      double value;
      try {
        value = metric.evaluate(confusion(tune, etas, rule));
      } catch (const NumericError&) {
        ++skipped;
        continue;
      }
      if (!found || value > best_value ||
          (value == best_value &&
           std::fabs(t - 0.5) < std::fabs(best_rule.threshold - 0.5))) {
        found = true;
        best_value = value;
        best_rule = rule;
      }
    }
  }
  if (!found) {
    throw NumericError(
        "advantage_generalized: metric '" + metric.name() +
        "' was undefined at every threshold on the tuning partition");
  }

  const LabeledQuerySet& held_out = parts[2];
  std::vector<double> held_etas(held_out.size());
  for (std::size_t i = 0; i < held_out.size(); ++i) {
    held_etas[i] = posterior.eta(held_out.output(i));
  }
  double final_value;
  try {
    final_value = metric.evaluate(confusion(held_out, held_etas, best_rule));
  } catch (const NumericError&) {
    throw NumericError(
        "advantage_generalized: metric '" + metric.name() +
        "' is undefined on the held-out partition under the selected rule");
  }

  AdvantageEstimate est;
  est.point = final_value;
  est.kind = EstimatorKind::generalized_empirical;
  est.metric_name = metric.name();
  est.n_used = set.size();
  est.learned_threshold = best_rule.threshold;
  est.orientation = best_rule.orientation;
  est.skipped_grid_points = skipped;
  est.partition_sizes = {parts[0].size(), parts[1].size(), parts[2].size()};
  return est;
}

AdvantageEstimate advantage_from_individual(const DiscreteDensity& member_density,
                                            const DiscreteDensity& nonmember_density,
                                            double prior_p) {
  if (!(prior_p > 0.0) || !(prior_p < 1.0)) {
    throw ValidationError("advantage_from_individual: prior must lie strictly inside (0, 1)");
  }
  if (member_density.scheme().has_value() !=
          nonmember_density.scheme().has_value() ||
      (member_density.scheme() &&
       !(*member_density.scheme() == *nonmember_density.scheme()))) {
    throw ValidationError(
        "advantage_from_individual: the two densities must share one cell "
        "layout");
  }

  // Sum of mixture-weighted absolute contrasts over the union of cells:
  // each cell contributes (pp + qq) * |pp - qq| / (pp + qq).
  const double n1 = static_cast<double>(member_density.sample_count());
  const double n2 = static_cast<double>(nonmember_density.sample_count());
  double total = 0.0;
  auto it1 = member_density.cells().begin();
  auto end1 = member_density.cells().end();
  auto it2 = nonmember_density.cells().begin();
  auto end2 = nonmember_density.cells().end();
  while (it1 != end1 || it2 != end2) {
    double pp = 0.0;
    double qq = 0.0;
    if (it2 == end2 || (it1 != end1 && it1->first < it2->first)) {
      pp = prior_p * static_cast<double>(it1->second) / n1;
      ++it1;
    } else if (it1 == end1 || it2->first < it1->first) {
      qq = (1.0 - prior_p) * static_cast<double>(it2->second) / n2;
      ++it2;
    } else {
      pp = prior_p * static_cast<double>(it1->second) / n1;
      qq = (1.0 - prior_p) * static_cast<double>(it2->second) / n2;
      ++it1;
      ++it2;
    }
    const double mix = pp + qq;
    if (mix > 0.0) {
      total += mix * (std::fabs(pp - qq) / mix);
    }
  }

  AdvantageEstimate est;
  est.point = total;
  est.kind = EstimatorKind::discrete;
  est.n_used = member_density.sample_count() + nonmember_density.sample_count();
  return est;
}

}  // namespace mace
