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

#include "mace/density.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mace/errors.hpp"
#include "mace/special_functions.hpp"

namespace mace {

ConfidenceInterval clopper_pearson(std::uint64_t successes,
                                   std::uint64_t trials, double level) {
  if (trials == 0) {
    throw ValidationError("clopper_pearson: trials must be positive");
  }
  if (successes > trials) {
    throw ValidationError("clopper_pearson: successes exceed trials");
  }
  if (!(level > 0.0) || !(level < 1.0)) {
    throw ValidationError("clopper_pearson: level must lie strictly inside (0, 1)");
  }
  const double tail = 0.5 * (1.0 - level);
  const auto k = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  ConfidenceInterval ci;
  ci.level = level;
  ci.lower = successes == 0 ? 0.0 : incomplete_beta_inv(k, n - k + 1.0, tail);
  ci.upper =
      successes == trials ? 1.0 : incomplete_beta_inv(k + 1.0, n - k, 1.0 - tail);
  return ci;
}

namespace {

// Data are treated as continuous when some dimension takes many distinct
// values relative to the sample size; the raw-value cell map would then
// be meaningless and the caller has to choose a BinningScheme.
bool looks_continuous(std::span<const QueryOutput> outputs, std::size_t d) {
  const std::size_t limit =
      std::max<std::size_t>(64, outputs.size() / 8);
  for (std::size_t k = 0; k < d; ++k) {
    std::set<double> distinct;
    for (const auto& x : outputs) {
      distinct.insert(x[k]);
      if (distinct.size() > limit) return true;
    }
  }
  return false;
}

}  // namespace

DiscreteDensity DiscreteDensity::fit(std::span<const QueryOutput> outputs,
                                     std::optional<BinningScheme> scheme) {
  if (outputs.empty()) {
    throw ValidationError("DiscreteDensity::fit: no data");
  }
  DiscreteDensity density;
  density.dimension_ = outputs.front().size();
  if (density.dimension_ == 0) {
    throw ValidationError("DiscreteDensity::fit: zero-dimensional data");
  }
  density.n_ = outputs.size();
  density.scheme_ = std::move(scheme);
  if (density.scheme_ &&
      density.scheme_->dimension() != density.dimension_) {
    throw ValidationError("DiscreteDensity::fit: scheme dimension mismatch");
  }
  for (const auto& x : outputs) {
    if (x.size() != density.dimension_) {
      throw DataError("DiscreteDensity::fit: inconsistent dimensions");
    }
    for (double v : x) {
      if (!std::isfinite(v)) {
        throw DataError("DiscreteDensity::fit: non-finite value");
      }
    }
  }
  if (!density.scheme_ && looks_continuous(outputs, density.dimension_)) {
    throw ValidationError(
        "DiscreteDensity::fit: outputs look continuous; fit with a "
        "BinningScheme or use the kernel density path");
  }
  for (const auto& x : outputs) {
    ++density.cells_[density.key_of(x)];
  }
  return density;
}

std::vector<double> DiscreteDensity::key_of(const QueryOutput& x) const {
  if (x.size() != dimension_) {
    throw DataError("DiscreteDensity: query dimension mismatch");
  }
  if (!scheme_) return x;
  CellIndex cell = scheme_->cell_of(x);
  std::vector<double> key(cell.size());
  for (std::size_t k = 0; k < cell.size(); ++k) {
    key[k] = static_cast<double>(cell[k]);
  }
  return key;
}

std::uint64_t DiscreteDensity::count_at(const QueryOutput& x) const {
  auto it = cells_.find(key_of(x));
  return it == cells_.end() ? 0 : it->second;
}

double DiscreteDensity::value_at(const QueryOutput& x) const {
  return static_cast<double>(count_at(x)) / static_cast<double>(n_);
}

ConfidenceInterval DiscreteDensity::value_ci(const QueryOutput& x,
                                             double level) const {
  return clopper_pearson(count_at(x), n_, level);
}

double kernel_roughness(KernelId kernel) {
  switch (kernel) {
    case KernelId::gaussian:
      return 0.28209479177387814;  // 1 / (2 sqrt(pi))
    case KernelId::epanechnikov:
      return 0.6;
  }
  throw ValidationError("kernel_roughness: unknown kernel");
}

double kernel_value(KernelId kernel, double u) {
  switch (kernel) {
    case KernelId::gaussian:
      return 0.3989422804014327 * std::exp(-0.5 * u * u);
    case KernelId::epanechnikov: {
      double s = 1.0 - u * u;
      return s > 0.0 ? 0.75 * s : 0.0;
    }
  }
  return 0.0;
}

KdeDensity KdeDensity::fit(std::span<const QueryOutput> outputs,
                           std::optional<double> bandwidth, KernelId kernel) {
  if (outputs.empty()) {
    throw ValidationError("KdeDensity::fit: no data");
  }
  KdeDensity density;
  density.kernel_ = kernel;
  density.dimension_ = outputs.front().size();
  if (density.dimension_ == 0) {
    throw ValidationError("KdeDensity::fit: zero-dimensional data");
  }
  density.n_ = outputs.size();
  const std::size_t d = density.dimension_;
  density.samples_.reserve(density.n_ * d);
  for (const auto& x : outputs) {
    if (x.size() != d) {
      throw DataError("KdeDensity::fit: inconsistent dimensions");
    }
    for (double v : x) {
      if (!std::isfinite(v)) {
        throw DataError("KdeDensity::fit: non-finite value");
      }
      density.samples_.push_back(v);
    }
  }

  if (bandwidth) {
    if (!(*bandwidth > 0.0) || !std::isfinite(*bandwidth)) {
      throw ValidationError("KdeDensity::fit: bandwidth must be positive");
    }
    density.bandwidths_.assign(d, *bandwidth);
    return density;
  }

  // Scott's rule per dimension.
  const double n = static_cast<double>(density.n_);
  const double rate = std::pow(n, -1.0 / (static_cast<double>(d) + 4.0));
  density.bandwidths_.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < density.n_; ++i) {
      mean += density.samples_[i * d + k];
    }
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < density.n_; ++i) {
      double c = density.samples_[i * d + k] - mean;
      ss += c * c;
    }
    double sd = density.n_ > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    if (!(sd > 0.0)) {
      throw ValidationError(
          "KdeDensity::fit: dimension with zero spread; the automatic "
          "bandwidth degenerates, use the discrete path instead");
    }
    density.bandwidths_[k] = sd * rate;
  }
  return density;
}

double KdeDensity::value_at(const QueryOutput& x) const {
  if (x.size() != dimension_) {
    throw DataError("KdeDensity: query dimension mismatch");
  }
  const std::size_t d = dimension_;
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double prod = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double h = bandwidths_[k];
      prod *= kernel_value(kernel_, (x[k] - samples_[i * d + k]) / h) / h;
      if (prod == 0.0) break;
    }
    acc += prod;
  }
  return acc / static_cast<double>(n_);
}

ConfidenceInterval KdeDensity::value_ci(const QueryOutput& x,
                                        double level) const {
  if (!(level > 0.0) || !(level < 1.0)) {
    throw ValidationError("KdeDensity::value_ci: level must lie strictly inside (0, 1)");
  }
  const double f = value_at(x);
  double h_prod = 1.0;
  for (double h : bandwidths_) h_prod *= h;
  const double mu = std::pow(kernel_roughness(kernel_),
                             static_cast<double>(dimension_));
  const double z = normal_quantile(1.0 - 0.5 * (1.0 - level));
  const double half =
      z * std::sqrt(mu * f / (static_cast<double>(n_) * h_prod));
  ConfidenceInterval ci;
  ci.level = level;
  ci.lower = std::max(0.0, f - half);
  ci.upper = f + half;
  return ci;
}

DiscreteDensity fit_discrete(std::span<const QueryOutput> outputs,
                             std::optional<BinningScheme> scheme) {
  return DiscreteDensity::fit(outputs, std::move(scheme));
}

KdeDensity fit_kde(std::span<const QueryOutput> outputs,
                   std::optional<double> bandwidth, KernelId kernel) {
  return KdeDensity::fit(outputs, bandwidth, kernel);
}

ConfidenceInterval kde_pointwise_ci(const KdeDensity& density,
                                    const QueryOutput& x, double level) {
  return density.value_ci(x, level);
}

}  // namespace mace
