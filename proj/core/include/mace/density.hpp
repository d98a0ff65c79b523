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

#ifndef MACE_DENSITY_HPP
#define MACE_DENSITY_HPP

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mace/binning.hpp"
#include "mace/types.hpp"

namespace mace {

// Exact two-sided binomial interval (Clopper-Pearson) for k successes in
// n trials at the given coverage level.  Endpoints come from the inverse
// regularized incomplete beta; k = 0 pins the lower endpoint to 0 and
// k = n pins the upper endpoint to 1.
ConfidenceInterval clopper_pearson(std::uint64_t successes,
                                   std::uint64_t trials, double level);

// A fitted one-class model of query-output mass or density, evaluable
// pointwise with an uncertainty band.
class Density {
 public:
  virtual ~Density() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::size_t sample_count() const = 0;
  // Probability mass (discrete) or density (continuous) at x.
  virtual double value_at(const QueryOutput& x) const = 0;
  virtual ConfidenceInterval value_ci(const QueryOutput& x,
                                      double level) const = 0;
};

// Empirical cell masses.  With a BinningScheme the cells are its boxes;
// without one the raw output vectors act as cells, which is meant for
// natively discrete query outputs and rejected when the data look
// continuous.  A point never seen in the fit has mass 0 and still gets
// a valid Clopper-Pearson interval.
class DiscreteDensity final : public Density {
 public:
  static DiscreteDensity fit(std::span<const QueryOutput> outputs,
                             std::optional<BinningScheme> scheme);

  std::size_t dimension() const override { return dimension_; }
  std::size_t sample_count() const override { return n_; }
  double value_at(const QueryOutput& x) const override;
  ConfidenceInterval value_ci(const QueryOutput& x, double level) const override;

  std::uint64_t count_at(const QueryOutput& x) const;
  const std::optional<BinningScheme>& scheme() const { return scheme_; }
  // Cell key -> count; keys are bin indices (binned) or raw values
  // (natively discrete), stored as doubles either way.
  const std::map<std::vector<double>, std::uint64_t>& cells() const {
    return cells_;
  }

 private:
  DiscreteDensity() = default;
  std::vector<double> key_of(const QueryOutput& x) const;

  std::map<std::vector<double>, std::uint64_t> cells_;
  std::optional<BinningScheme> scheme_;
  std::size_t dimension_ = 0;
  std::size_t n_ = 0;
};

enum class KernelId {
  gaussian,
  epanechnikov,
};

// Product-kernel density estimate with per-dimension bandwidths.  The
// automatic bandwidth is Scott's rule, sd_k * n^(-1/(d+4)); an explicit
// bandwidth applies to every dimension.
class KdeDensity final : public Density {
 public:
  static KdeDensity fit(std::span<const QueryOutput> outputs,
                        std::optional<double> bandwidth,
                        KernelId kernel = KernelId::gaussian);

  std::size_t dimension() const override { return dimension_; }
  std::size_t sample_count() const override { return n_; }
  double value_at(const QueryOutput& x) const override;
  // Pointwise band from the asymptotic variance mu_K^d * f / (n * prod h);
  // the lower endpoint is clamped at 0 and a zero estimate collapses the
  // band to a point.
  ConfidenceInterval value_ci(const QueryOutput& x, double level) const override;

  const std::vector<double>& bandwidths() const { return bandwidths_; }
  KernelId kernel() const { return kernel_; }
  // Row-major n x d sample matrix the estimate was fitted on.
  const std::vector<double>& samples() const { return samples_; }

 private:
  KdeDensity() = default;

  std::vector<double> samples_;
  std::vector<double> bandwidths_;
  KernelId kernel_ = KernelId::gaussian;
  std::size_t dimension_ = 0;
  std::size_t n_ = 0;
};

// Construction entry points used across the library.
DiscreteDensity fit_discrete(std::span<const QueryOutput> outputs,
                             std::optional<BinningScheme> scheme);
KdeDensity fit_kde(std::span<const QueryOutput> outputs,
                   std::optional<double> bandwidth,
                   KernelId kernel = KernelId::gaussian);
ConfidenceInterval kde_pointwise_ci(const KdeDensity& density,
                                    const QueryOutput& x, double level);

// Integral of the squared kernel over one dimension.
double kernel_roughness(KernelId kernel);

// Kernel weight at standardized offset u.
double kernel_value(KernelId kernel, double u);

}  // namespace mace

#endif  // MACE_DENSITY_HPP
