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

#include "mace/binning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mace/errors.hpp"

namespace mace {

BinningScheme::BinningScheme(std::vector<double> lower,
                             std::vector<double> upper,
                             std::size_t bins_per_dim)
    : lower_(std::move(lower)), upper_(std::move(upper)), bins_(bins_per_dim) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    throw ValidationError("BinningScheme: mismatched or empty range vectors");
  }
  if (bins_ == 0) {
    throw ValidationError("BinningScheme: bins_per_dim must be positive");
  }
  for (std::size_t k = 0; k < lower_.size(); ++k) {
    if (!std::isfinite(lower_[k]) || !std::isfinite(upper_[k]) ||
        !(lower_[k] < upper_[k])) {
      throw ValidationError("BinningScheme: each range needs lower < upper");
    }
  }
}

BinningScheme BinningScheme::fit(std::span<const QueryOutput> pooled,
                                 std::size_t bins_per_dim) {
  if (pooled.empty()) {
    throw ValidationError("BinningScheme::fit: no data");
  }
  const std::size_t d = pooled.front().size();
  if (d == 0) {
    throw ValidationError("BinningScheme::fit: zero-dimensional data");
  }
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (const auto& x : pooled) {
    if (x.size() != d) {
      throw DataError("BinningScheme::fit: inconsistent dimensions");
    }
    for (std::size_t k = 0; k < d; ++k) {
      if (!std::isfinite(x[k])) {
        throw DataError("BinningScheme::fit: non-finite value");
      }
      lo[k] = std::min(lo[k], x[k]);
      hi[k] = std::max(hi[k], x[k]);
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    if (lo[k] == hi[k]) {
      lo[k] -= 0.5;
      hi[k] += 0.5;
    }
  }
  return BinningScheme(std::move(lo), std::move(hi), bins_per_dim);
}

CellIndex BinningScheme::cell_of(const QueryOutput& x) const {
  if (x.size() != lower_.size()) {
    throw DataError("BinningScheme::cell_of: dimension mismatch");
  }
  CellIndex cell(x.size());
  const auto last = static_cast<std::int64_t>(bins_) - 1;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double width = (upper_[k] - lower_[k]) / static_cast<double>(bins_);
    auto j = static_cast<std::int64_t>(
        std::floor((x[k] - lower_[k]) / width));
    cell[k] = std::clamp<std::int64_t>(j, 0, last);
  }
  return cell;
}

std::vector<CellIndex> discretize(std::span<const QueryOutput> outputs,
                                  const BinningScheme& scheme) {
  std::vector<CellIndex> cells;
  cells.reserve(outputs.size());
  for (const auto& x : outputs) {
    cells.push_back(scheme.cell_of(x));
  }
  return cells;
}

}  // namespace mace
