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

#ifndef MACE_BINNING_HPP
#define MACE_BINNING_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "mace/types.hpp"

namespace mace {

using CellIndex = std::vector<std::int64_t>;

// Axis-aligned equal-width binning fitted to pooled data.  Outputs that
// fall outside the fitted range clamp to the edge bins, so every point
// always maps to a valid cell.
class BinningScheme {
 public:
  // Explicit ranges; lower[k] < upper[k] and bins_per_dim >= 1.
  BinningScheme(std::vector<double> lower, std::vector<double> upper,
                std::size_t bins_per_dim);

  // Fits per-dimension ranges to the pooled outputs.  A dimension with a
  // single distinct value gets a unit-width box around it.
  static BinningScheme fit(std::span<const QueryOutput> pooled,
                           std::size_t bins_per_dim = 100);

  std::size_t dimension() const { return lower_.size(); }
  std::size_t bins_per_dim() const { return bins_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  CellIndex cell_of(const QueryOutput& x) const;

  bool operator==(const BinningScheme& other) const = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::size_t bins_;
};

std::vector<CellIndex> discretize(std::span<const QueryOutput> outputs,
                                  const BinningScheme& scheme);

}  // namespace mace

#endif  // MACE_BINNING_HPP
