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

#ifndef MACE_QUERIES_HPP
#define MACE_QUERIES_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "mace/types.hpp"

namespace mace {

enum class DistanceId {
  l2,
  l1,
};

double distance(std::span<const double> a, std::span<const double> b,
                DistanceId metric);

// Released synthetic records the attack queries are computed against.
class SyntheticDataset {
 public:
  explicit SyntheticDataset(std::vector<std::vector<double>> records);

  std::size_t size() const { return n_; }
  std::size_t dimension() const { return d_; }
  // Row-major n x d storage.
  const std::vector<double>& flat() const { return flat_; }
  std::span<const double> record(std::size_t i) const {
    return {flat_.data() + i * d_, d_};
  }

 private:
  std::vector<double> flat_;
  std::size_t n_ = 0;
  std::size_t d_ = 0;
};

// Scalar query: distance from z to its nearest synthetic record, by
// linear scan.
QueryOutput nn_distance_query(std::span<const double> z,
                              const SyntheticDataset& synthetic,
                              DistanceId metric);

// Exact nearest-neighbor accelerator; agrees with the linear scan on
// every query.
class NnIndex {
 public:
  NnIndex(const SyntheticDataset& synthetic, DistanceId metric);

  double nearest_distance(std::span<const double> z) const;

 private:
  struct Node {
    double split = 0.0;
    std::uint32_t axis = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;  // leaf range in order_; empty for inner nodes
  };

  std::int32_t build(std::size_t begin, std::size_t end, std::size_t depth);
  void search(std::int32_t node, std::span<const double> z,
              double& best) const;

  std::vector<double> flat_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::size_t d_ = 0;
  DistanceId metric_ = DistanceId::l2;
};

// Scalar query: -(1/n) * sum over synthetic records within distance
// epsilon of log(distance), with distances floored at 1e-12 before the
// log.  Close-by records push the value up.
QueryOutput epsilon_ball_query(std::span<const double> z,
                               const SyntheticDataset& synthetic,
                               DistanceId metric, double epsilon);

// Concatenates several query outputs into one longer output.
QueryOutput combine_queries(std::span<const QueryOutput> parts);

// Collapses a multi-dimensional output to its largest coordinate.
QueryOutput max_over_columns(const QueryOutput& output);

}  // namespace mace

#endif  // MACE_QUERIES_HPP
