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

#include "mace/queries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mace/errors.hpp"

namespace mace {
namespace {

// Distance in the metric's "reduced" form (squared for l2, plain for
// l1); cheap to accumulate and order-preserving.
double reduced_distance(std::span<const double> a, std::span<const double> b,
                        DistanceId metric) {
  double acc = 0.0;
  if (metric == DistanceId::l2) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double diff = a[k] - b[k];
      acc += diff * diff;
    }
  } else {
    for (std::size_t k = 0; k < a.size(); ++k) {
      acc += std::fabs(a[k] - b[k]);
    }
  }
  return acc;
}

double from_reduced(double reduced, DistanceId metric) {
  return metric == DistanceId::l2 ? std::sqrt(reduced) : reduced;
}

}  // namespace

double distance(std::span<const double> a, std::span<const double> b,
                DistanceId metric) {
  if (a.size() != b.size()) {
    throw ValidationError("distance: dimension mismatch");
  }
  return from_reduced(reduced_distance(a, b, metric), metric);
}

SyntheticDataset::SyntheticDataset(std::vector<std::vector<double>> records) {
  if (records.empty()) {
    throw ValidationError("SyntheticDataset: no records");
  }
  d_ = records.front().size();
  if (d_ == 0) {
    throw ValidationError("SyntheticDataset: zero-dimensional records");
  }
  n_ = records.size();
  flat_.reserve(n_ * d_);
  for (const auto& r : records) {
    if (r.size() != d_) {
      throw DataError("SyntheticDataset: inconsistent record dimensions");
    }
    for (double v : r) {
      if (!std::isfinite(v)) {
        throw DataError("SyntheticDataset: non-finite record value");
      }
      flat_.push_back(v);
    }
  }
}

QueryOutput nn_distance_query(std::span<const double> z,
                              const SyntheticDataset& synthetic,
                              DistanceId metric) {
  if (z.size() != synthetic.dimension()) {
    throw ValidationError("nn_distance_query: dimension mismatch");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < synthetic.size(); ++i) {
    best = std::min(best, reduced_distance(z, synthetic.record(i), metric));
  }
  return {from_reduced(best, metric)};
}

NnIndex::NnIndex(const SyntheticDataset& synthetic, DistanceId metric)
    : flat_(synthetic.flat()),
      order_(synthetic.size()),
      d_(synthetic.dimension()),
      metric_(metric) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(2 * synthetic.size() / 8 + 8);
  build(0, order_.size(), 0);
}

std::int32_t NnIndex::build(std::size_t begin, std::size_t end,
                            std::size_t depth) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= 16) {
    nodes_[id].begin = static_cast<std::uint32_t>(begin);
    nodes_[id].end = static_cast<std::uint32_t>(end);
    return id;
  }
  const std::size_t axis = depth % d_;
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     return flat_[a * d_ + axis] < flat_[b * d_ + axis];
                   });
  const double split = flat_[order_[mid] * d_ + axis];
  nodes_[id].axis = static_cast<std::uint32_t>(axis);
  nodes_[id].split = split;
  const std::int32_t left = build(begin, mid, depth + 1);
  const std::int32_t right = build(mid, end, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void NnIndex::search(std::int32_t node, std::span<const double> z,
                     double& best) const {
  const Node& nd = nodes_[node];
  if (nd.left < 0) {
    for (std::uint32_t i = nd.begin; i < nd.end; ++i) {
      const std::size_t row = order_[i];
      best = std::min(
          best, reduced_distance(z, {flat_.data() + row * d_, d_}, metric_));
    }
    return;
  }
  const double diff = z[nd.axis] - nd.split;
  const double margin =
      metric_ == DistanceId::l2 ? diff * diff : std::fabs(diff);
  const std::int32_t near = diff < 0.0 ? nd.left : nd.right;
  const std::int32_t far = diff < 0.0 ? nd.right : nd.left;
  search(near, z, best);
  if (margin < best) {
    search(far, z, best);
  }
}

double NnIndex::nearest_distance(std::span<const double> z) const {
  if (z.size() != d_) {
    throw ValidationError("NnIndex: dimension mismatch");
  }
  double best = std::numeric_limits<double>::infinity();
  search(0, z, best);
  return from_reduced(best, metric_);
}

QueryOutput epsilon_ball_query(std::span<const double> z,
                               const SyntheticDataset& synthetic,
                               DistanceId metric, double epsilon) {
  if (z.size() != synthetic.dimension()) {
    throw ValidationError("epsilon_ball_query: dimension mismatch");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("epsilon_ball_query: epsilon must be positive and finite");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < synthetic.size(); ++i) {
    const double dist =
        from_reduced(reduced_distance(z, synthetic.record(i), metric), metric);
    if (dist <= epsilon) {
      acc += std::log(std::max(dist, 1e-12));
    }
  }
  return {-acc / static_cast<double>(synthetic.size())};
}

QueryOutput combine_queries(std::span<const QueryOutput> parts) {
  if (parts.empty()) {
    throw ValidationError("combine_queries: nothing to combine");
  }
  QueryOutput out;
  std::size_t total = 0;
  for (const auto& part : parts) total += part.size();
  out.reserve(total);
  for (const auto& part : parts) {
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

QueryOutput max_over_columns(const QueryOutput& output) {
  if (output.empty()) {
    throw ValidationError("max_over_columns: empty output");
  }
  return {*std::max_element(output.begin(), output.end())};
}

}  // namespace mace
