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

#include "mace/sampling.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "mace/errors.hpp"
#include "mace/rng.hpp"

namespace mace {

LabeledQuerySet build_labeled_set(std::span<const QueryOutput> member_pool,
                                  std::span<const QueryOutput> nonmember_pool,
                                  const ExperimentConfig& cfg) {
  cfg.validate();
  if (member_pool.empty() || nonmember_pool.empty()) {
    throw DataError("build_labeled_set: both pools must be non-empty");
  }
  const std::size_t n = cfg.n_samples;
  const auto n1 = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * cfg.prior_p + 0.5));
  if (n1 == 0 || n1 >= n) {
    throw ValidationError(
        "build_labeled_set: n_samples too small for prior_p, one class would be empty");
  }
  const std::size_t n2 = n - n1;

  std::vector<QueryOutput> outputs;
  std::vector<MembershipLabel> labels;
  outputs.reserve(n);
  labels.reserve(n);

  RngStream member_draws(cfg.rng_seed, 0);
  for (std::size_t i = 0; i < n1; ++i) {
    outputs.push_back(member_pool[member_draws.index_below(i, member_pool.size())]);
    labels.push_back(MembershipLabel::member);
  }
  RngStream nonmember_draws(cfg.rng_seed, 1);
  for (std::size_t i = 0; i < n2; ++i) {
    outputs.push_back(
        nonmember_pool[nonmember_draws.index_below(i, nonmember_pool.size())]);
    labels.push_back(MembershipLabel::nonmember);
  }
  return LabeledQuerySet(std::move(outputs), std::move(labels), cfg.prior_p);
}

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t count, std::uint64_t seed,
                                          std::uint64_t stream) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  SequentialRng rng(seed, stream);
  for (std::size_t i = count; i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.index_below(i)]);
  }
  return idx;
}

}  // namespace

std::array<LabeledQuerySet, 3> split_three_ways(const LabeledQuerySet& set,
                                                std::uint64_t seed) {
  if (set.member_count() < 3 || set.nonmember_count() < 3) {
    throw ValidationError(
        "split_three_ways: need at least 3 samples per class to stratify");
  }

  std::vector<std::size_t> member_idx;
  std::vector<std::size_t> nonmember_idx;
  for (std::size_t i = 0; i < set.size(); ++i) {
    (set.label(i) == MembershipLabel::member ? member_idx : nonmember_idx)
        .push_back(i);
  }

  std::array<std::vector<QueryOutput>, 3> outputs;
  std::array<std::vector<MembershipLabel>, 3> labels;

  auto deal = [&](const std::vector<std::size_t>& idx, std::uint64_t stream,
                  MembershipLabel lab) {
    auto order = shuffled_indices(idx.size(), seed, stream);
    std::size_t base = idx.size() / 3;
    std::size_t extra = idx.size() % 3;
    std::size_t pos = 0;
    for (std::size_t part = 0; part < 3; ++part) {
      std::size_t take = base + (part < extra ? 1 : 0);
      for (std::size_t k = 0; k < take; ++k, ++pos) {
        outputs[part].push_back(set.output(idx[order[pos]]));
        labels[part].push_back(lab);
      }
    }
  };
  deal(member_idx, 0, MembershipLabel::member);
  deal(nonmember_idx, 1, MembershipLabel::nonmember);

  return {LabeledQuerySet(std::move(outputs[0]), std::move(labels[0]), set.prior()),
          LabeledQuerySet(std::move(outputs[1]), std::move(labels[1]), set.prior()),
          LabeledQuerySet(std::move(outputs[2]), std::move(labels[2]), set.prior())};
}

}  // namespace mace
