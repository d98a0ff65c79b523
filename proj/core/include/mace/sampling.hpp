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

#ifndef MACE_SAMPLING_HPP
#define MACE_SAMPLING_HPP

#include <array>
#include <span>

#include "mace/types.hpp"

namespace mace {

// Samples a labeled set for the auditing game: N1 = round(N * p), half
// away from zero, members drawn uniformly with replacement from the
// member pool and N - N1 non-members likewise.  Draw order is a pure
// function of cfg.rng_seed.  Throws if either class would be empty.
LabeledQuerySet build_labeled_set(std::span<const QueryOutput> member_pool,
                                  std::span<const QueryOutput> nonmember_pool,
                                  const ExperimentConfig& cfg);

// Stratified 3-way split: each class is shuffled under `seed` and dealt
// into three blocks whose per-class sizes differ by at most one.  Every
// sample lands in exactly one partition.  Requires at least 3 members
// and 3 non-members so each partition keeps both classes.
std::array<LabeledQuerySet, 3> split_three_ways(const LabeledQuerySet& set,
                                                std::uint64_t seed);

}  // namespace mace

#endif  // MACE_SAMPLING_HPP
