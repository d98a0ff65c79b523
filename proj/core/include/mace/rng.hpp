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

#ifndef MACE_RNG_HPP
#define MACE_RNG_HPP

#include <cstdint>
#include <cstddef>

namespace mace {

// Counter-based pseudo-random stream.  Each draw is a pure function of
// (seed, stream, counter), so any draw can be replayed in isolation and
// results do not depend on evaluation order or thread count.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t bits(std::uint64_t counter) const noexcept;

  // Uniform on [0, 1), 53-bit resolution.
  double uniform(std::uint64_t counter) const noexcept;

  // Uniform on the open interval (0, 1); safe as a quantile-function input.
  double uniform_open(std::uint64_t counter) const noexcept;

  // Standard normal via the inverse CDF applied to uniform_open.
  double normal(std::uint64_t counter) const noexcept;

  // Uniform index in [0, n).  n must be positive.
  std::size_t index_below(std::uint64_t counter, std::size_t n) const noexcept;

 private:
  std::uint64_t base_;
};

// Stateful convenience wrapper that advances an internal counter.
class SequentialRng {
 public:
  explicit SequentialRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : stream_(seed, stream), counter_(0) {}

  std::uint64_t bits() { return stream_.bits(counter_++); }
  double uniform() { return stream_.uniform(counter_++); }
  double uniform_open() { return stream_.uniform_open(counter_++); }
  double normal() { return stream_.normal(counter_++); }
  std::size_t index_below(std::size_t n) {
    return stream_.index_below(counter_++, n);
  }

 private:
  RngStream stream_;
  std::uint64_t counter_;
};

}  // namespace mace

#endif  // MACE_RNG_HPP
