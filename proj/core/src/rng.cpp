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

#include "mace/rng.hpp"

#include "mace/special_functions.hpp"

namespace mace {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// 64-bit finalizer with full avalanche (the splitmix64 output function).
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : base_(mix64(seed + kGolden) ^ mix64(stream * kGolden + 0x6a09e667f3bcc909ULL)) {}

std::uint64_t RngStream::bits(std::uint64_t counter) const noexcept {
  return mix64(base_ + (counter + 1) * kGolden);
}

double RngStream::uniform(std::uint64_t counter) const noexcept {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open(std::uint64_t counter) const noexcept {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal(std::uint64_t counter) const noexcept {
  return normal_quantile(uniform_open(counter));
}

std::size_t RngStream::index_below(std::uint64_t counter,
                                   std::size_t n) const noexcept {
  // Multiply mapping; bias is < 2^-53 per draw, immaterial here.  The clamp
  // guards against round-up at uniform values just below 1.
  auto idx = static_cast<std::size_t>(uniform(counter) * static_cast<double>(n));
  return idx < n ? idx : n - 1;
}

}  // namespace mace
