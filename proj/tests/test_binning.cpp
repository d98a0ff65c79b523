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

#include <vector>

#include "doctest.h"
#include "mace/binning.hpp"
#include "mace/errors.hpp"

using namespace mace;

TEST_CASE("cells tile the range evenly") {
  const BinningScheme scheme({0.0}, {10.0}, 5);
  CHECK(scheme.cell_of({0.0}) == CellIndex{0});
  CHECK(scheme.cell_of({1.9}) == CellIndex{0});
  CHECK(scheme.cell_of({2.0}) == CellIndex{1});
  CHECK(scheme.cell_of({9.99}) == CellIndex{4});
  // The top edge belongs to the last bin.
  CHECK(scheme.cell_of({10.0}) == CellIndex{4});
}

TEST_CASE("out-of-range points clamp to the edge bins") {
  const BinningScheme scheme({0.0}, {1.0}, 4);
  CHECK(scheme.cell_of({-100.0}) == CellIndex{0});
  CHECK(scheme.cell_of({100.0}) == CellIndex{3});
}

TEST_CASE("multidimensional cells combine per-axis indices") {
  const BinningScheme scheme({0.0, -1.0}, {1.0, 1.0}, 2);
  CHECK(scheme.dimension() == 2);
  CHECK(scheme.cell_of({0.25, -0.5}) == CellIndex{0, 0});
  CHECK(scheme.cell_of({0.75, 0.5}) == CellIndex{1, 1});
}

TEST_CASE("fit covers the observed range") {
  const std::vector<QueryOutput> pooled = {{1.0}, {3.0}, {2.0}, {5.0}};
  const BinningScheme scheme = BinningScheme::fit(pooled, 4);
  CHECK(scheme.lower()[0] == 1.0);
  CHECK(scheme.upper()[0] == 5.0);
  CHECK(scheme.bins_per_dim() == 4);
  CHECK(scheme.cell_of({1.0}) == CellIndex{0});
  CHECK(scheme.cell_of({5.0}) == CellIndex{3});
}

TEST_CASE("a constant dimension gets a unit-width box") {
  const std::vector<QueryOutput> pooled = {{7.0}, {7.0}, {7.0}};
  const BinningScheme scheme = BinningScheme::fit(pooled, 10);
  CHECK(scheme.lower()[0] == doctest::Approx(6.5));
  CHECK(scheme.upper()[0] == doctest::Approx(7.5));
  CHECK(scheme.cell_of({7.0})[0] >= 0);
}

TEST_CASE("schemes compare by value") {
  const BinningScheme a({0.0}, {1.0}, 10);
  const BinningScheme b({0.0}, {1.0}, 10);
  const BinningScheme c({0.0}, {1.0}, 11);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("discretize maps every output") {
  const std::vector<QueryOutput> outputs = {{0.1}, {0.9}, {0.5}};
  const BinningScheme scheme({0.0}, {1.0}, 2);
  const auto cells = discretize(outputs, scheme);
  REQUIRE(cells.size() == 3);
  CHECK(cells[0] == CellIndex{0});
  CHECK(cells[1] == CellIndex{1});
  CHECK(cells[2] == CellIndex{1});
}

TEST_CASE("invalid construction is rejected") {
  CHECK_THROWS_AS(BinningScheme({0.0}, {0.0}, 5), ValidationError);
  CHECK_THROWS_AS(BinningScheme({1.0}, {0.0}, 5), ValidationError);
  CHECK_THROWS_AS(BinningScheme({0.0}, {1.0}, 0), ValidationError);
  CHECK_THROWS_AS(BinningScheme::fit({}, 5), ValidationError);
  const BinningScheme scheme({0.0}, {1.0}, 2);
  CHECK_THROWS_AS(scheme.cell_of({0.5, 0.5}), DataError);
}
