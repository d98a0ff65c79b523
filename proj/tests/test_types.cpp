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

#include <limits>

#include "doctest.h"
#include "mace/errors.hpp"
#include "mace/types.hpp"

using namespace mace;

namespace {

LabeledQuerySet two_class_set() {
  return LabeledQuerySet({{0.0}, {1.0}, {2.0}},
                         {MembershipLabel::member, MembershipLabel::nonmember,
                          MembershipLabel::member},
                         0.5);
}

}  // namespace

TEST_CASE("experiment config validation") {
  ExperimentConfig ok{0.5, 100, 0.05, 1};
  CHECK_NOTHROW(ok.validate());
  CHECK_THROWS_AS((ExperimentConfig{0.0, 100, 0.05, 1}.validate()),
                  ValidationError);
  CHECK_THROWS_AS((ExperimentConfig{1.2, 100, 0.05, 1}.validate()),
                  ValidationError);
  CHECK_THROWS_AS((ExperimentConfig{0.5, 0, 0.05, 1}.validate()),
                  ValidationError);
  CHECK_THROWS_AS((ExperimentConfig{0.5, 100, 1.0, 1}.validate()),
                  ValidationError);
}

TEST_CASE("labeled set accessors") {
  const LabeledQuerySet set = two_class_set();
  CHECK(set.size() == 3);
  CHECK(set.dimension() == 1);
  CHECK(set.prior() == 0.5);
  CHECK(set.member_count() == 2);
  CHECK(set.nonmember_count() == 1);
  CHECK(set.output(1)[0] == 1.0);
  CHECK(set.label(1) == MembershipLabel::nonmember);
  CHECK(set.member_outputs().size() == 2);
  CHECK(set.nonmember_outputs().size() == 1);
  CHECK(set.nonmember_outputs()[0][0] == 1.0);
}

TEST_CASE("labeled set construction rejects bad input") {
  using L = MembershipLabel;
  CHECK_THROWS_AS(LabeledQuerySet({}, {}, 0.5), ValidationError);
  CHECK_THROWS_AS(LabeledQuerySet({{1.0}}, {L::member, L::nonmember}, 0.5),
                  ValidationError);
  CHECK_THROWS_AS(LabeledQuerySet({{1.0}, {2.0}}, {L::member, L::member}, 0.5),
                  ValidationError);  // one class only
  CHECK_THROWS_AS(
      LabeledQuerySet({{1.0}, {2.0}}, {L::member, L::nonmember}, 1.5),
      ValidationError);
  CHECK_THROWS_AS(
      LabeledQuerySet({{1.0}, {2.0, 3.0}}, {L::member, L::nonmember}, 0.5),
      DataError);  // ragged dimensions
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(
      LabeledQuerySet({{1.0}, {nan}}, {L::member, L::nonmember}, 0.5),
      DataError);
  CHECK_THROWS_AS(LabeledQuerySet({{}, {}}, {L::member, L::nonmember}, 0.5),
                  ValidationError);  // zero-dimensional
}

TEST_CASE("confidence interval containment") {
  const ConfidenceInterval ci{0.2, 0.8, 0.95};
  CHECK(ci.contains(0.2));
  CHECK(ci.contains(0.5));
  CHECK(ci.contains(0.8));
  CHECK_FALSE(ci.contains(0.19));
  CHECK_FALSE(ci.contains(0.81));
}

TEST_CASE("error kinds are distinguishable") {
  try {
    throw NumericError("x");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numeric);
  }
  try {
    throw DataError("x");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
  }
  CHECK_THROWS_AS(throw ValidationError("x"), std::runtime_error);
}
