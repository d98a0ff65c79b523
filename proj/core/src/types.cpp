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

#include "mace/types.hpp"

#include <cmath>
#include <utility>

#include "mace/errors.hpp"

namespace mace {

void ExperimentConfig::validate() const {
  if (!(prior_p > 0.0) || !(prior_p < 1.0)) {
    throw ValidationError("prior_p must lie strictly inside (0, 1)");
  }
  if (n_samples == 0) {
    throw ValidationError("n_samples must be positive");
  }
  if (!(confidence_delta > 0.0) || !(confidence_delta < 1.0)) {
    throw ValidationError("confidence_delta must lie strictly inside (0, 1)");
  }
}

LabeledQuerySet::LabeledQuerySet(std::vector<QueryOutput> outputs,
                                 std::vector<MembershipLabel> labels,
                                 double prior_p)
    : outputs_(std::move(outputs)),
      labels_(std::move(labels)),
      prior_p_(prior_p) {
  if (!(prior_p_ > 0.0) || !(prior_p_ < 1.0)) {
    throw ValidationError("LabeledQuerySet: prior must lie strictly inside (0, 1)");
  }
  if (outputs_.size() != labels_.size()) {
    throw ValidationError("LabeledQuerySet: outputs and labels differ in length");
  }
  if (outputs_.empty()) {
    throw ValidationError("LabeledQuerySet: empty set");
  }
  dimension_ = outputs_.front().size();
  if (dimension_ == 0) {
    throw ValidationError("LabeledQuerySet: zero-dimensional outputs");
  }
  member_count_ = 0;
  for (std::size_t i = 0; i < outputs_.size(); ++i) {
    if (outputs_[i].size() != dimension_) {
      throw DataError("LabeledQuerySet: inconsistent output dimension");
    }
    for (double v : outputs_[i]) {
      if (!std::isfinite(v)) {
        throw DataError("LabeledQuerySet: non-finite query output value");
      }
    }
    if (labels_[i] == MembershipLabel::member) {
      ++member_count_;
    }
  }
  if (member_count_ == 0 || member_count_ == outputs_.size()) {
    throw ValidationError("LabeledQuerySet: both membership classes must be present");
  }
}

std::vector<QueryOutput> LabeledQuerySet::member_outputs() const {
  std::vector<QueryOutput> out;
  out.reserve(member_count_);
  for (std::size_t i = 0; i < outputs_.size(); ++i) {
    if (labels_[i] == MembershipLabel::member) out.push_back(outputs_[i]);
  }
  return out;
}

std::vector<QueryOutput> LabeledQuerySet::nonmember_outputs() const {
  std::vector<QueryOutput> out;
  out.reserve(nonmember_count());
  for (std::size_t i = 0; i < outputs_.size(); ++i) {
    if (labels_[i] == MembershipLabel::nonmember) out.push_back(outputs_[i]);
  }
  return out;
}

}  // namespace mace
