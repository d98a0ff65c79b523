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

#ifndef MACE_TYPES_HPP
#define MACE_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mace {

// One attack-query evaluation: a fixed-length real vector.  Dimension is
// constant within any one labeled set.
using QueryOutput = std::vector<double>;

enum class MembershipLabel : int {
  nonmember = -1,
  member = 1,
};

// Two-sided interval attached to a point estimate.  level is the nominal
// coverage probability (e.g. 0.95), not the tail mass.
struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;

  bool contains(double v) const { return lower <= v && v <= upper; }
};

// Audit-wide knobs shared by the sampling and estimation stages.
struct ExperimentConfig {
  double prior_p = 0.5;          // membership prior, strictly inside (0, 1)
  std::size_t n_samples = 0;     // total draws N
  double confidence_delta = 0.05;  // failure budget for reported intervals
  std::uint64_t rng_seed = 0;

  void validate() const;  // throws ValidationError
};

// Query outputs paired with ground-truth membership labels and the prior
// they were drawn under.  Construction validates that every entry is
// finite, dimensions agree, and both classes are represented.
class LabeledQuerySet {
 public:
  LabeledQuerySet(std::vector<QueryOutput> outputs,
                  std::vector<MembershipLabel> labels, double prior_p);

  std::size_t size() const { return outputs_.size(); }
  std::size_t dimension() const { return dimension_; }
  double prior() const { return prior_p_; }
  std::size_t member_count() const { return member_count_; }
  std::size_t nonmember_count() const { return outputs_.size() - member_count_; }

  const QueryOutput& output(std::size_t i) const { return outputs_[i]; }
  MembershipLabel label(std::size_t i) const { return labels_[i]; }
  const std::vector<QueryOutput>& outputs() const { return outputs_; }
  const std::vector<MembershipLabel>& labels() const { return labels_; }

  std::vector<QueryOutput> member_outputs() const;
  std::vector<QueryOutput> nonmember_outputs() const;

 private:
  std::vector<QueryOutput> outputs_;
  std::vector<MembershipLabel> labels_;
  double prior_p_;
  std::size_t dimension_;
  std::size_t member_count_;
};

}  // namespace mace

#endif  // MACE_TYPES_HPP
