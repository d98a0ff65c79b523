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

#ifndef MACE_IO_HPP
#define MACE_IO_HPP

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mace/advantage.hpp"
#include "mace/individual.hpp"
#include "mace/types.hpp"

namespace mace::io {

struct QueryPools {
  std::vector<QueryOutput> members;
  std::vector<QueryOutput> nonmembers;
  std::size_t dimension = 0;
};

// Labeled query-output table.  Header `m,q1[,q2,...]`; the m column
// holds +1 / -1 membership labels, the q columns finite reals.
QueryPools ingest_query_csv(const std::filesystem::path& path);

// Plain vector table: either CSV rows of reals (an optional single
// header line is skipped) or the binary layout `MACEVEC1` magic,
// uint32 count, uint32 dim, then count*dim little-endian float64.
// Files named *.vec or *.bin must be binary.
std::vector<std::vector<double>> ingest_vectors(const std::filesystem::path& path);

void write_vectors_binary(const std::filesystem::path& path,
                          std::span<const std::vector<double>> records);

void write_query_csv(const std::filesystem::path& path,
                     std::span<const QueryOutput> members,
                     std::span<const QueryOutput> nonmembers);

// Whole-file atomic write: temp file in the target directory, then
// rename over the destination.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

// Metric request as it appears on the command line, e.g. "ACC" or
// "WA(2,1,1,1)"; resolved against the prior at run time.
struct MetricSelector {
  std::string name;
  std::array<double, 4> wa_weights = {1.0, 1.0, 1.0, 1.0};

  GeneralizedMetric resolve(double prior_p) const;
};

MetricSelector parse_metric_selector(const std::string& text);

struct AuditConfig {
  std::filesystem::path data_path;
  double prior_p = 0.5;
  std::size_t n_samples = 0;
  double confidence_delta = 0.05;
  std::uint64_t rng_seed = 0;
  DensityConfig density = DensityConfig::discrete_native();
  std::vector<MetricSelector> metrics;   // extra generalized-metric runs
  std::size_t mc_samples = 0;            // 0 = automatic
  std::size_t grid_resolution = 512;
  bool compute_risks = false;
  std::optional<double> dp_epsilon;
  unsigned threads = 1;                  // execution detail; not echoed

  void validate() const;
};

struct EstimatorEntry {
  std::string label;
  AdvantageEstimate estimate;
};

struct RiskSummary {
  std::size_t count = 0;
  std::size_t uninformative = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double ci_level = 0.0;
};

struct DpFinding {
  std::string label;
  double observed_advantage = 0.0;
  bool exceeds = false;
};

struct DpSection {
  DpBound bound;
  std::vector<DpFinding> findings;
  std::optional<double> max_risk_point;
  bool max_risk_exceeds = false;
};

struct AuditReport {
  std::string schema;
  AuditConfig config;
  std::size_t member_pool_rows = 0;
  std::size_t nonmember_pool_rows = 0;
  std::size_t dimension = 0;
  std::size_t n_members_sampled = 0;
  std::size_t n_nonmembers_sampled = 0;
  std::vector<EstimatorEntry> estimators;
  std::optional<RiskSummary> risk_summary;
  std::vector<IndividualRiskEstimate> risks;  // per-point rows (CSV only)
  std::vector<QueryOutput> risk_points;
  std::vector<MembershipLabel> risk_labels;
  std::optional<DpSection> dp;
  std::vector<std::string> warnings;
  std::string generated_at;                              // ISO 8601 UTC
  std::vector<std::pair<std::string, double>> runtimes;  // stage, seconds
};

// Full pipeline: ingest, sample the labeled set, run every configured
// estimator, optional risks and DP comparison.  Pure with respect to
// the filesystem except for reading config.data_path.
AuditReport run_audit(const AuditConfig& config);

// Deterministic JSON rendering.  All wall-clock data (timestamp and
// stage runtimes) lives under the single "timing" key so downstream
// equality checks can drop exactly that key.
std::string render_report_json(const AuditReport& report);

// Plot-ready companion tables.
std::string render_estimator_csv(const AuditReport& report);
std::string render_risk_csv(const AuditReport& report);

// Writes the JSON report to out_path, the estimator table next to it
// (extension .csv), and when risks were computed the per-point table
// (suffix _risks.csv).  Every file is written atomically.
void write_report_files(const AuditReport& report,
                        const std::filesystem::path& out_path);

}  // namespace mace::io

#endif  // MACE_IO_HPP
