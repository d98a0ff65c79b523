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

// mace: membership-advantage auditing from the command line.
//
// Exit codes: 0 success, 2 invalid configuration, 3 unreadable or
// malformed data, 4 numerical condition failure.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mace/advantage.hpp"
#include "mace/density.hpp"
#include "mace/errors.hpp"
#include "mace/individual.hpp"
#include "mace/io.hpp"
#include "mace/oracle.hpp"
#include "mace/queries.hpp"
#include "mace/sampling.hpp"
#include "mace/types.hpp"
#include "mace/version.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

std::optional<double> parse_bandwidth(const std::string& text) {
  if (text == "auto") return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !(v > 0.0)) {
    throw mace::ValidationError("--bandwidth must be 'auto' or a positive number");
  }
  return v;
}

mace::KernelId parse_kernel(const std::string& text) {
  if (text == "gaussian") return mace::KernelId::gaussian;
  if (text == "epanechnikov") return mace::KernelId::epanechnikov;
  throw mace::ValidationError("--kernel must be gaussian or epanechnikov");
}

mace::DistanceId parse_distance(const std::string& text) {
  if (text == "l2") return mace::DistanceId::l2;
  if (text == "l1") return mace::DistanceId::l1;
  throw mace::ValidationError("--distance must be l2 or l1");
}

std::vector<double> parse_pmf(const std::string& text) {
  std::vector<double> pmf;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string field = text.substr(start, comma - start);
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size()) {
      throw mace::ValidationError("pmf entry '" + field + "' is not a number");
    }
    pmf.push_back(v);
    start = comma + 1;
  }
  return pmf;
}

// Options shared by audit and risk.
struct DataOptions {
  std::string data_path;
  std::size_t n_samples = 0;
  double prior = 0.5;
  double delta = 0.05;
  std::string density = "discrete";
  std::size_t bins = 0;
  std::string bandwidth = "auto";
  std::string kernel = "gaussian";
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

void add_data_options(CLI::App* cmd, DataOptions* opt) {
  cmd->add_option("data", opt->data_path,
                  "Labeled query-output CSV (header m,q1[,q2,...])")
      ->required();
  cmd->add_option("--n", opt->n_samples, "Total audit draws N")->required();
  cmd->add_option("--prior", opt->prior, "Membership prior p, in (0,1)");
  cmd->add_option("--delta", opt->delta, "Confidence failure budget");
  cmd->add_option("--density", opt->density,
                  "Density path: discrete or continuous")
      ->check(CLI::IsMember({"discrete", "continuous"}));
  cmd->add_option("--bins", opt->bins,
                  "Equal-width bins per dimension (discrete path; 0 = raw "
                  "values as cells)");
  cmd->add_option("--bandwidth", opt->bandwidth,
                  "KDE bandwidth: 'auto' or a positive number");
  cmd->add_option("--kernel", opt->kernel, "KDE kernel")
      ->check(CLI::IsMember({"gaussian", "epanechnikov"}));
  cmd->add_option("--seed", opt->seed, "RNG seed");
  cmd->add_option("--threads", opt->threads,
                  "Worker threads (results do not depend on this)");
}

mace::io::AuditConfig base_config(const DataOptions& opt) {
  mace::io::AuditConfig config;
  config.data_path = opt.data_path;
  config.prior_p = opt.prior;
  config.n_samples = opt.n_samples;
  config.confidence_delta = opt.delta;
  config.rng_seed = opt.seed;
  if (opt.density == "continuous") {
    config.density = mace::DensityConfig::continuous(
        parse_bandwidth(opt.bandwidth), parse_kernel(opt.kernel));
  } else if (opt.bins > 0) {
    config.density = mace::DensityConfig::discrete_binned(opt.bins);
  } else {
    config.density = mace::DensityConfig::discrete_native();
  }
  config.threads = opt.threads;
  return config;
}

int run_audit_command(const DataOptions& data, const std::vector<std::string>& metrics,
                      std::size_t mc_samples, std::size_t grid, bool risks,
                      const std::optional<double>& dp_epsilon,
                      const std::string& out) {
  mace::io::AuditConfig config = base_config(data);
  for (const auto& m : metrics) {
    config.metrics.push_back(mace::io::parse_metric_selector(m));
  }
  config.mc_samples = mc_samples;
  config.grid_resolution = grid;
  config.compute_risks = risks;
  config.dp_epsilon = dp_epsilon;

  const mace::io::AuditReport report = mace::io::run_audit(config);
  mace::io::write_report_files(report, out);

  std::cout << "report: " << out << "\n";
  for (const auto& entry : report.estimators) {
    std::cout << entry.label << ": point=" << entry.estimate.point;
    if (entry.estimate.concentration_radius) {
      std::cout << " radius=" << *entry.estimate.concentration_radius;
    }
    if (entry.estimate.learned_threshold) {
      std::cout << " threshold=" << *entry.estimate.learned_threshold;
    }
    std::cout << " n=" << entry.estimate.n_used << "\n";
  }
  if (report.risk_summary) {
    std::cout << "risks: count=" << report.risk_summary->count
              << " uninformative=" << report.risk_summary->uninformative
              << " mean=" << report.risk_summary->mean
              << " max=" << report.risk_summary->max << "\n";
  }
  if (report.dp) {
    std::cout << "dp bound: " << report.dp->bound.bound << "\n";
  }
  for (const auto& w : report.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  return 0;
}

int run_risk_command(const DataOptions& data, const std::string& metric,
                     double delta, const std::string& out) {
  mace::io::AuditConfig config = base_config(data);
  config.validate();

  std::optional<mace::GeneralizedMetric> generalized;
  if (!metric.empty()) {
    generalized =
        mace::io::parse_metric_selector(metric).resolve(config.prior_p);
  }

  const mace::io::QueryPools pools =
      mace::io::ingest_query_csv(config.data_path);
  const mace::ExperimentConfig experiment{config.prior_p, config.n_samples,
                                          config.confidence_delta,
                                          config.rng_seed};
  const mace::LabeledQuerySet set =
      mace::build_labeled_set(pools.members, pools.nonmembers, experiment);

  std::unique_ptr<mace::Density> member_density;
  std::unique_ptr<mace::Density> nonmember_density;
  const auto members = set.member_outputs();
  const auto nonmembers = set.nonmember_outputs();
  if (config.density.kind == mace::DensityConfig::Kind::discrete) {
    std::optional<mace::BinningScheme> scheme;
    if (config.density.bins) {
      scheme = mace::BinningScheme::fit(set.outputs(), *config.density.bins);
    }
    member_density = std::make_unique<mace::DiscreteDensity>(
        mace::fit_discrete(members, scheme));
    nonmember_density = std::make_unique<mace::DiscreteDensity>(
        mace::fit_discrete(nonmembers, scheme));
  } else {
    member_density = std::make_unique<mace::KdeDensity>(mace::fit_kde(
        members, config.density.bandwidth, config.density.kernel));
    nonmember_density = std::make_unique<mace::KdeDensity>(mace::fit_kde(
        nonmembers, config.density.bandwidth, config.density.kernel));
  }

  mace::BatchRiskResult batch = mace::individual_risk_batch(
      set.outputs(), *member_density, *nonmember_density, config.prior_p,
      generalized, delta, config.threads);

  mace::io::AuditReport table;
  table.dimension = set.dimension();
  table.risks = std::move(batch.estimates);
  table.risk_points = set.outputs();
  table.risk_labels = set.labels();
  mace::io::write_file_atomic(out, mace::io::render_risk_csv(table));

  std::size_t uninformative = 0;
  double mean = 0.0;
  double max = 0.0;
  for (const auto& est : table.risks) {
    if (est.uninformative) ++uninformative;
    mean += est.point;
    max = std::max(max, est.point);
  }
  mean /= static_cast<double>(table.risks.size());
  std::cout << "risks: " << out << "\n"
            << "count=" << table.risks.size()
            << " uninformative=" << uninformative << " mean=" << mean
            << " max=" << max << "\n";
  for (const auto& w : batch.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int run_dp_bound_command(double epsilon, double prior,
                         const std::string& out) {
  const mace::DpBound bound = mace::dp_bound(epsilon, prior);
  ordered_json j;
  j["epsilon"] = bound.epsilon;
  j["prior_p"] = bound.prior_p;
  j["lambda"] = bound.lambda;
  j["bound"] = bound.bound;
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    mace::io::write_file_atomic(out, text);
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int run_query_command(const std::string& mode, const std::string& members_path,
                      const std::string& nonmembers_path,
                      const std::string& synthetic_path,
                      const std::string& distance_name, double epsilon_ball,
                      const std::string& out) {
  const mace::DistanceId metric = parse_distance(distance_name);
  if (mode == "ball" && !(epsilon_ball > 0.0)) {
    throw mace::ValidationError("--epsilon-ball must be positive");
  }

  const mace::SyntheticDataset synthetic(
      mace::io::ingest_vectors(synthetic_path));
  const auto member_vectors = mace::io::ingest_vectors(members_path);
  const auto nonmember_vectors = mace::io::ingest_vectors(nonmembers_path);

  std::optional<mace::NnIndex> index;
  if (mode == "nn") index.emplace(synthetic, metric);

  auto evaluate = [&](const std::vector<std::vector<double>>& vectors) {
    std::vector<mace::QueryOutput> outputs;
    outputs.reserve(vectors.size());
    for (const auto& v : vectors) {
      if (v.size() != synthetic.dimension()) {
        throw mace::DataError("sample dimension " + std::to_string(v.size()) +
                              " does not match synthetic dimension " +
                              std::to_string(synthetic.dimension()));
      }
      if (mode == "nn") {
        outputs.push_back({index->nearest_distance(v)});
      } else {
        outputs.push_back(
            mace::epsilon_ball_query(v, synthetic, metric, epsilon_ball));
      }
    }
    return outputs;
  };

  const auto member_queries = evaluate(member_vectors);
  const auto nonmember_queries = evaluate(nonmember_vectors);
  mace::io::write_query_csv(out, member_queries, nonmember_queries);
  std::cout << "queries: " << out << " (" << member_queries.size()
            << " members, " << nonmember_queries.size() << " non-members)\n";
  return 0;
}

int run_simulate_command(const std::string& kind, const std::string& member_pmf,
                         const std::string& nonmember_pmf, double mu1,
                         double mu2, double sigma, double prior, std::size_t n,
                         std::uint64_t seed, const std::string& out) {
  if (!(prior > 0.0) || !(prior < 1.0)) {
    throw mace::ValidationError("--prior must lie strictly inside (0,1)");
  }
  if (n < 2) {
    throw mace::ValidationError("--n must be at least 2");
  }
  const auto n1 = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * prior + 0.5));
  if (n1 == 0 || n1 >= n) {
    throw mace::ValidationError("prior and n leave one class empty");
  }
  const std::size_t n2 = n - n1;
  const std::uint64_t nonmember_seed = seed ^ 0x517cc1b727220a95ULL;

  std::vector<mace::QueryOutput> members;
  std::vector<mace::QueryOutput> nonmembers;
  ordered_json truth;
  if (kind == "categorical") {
    mace::FiniteToyDistribution toy{parse_pmf(member_pmf),
                                    parse_pmf(nonmember_pmf), prior};
    toy.validate();
    members = mace::sample_categorical(toy.member_pmf, n1, seed);
    nonmembers =
        mace::sample_categorical(toy.nonmember_pmf, n2, nonmember_seed);
    truth["advantage"] = mace::exact_advantage(toy);
    ordered_json risks = ordered_json::array();
    for (std::size_t j = 0; j < toy.member_pmf.size(); ++j) {
      risks.push_back(mace::exact_individual_risk(toy, j));
    }
    truth["per_outcome_risk"] = std::move(risks);
  } else {
    if (!(sigma > 0.0)) {
      throw mace::ValidationError("--sigma must be positive");
    }
    members = mace::sample_normal(mu1, sigma, n1, seed);
    nonmembers = mace::sample_normal(mu2, sigma, n2, nonmember_seed);
    if (prior == 0.5) {
      truth["advantage"] = mace::continuous_truth_tv(mu1, mu2, sigma);
    } else {
      truth["advantage"] = nullptr;  // closed form covers equal priors only
    }
  }
  truth["n_members"] = n1;
  truth["n_nonmembers"] = n2;

  mace::io::write_query_csv(out, members, nonmembers);
  std::cout << truth.dump(2) << "\n";
  std::cerr << "data: " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Membership-advantage auditing over model query outputs"};
  app.set_version_flag("--version", std::string(mace::kVersion));
  app.require_subcommand(1);

  // audit
  auto* audit = app.add_subcommand(
      "audit", "Full pipeline: sample, estimate, report");
  DataOptions audit_data;
  add_data_options(audit, &audit_data);
  std::vector<std::string> audit_metrics;
  std::size_t audit_mc = 0;
  std::size_t audit_grid = 512;
  bool audit_risks = false;
  double audit_dp_epsilon = -1.0;
  std::string audit_out;
  audit->add_option("--metric", audit_metrics,
                    "Extra generalized metric, e.g. ACC, PPV, TPR, TNR, AM, "
                    "WA(w1,w2,w3,w4); repeatable");
  audit->add_option("--mc-samples", audit_mc,
                    "Monte Carlo draws for the continuous path (0 = auto)");
  audit->add_option("--grid", audit_grid, "Threshold-search grid resolution");
  audit->add_flag("--risks", audit_risks, "Also compute per-sample risks");
  auto* dp_opt = audit->add_option("--dp-epsilon", audit_dp_epsilon,
                                   "Compare against the epsilon-DP bound");
  audit->add_option("--out", audit_out, "Report path (.json)")->required();

  // risk
  auto* risk = app.add_subcommand("risk", "Per-sample risk table only");
  DataOptions risk_data;
  add_data_options(risk, &risk_data);
  std::string risk_metric;
  std::string risk_out;
  risk->add_option("--metric", risk_metric,
                   "Conditional metric instead of the accuracy risk");
  risk->add_option("--out", risk_out, "Risk CSV path")->required();

  // dp-bound
  auto* dp = app.add_subcommand("dp-bound",
                                "Advantage ceiling implied by epsilon-DP");
  double dp_epsilon = 0.0;
  double dp_prior = 0.5;
  std::string dp_out;
  dp->add_option("--epsilon", dp_epsilon, "DP epsilon")->required();
  dp->add_option("--prior", dp_prior, "Membership prior p");
  dp->add_option("--out", dp_out, "Write JSON here instead of stdout");

  // query nn | ball
  auto* query = app.add_subcommand(
      "query", "Build query outputs from raw vectors and a synthetic set");
  query->require_subcommand(1);
  std::string q_members, q_nonmembers, q_synthetic, q_distance = "l2", q_out;
  double q_epsilon = 0.0;
  auto add_query_options = [&](CLI::App* sub) {
    sub->add_option("--members", q_members, "Member vector file")->required();
    sub->add_option("--nonmembers", q_nonmembers, "Non-member vector file")
        ->required();
    sub->add_option("--synthetic", q_synthetic, "Synthetic vector file")
        ->required();
    sub->add_option("--distance", q_distance, "Distance: l2 or l1")
        ->check(CLI::IsMember({"l2", "l1"}));
    sub->add_option("--out", q_out, "Query CSV path")->required();
  };
  auto* query_nn =
      query->add_subcommand("nn", "Nearest synthetic-record distance");
  add_query_options(query_nn);
  auto* query_ball = query->add_subcommand(
      "ball", "Log-distance mass inside an epsilon ball");
  add_query_options(query_ball);
  query_ball->add_option("--epsilon-ball", q_epsilon, "Ball radius")
      ->required();

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "Sample a toy world with known ground truth");
  simulate->require_subcommand(1);
  std::string sim_member_pmf = "0.9,0.1", sim_nonmember_pmf = "0.1,0.9";
  double sim_mu1 = 0.0, sim_mu2 = 1.0, sim_sigma = 1.0, sim_prior = 0.5;
  std::size_t sim_n = 0;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  auto add_sim_common = [&](CLI::App* sub) {
    sub->add_option("--prior", sim_prior, "Membership prior p");
    sub->add_option("--n", sim_n, "Total rows to sample")->required();
    sub->add_option("--seed", sim_seed, "RNG seed");
    sub->add_option("--out", sim_out, "Query CSV path")->required();
  };
  auto* sim_cat = simulate->add_subcommand(
      "categorical", "Finite outcome space with known pmfs");
  sim_cat->add_option("--member-pmf", sim_member_pmf,
                      "Member pmf, comma-separated");
  sim_cat->add_option("--nonmember-pmf", sim_nonmember_pmf,
                      "Non-member pmf, comma-separated");
  add_sim_common(sim_cat);
  auto* sim_norm = simulate->add_subcommand(
      "normal", "Two unit-weight normal populations");
  sim_norm->add_option("--mu1", sim_mu1, "Member mean");
  sim_norm->add_option("--mu2", sim_mu2, "Non-member mean");
  sim_norm->add_option("--sigma", sim_sigma, "Common standard deviation");
  add_sim_common(sim_norm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(audit)) {
      std::optional<double> eps;
      if (dp_opt->count() > 0) eps = audit_dp_epsilon;
      return run_audit_command(audit_data, audit_metrics, audit_mc, audit_grid,
                               audit_risks, eps, audit_out);
    }
    if (app.got_subcommand(risk)) {
      return run_risk_command(risk_data, risk_metric, risk_data.delta,
                              risk_out);
    }
    if (app.got_subcommand(dp)) {
      return run_dp_bound_command(dp_epsilon, dp_prior, dp_out);
    }
    if (app.got_subcommand(query)) {
      const std::string mode = query->got_subcommand(query_nn) ? "nn" : "ball";
      return run_query_command(mode, q_members, q_nonmembers, q_synthetic,
                               q_distance, q_epsilon, q_out);
    }
    if (app.got_subcommand(simulate)) {
      const std::string kind =
          simulate->got_subcommand(sim_cat) ? "categorical" : "normal";
      return run_simulate_command(kind, sim_member_pmf, sim_nonmember_pmf,
                                  sim_mu1, sim_mu2, sim_sigma, sim_prior,
                                  sim_n, sim_seed, sim_out);
    }
  } catch (const mace::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mace::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const mace::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
