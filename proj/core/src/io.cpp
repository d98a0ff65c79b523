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

#include "mace/io.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "json.hpp"

#include "mace/errors.hpp"
#include "mace/sampling.hpp"
#include "mace/version.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary vector files assume a little-endian host");

namespace mace::io {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view token, const char* context) {
  if (token.empty()) {
    throw DataError(std::string(context) + ": empty numeric field");
  }
  std::string buf(token);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) {
    throw DataError(std::string(context) + ": malformed number '" + buf + "'");
  }
  if (!std::isfinite(v)) {
    throw DataError(std::string(context) + ": non-finite value '" + buf + "'");
  }
  return v;
}

// Iterates non-empty lines; keeps positions cheap for big files.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::optional<std::string_view> next() {
    while (pos_ < text_.size()) {
      std::size_t eol = text_.find('\n', pos_);
      if (eol == std::string_view::npos) eol = text_.size();
      std::string_view line = text_.substr(pos_, eol - pos_);
      pos_ = eol + 1;
      if (!trim(line).empty()) return line;
    }
    return std::nullopt;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

QueryPools ingest_query_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  LineReader lines(text);
  const auto header = lines.next();
  if (!header) {
    throw DataError("query csv '" + path.string() + "' is empty");
  }
  const auto columns = split_csv_line(*header);
  if (columns.size() < 2 || columns[0] != "m") {
    throw DataError("query csv '" + path.string() +
                    "': header must be m,q1[,q2,...]");
  }
  for (std::size_t k = 1; k < columns.size(); ++k) {
    if (columns[k] != "q" + std::to_string(k)) {
      throw DataError("query csv '" + path.string() +
                      "': header must be m,q1[,q2,...]");
    }
  }
  const std::size_t d = columns.size() - 1;

  QueryPools pools;
  pools.dimension = d;
  std::size_t row = 1;
  while (auto line = lines.next()) {
    ++row;
    const auto fields = split_csv_line(*line);
    if (fields.size() != d + 1) {
      throw DataError("query csv '" + path.string() + "' row " +
                      std::to_string(row) + ": expected " +
                      std::to_string(d + 1) + " fields, got " +
                      std::to_string(fields.size()));
    }
    const std::string_view label = fields[0];
    bool member;
    if (label == "1" || label == "+1") {
      member = true;
    } else if (label == "-1") {
      member = false;
    } else {
      throw DataError("query csv '" + path.string() + "' row " +
                      std::to_string(row) +
                      ": membership label must be +1 or -1");
    }
    QueryOutput output(d);
    for (std::size_t k = 0; k < d; ++k) {
      output[k] = parse_double(fields[k + 1], "query csv");
    }
    (member ? pools.members : pools.nonmembers).push_back(std::move(output));
  }
  if (pools.members.empty() || pools.nonmembers.empty()) {
    throw DataError("query csv '" + path.string() +
                    "' must contain rows for both membership labels");
  }
  return pools;
}

namespace {

constexpr char kVectorMagic[8] = {'M', 'A', 'C', 'E', 'V', 'E', 'C', '1'};

std::vector<std::vector<double>> parse_vector_binary(
    const std::string& bytes, const std::filesystem::path& path) {
  if (bytes.size() < 16 ||
      std::memcmp(bytes.data(), kVectorMagic, 8) != 0) {
    throw DataError("vector file '" + path.string() +
                    "': bad or missing MACEVEC1 magic");
  }
  std::uint32_t count = 0;
  std::uint32_t dim = 0;
  std::memcpy(&count, bytes.data() + 8, 4);
  std::memcpy(&dim, bytes.data() + 12, 4);
  if (count == 0 || dim == 0) {
    throw DataError("vector file '" + path.string() +
                    "': zero record count or dimension");
  }
  const std::size_t need =
      16 + static_cast<std::size_t>(count) * dim * sizeof(double);
  if (bytes.size() != need) {
    throw DataError("vector file '" + path.string() + "': expected " +
                    std::to_string(need) + " bytes, found " +
                    std::to_string(bytes.size()));
  }
  std::vector<std::vector<double>> records(count, std::vector<double>(dim));
  const char* cursor = bytes.data() + 16;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::memcpy(records[i].data(), cursor, dim * sizeof(double));
    cursor += dim * sizeof(double);
    for (double v : records[i]) {
      if (!std::isfinite(v)) {
        throw DataError("vector file '" + path.string() +
                        "': non-finite value");
      }
    }
  }
  return records;
}

std::vector<std::vector<double>> parse_vector_csv(
    const std::string& text, const std::filesystem::path& path) {
  LineReader lines(text);
  std::vector<std::vector<double>> records;
  std::size_t d = 0;
  bool first = true;
  while (auto line = lines.next()) {
    const auto fields = split_csv_line(*line);
    std::vector<double> rec;
    rec.reserve(fields.size());
    bool ok = true;
    for (const auto& f : fields) {
      try {
        rec.push_back(parse_double(f, "vector csv"));
      } catch (const DataError&) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      if (first) {
        first = false;
        continue;  // tolerated header line
      }
      throw DataError("vector file '" + path.string() +
                      "': malformed numeric row");
    }
    first = false;
    if (records.empty()) {
      d = rec.size();
      if (d == 0) {
        throw DataError("vector file '" + path.string() + "': empty row");
      }
    } else if (rec.size() != d) {
      throw DataError("vector file '" + path.string() +
                      "': inconsistent row widths");
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) {
    throw DataError("vector file '" + path.string() + "': no records");
  }
  return records;
}

}  // namespace

std::vector<std::vector<double>> ingest_vectors(
    const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  const std::string ext = path.extension().string();
  const bool binary_required = ext == ".vec" || ext == ".bin";
  const bool has_magic =
      bytes.size() >= 8 && std::memcmp(bytes.data(), kVectorMagic, 8) == 0;
  if (binary_required || has_magic) {
    return parse_vector_binary(bytes, path);
  }
  return parse_vector_csv(bytes, path);
}

void write_vectors_binary(const std::filesystem::path& path,
                          std::span<const std::vector<double>> records) {
  if (records.empty()) {
    throw ValidationError("write_vectors_binary: no records");
  }
  const auto count = static_cast<std::uint32_t>(records.size());
  const auto dim = static_cast<std::uint32_t>(records.front().size());
  if (dim == 0) {
    throw ValidationError("write_vectors_binary: zero-dimensional records");
  }
  std::string bytes;
  bytes.reserve(16 + static_cast<std::size_t>(count) * dim * sizeof(double));
  bytes.append(kVectorMagic, 8);
  bytes.append(reinterpret_cast<const char*>(&count), 4);
  bytes.append(reinterpret_cast<const char*>(&dim), 4);
  for (const auto& rec : records) {
    if (rec.size() != dim) {
      throw ValidationError("write_vectors_binary: inconsistent record widths");
    }
    bytes.append(reinterpret_cast<const char*>(rec.data()),
                 dim * sizeof(double));
  }
  write_file_atomic(path, bytes);
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find(',') == std::string::npos && s.find('"') == std::string::npos) {
    return s;
  }
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

void write_query_csv(const std::filesystem::path& path,
                     std::span<const QueryOutput> members,
                     std::span<const QueryOutput> nonmembers) {
  if (members.empty() && nonmembers.empty()) {
    throw ValidationError("write_query_csv: nothing to write");
  }
  const std::size_t d =
      members.empty() ? nonmembers.front().size() : members.front().size();
  std::ostringstream out;
  out << "m";
  for (std::size_t k = 1; k <= d; ++k) out << ",q" << k;
  out << "\n";
  auto write_rows = [&](std::span<const QueryOutput> rows, const char* label) {
    for (const auto& r : rows) {
      if (r.size() != d) {
        throw ValidationError("write_query_csv: inconsistent dimensions");
      }
      out << label;
      for (double v : r) out << "," << format_double(v);
      out << "\n";
    }
  };
  write_rows(members, "1");
  write_rows(nonmembers, "-1");
  write_file_atomic(path, out.str());
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::path dir = path.parent_path();
  if (dir.empty()) dir = ".";
  const std::filesystem::path tmp =
      dir / (path.filename().string() + ".tmp" +
             std::to_string(static_cast<unsigned long>(::getpid())));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw DataError("cannot create file: " + tmp.string());
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw DataError("failed writing file: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("failed to move report into place: " + ec.message());
  }
}

GeneralizedMetric MetricSelector::resolve(double prior_p) const {
  return named_metric(name, prior_p, wa_weights);
}

MetricSelector parse_metric_selector(const std::string& text) {
  MetricSelector sel;
  const std::size_t paren = text.find('(');
  if (paren == std::string::npos) {
    sel.name = text;
    if (sel.name == "WA") return sel;  // default unit weights
    named_metric(sel.name, 0.5);       // validates the name
    return sel;
  }
  if (text.back() != ')') {
    throw ValidationError("metric selector '" + text + "': missing ')'");
  }
  sel.name = text.substr(0, paren);
  if (sel.name != "WA") {
    throw ValidationError("metric selector '" + text +
                          "': only WA takes weight arguments");
  }
  const std::string args = text.substr(paren + 1, text.size() - paren - 2);
  const auto fields = split_csv_line(args);
  if (fields.size() != 4) {
    throw ValidationError("metric selector '" + text +
                          "': WA needs exactly 4 weights");
  }
  for (std::size_t i = 0; i < 4; ++i) {
    try {
      sel.wa_weights[i] = parse_double(fields[i], "metric selector");
    } catch (const DataError& e) {
      throw ValidationError(e.what());
    }
  }
  named_metric(sel.name, 0.5, sel.wa_weights);  // validates the weights
  return sel;
}

void AuditConfig::validate() const {
  ExperimentConfig cfg{prior_p, n_samples, confidence_delta, rng_seed};
  cfg.validate();
  if (data_path.empty()) {
    throw ValidationError("audit config: data_path is required");
  }
  if (density.kind == DensityConfig::Kind::discrete) {
    if (density.bins && *density.bins == 0) {
      throw ValidationError("audit config: bins must be positive");
    }
  } else if (density.bandwidth && !(*density.bandwidth > 0.0)) {
    throw ValidationError("audit config: bandwidth must be positive");
  }
  if (grid_resolution == 0) {
    throw ValidationError("audit config: grid_resolution must be positive");
  }
  if (dp_epsilon && !(*dp_epsilon >= 0.0)) {
    throw ValidationError("audit config: dp_epsilon must be non-negative");
  }
  for (const auto& sel : metrics) {
    named_metric(sel.name, 0.5, sel.wa_weights);
  }
}

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

class StageClock {
 public:
  explicit StageClock(std::vector<std::pair<std::string, double>>& sink)
      : sink_(sink), last_(std::chrono::steady_clock::now()) {}

  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_.emplace_back(stage,
                       std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }

 private:
  std::vector<std::pair<std::string, double>>& sink_;
  std::chrono::steady_clock::time_point last_;
};

std::string canonical_metric_name(const MetricSelector& sel) {
  if (sel.name != "WA") return sel.name;
  char label[96];
  std::snprintf(label, sizeof(label), "WA(%g,%g,%g,%g)", sel.wa_weights[0],
                sel.wa_weights[1], sel.wa_weights[2], sel.wa_weights[3]);
  return label;
}

// Maps an estimator's reported value onto the advantage scale when the
// metric admits it; DP comparisons only make sense there.
std::optional<double> advantage_scale_value(const AdvantageEstimate& est) {
  if (est.metric_name == "ACC") {
    return est.kind == EstimatorKind::generalized_empirical
               ? 2.0 * est.point - 1.0
               : est.point;
  }
  if (est.metric_name == "AM") {
    return 2.0 * est.point - 1.0;
  }
  return std::nullopt;
}

}  // namespace

AuditReport run_audit(const AuditConfig& config) {
  config.validate();

  AuditReport report;
  report.schema = kReportSchema;
  report.config = config;
  report.generated_at = utc_timestamp();
  StageClock clock(report.runtimes);

  const QueryPools pools = ingest_query_csv(config.data_path);
  report.member_pool_rows = pools.members.size();
  report.nonmember_pool_rows = pools.nonmembers.size();
  report.dimension = pools.dimension;
  clock.lap("ingest");

  const ExperimentConfig experiment{config.prior_p, config.n_samples,
                                    config.confidence_delta, config.rng_seed};
  const LabeledQuerySet set =
      build_labeled_set(pools.members, pools.nonmembers, experiment);
  report.n_members_sampled = set.member_count();
  report.n_nonmembers_sampled = set.nonmember_count();
  clock.lap("sampling");

  std::optional<BinningScheme> scheme;
  if (config.density.kind == DensityConfig::Kind::discrete &&
      config.density.bins) {
    scheme = BinningScheme::fit(set.outputs(), *config.density.bins);
  }

  if (config.density.kind == DensityConfig::Kind::discrete) {
    report.estimators.push_back(
        {"advantage_discrete",
         advantage_discrete(set, scheme, config.confidence_delta)});
  } else {
    report.estimators.push_back(
        {"advantage_continuous",
         advantage_continuous(set,
                              {config.density.bandwidth, config.density.kernel},
                              config.confidence_delta, config.mc_samples,
                              config.rng_seed, config.threads)});
  }
  for (const auto& sel : config.metrics) {
    const GeneralizedMetric metric = sel.resolve(config.prior_p);
    AdvantageEstimate est =
        advantage_generalized(set, metric, config.density,
                              config.grid_resolution, config.rng_seed);
    if (est.skipped_grid_points && *est.skipped_grid_points > 0) {
      report.warnings.push_back(
          "metric " + metric.name() + ": " +
          std::to_string(*est.skipped_grid_points) +
          " grid points were undefined on the tuning partition");
    }
    report.estimators.push_back({"generalized_" + canonical_metric_name(sel),
                                 std::move(est)});
  }
  clock.lap("estimators");

  if (config.compute_risks) {
    std::unique_ptr<Density> member_density;
    std::unique_ptr<Density> nonmember_density;
    const auto members = set.member_outputs();
    const auto nonmembers = set.nonmember_outputs();
    if (config.density.kind == DensityConfig::Kind::discrete) {
      member_density =
          std::make_unique<DiscreteDensity>(fit_discrete(members, scheme));
      nonmember_density =
          std::make_unique<DiscreteDensity>(fit_discrete(nonmembers, scheme));
    } else {
      member_density = std::make_unique<KdeDensity>(
          fit_kde(members, config.density.bandwidth, config.density.kernel));
      nonmember_density = std::make_unique<KdeDensity>(fit_kde(
          nonmembers, config.density.bandwidth, config.density.kernel));
    }
    BatchRiskResult batch = individual_risk_batch(
        set.outputs(), *member_density, *nonmember_density, config.prior_p,
        std::nullopt, config.confidence_delta, config.threads);
    for (auto& w : batch.warnings) report.warnings.push_back(std::move(w));

    RiskSummary summary;
    summary.count = batch.estimates.size();
    summary.ci_level = 1.0 - config.confidence_delta;
    double acc = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& est : batch.estimates) {
      if (est.uninformative) ++summary.uninformative;
      acc += est.point;
      lo = std::min(lo, est.point);
      hi = std::max(hi, est.point);
    }
    summary.mean = acc / static_cast<double>(summary.count);
    summary.min = lo;
    summary.max = hi;
    report.risk_summary = summary;
    report.risks = std::move(batch.estimates);
    report.risk_points = set.outputs();
    report.risk_labels = set.labels();
  }
  clock.lap("risks");

  if (config.dp_epsilon) {
    DpSection dp;
    dp.bound = dp_bound(*config.dp_epsilon, config.prior_p);
    for (const auto& entry : report.estimators) {
      if (auto observed = advantage_scale_value(entry.estimate)) {
        dp.findings.push_back(
            {entry.label, *observed, dp.bound.exceeded_by(*observed)});
      }
    }
    if (report.risk_summary) {
      dp.max_risk_point = report.risk_summary->max;
      dp.max_risk_exceeds = dp.bound.exceeded_by(report.risk_summary->max);
    }
    report.dp = std::move(dp);
    clock.lap("dp");
  }

  return report;
}

namespace {

ordered_json config_json(const AuditConfig& config) {
  ordered_json j;
  j["data_path"] = config.data_path.string();
  j["prior_p"] = config.prior_p;
  j["n_samples"] = config.n_samples;
  j["confidence_delta"] = config.confidence_delta;
  j["rng_seed"] = config.rng_seed;
  ordered_json density;
  density["kind"] = config.density.kind == DensityConfig::Kind::discrete
                        ? "discrete"
                        : "continuous";
  if (config.density.kind == DensityConfig::Kind::discrete) {
    if (config.density.bins) {
      density["bins"] = *config.density.bins;
    } else {
      density["bins"] = nullptr;
    }
  } else {
    if (config.density.bandwidth) {
      density["bandwidth"] = *config.density.bandwidth;
    } else {
      density["bandwidth"] = "auto";
    }
    density["kernel"] = config.density.kernel == KernelId::gaussian
                            ? "gaussian"
                            : "epanechnikov";
  }
  j["density"] = std::move(density);
  ordered_json metrics = ordered_json::array();
  for (const auto& sel : config.metrics) {
    metrics.push_back(canonical_metric_name(sel));
  }
  j["metrics"] = std::move(metrics);
  j["mc_samples"] = config.mc_samples;
  j["grid_resolution"] = config.grid_resolution;
  j["compute_risks"] = config.compute_risks;
  if (config.dp_epsilon) {
    j["dp_epsilon"] = *config.dp_epsilon;
  } else {
    j["dp_epsilon"] = nullptr;
  }
  return j;
}

ordered_json estimator_json(const EstimatorEntry& entry) {
  const AdvantageEstimate& est = entry.estimate;
  ordered_json j;
  j["label"] = entry.label;
  j["metric"] = est.metric_name;
  j["kind"] = to_string(est.kind);
  j["point"] = est.point;
  j["n"] = est.n_used;
  j["confidence_delta"] = est.confidence_delta;
  if (est.concentration_radius) {
    j["concentration_radius"] = *est.concentration_radius;
  }
  if (est.mc_samples) j["mc_samples"] = *est.mc_samples;
  if (est.mc_standard_error) j["mc_standard_error"] = *est.mc_standard_error;
  if (est.learned_threshold) j["learned_threshold"] = *est.learned_threshold;
  if (est.orientation) {
    j["orientation"] = *est.orientation == ThresholdOrientation::positive_above
                           ? "positive_above"
                           : "positive_below";
  }
  if (est.skipped_grid_points) {
    j["skipped_grid_points"] = *est.skipped_grid_points;
  }
  if (est.partition_sizes) {
    j["partition_sizes"] = *est.partition_sizes;
  }
  return j;
}

}  // namespace

std::string render_report_json(const AuditReport& report) {
  ordered_json j;
  j["schema"] = report.schema;
  j["config"] = config_json(report.config);
  ordered_json data;
  data["member_pool_rows"] = report.member_pool_rows;
  data["nonmember_pool_rows"] = report.nonmember_pool_rows;
  data["dimension"] = report.dimension;
  data["n_members_sampled"] = report.n_members_sampled;
  data["n_nonmembers_sampled"] = report.n_nonmembers_sampled;
  j["data"] = std::move(data);
  ordered_json estimators = ordered_json::array();
  for (const auto& entry : report.estimators) {
    estimators.push_back(estimator_json(entry));
  }
  j["estimators"] = std::move(estimators);
  if (report.risk_summary) {
    ordered_json risks;
    risks["count"] = report.risk_summary->count;
    risks["uninformative"] = report.risk_summary->uninformative;
    risks["mean"] = report.risk_summary->mean;
    risks["min"] = report.risk_summary->min;
    risks["max"] = report.risk_summary->max;
    risks["ci_level"] = report.risk_summary->ci_level;
    j["risks"] = std::move(risks);
  }
  if (report.dp) {
    ordered_json dp;
    dp["epsilon"] = report.dp->bound.epsilon;
    dp["prior_p"] = report.dp->bound.prior_p;
    dp["lambda"] = report.dp->bound.lambda;
    dp["bound"] = report.dp->bound.bound;
    ordered_json findings = ordered_json::array();
    for (const auto& f : report.dp->findings) {
      ordered_json fj;
      fj["estimator"] = f.label;
      fj["observed_advantage"] = f.observed_advantage;
      fj["exceeds_bound"] = f.exceeds;
      findings.push_back(std::move(fj));
    }
    dp["findings"] = std::move(findings);
    if (report.dp->max_risk_point) {
      dp["max_individual_risk"] = *report.dp->max_risk_point;
      dp["max_individual_risk_exceeds_bound"] = report.dp->max_risk_exceeds;
    }
    j["dp"] = std::move(dp);
  }
  j["warnings"] = report.warnings;
  ordered_json timing;
  timing["generated_at"] = report.generated_at;
  ordered_json stages;
  double total = 0.0;
  for (const auto& [stage, seconds] : report.runtimes) {
    stages[stage] = seconds;
    total += seconds;
  }
  stages["total"] = total;
  timing["runtime_seconds"] = std::move(stages);
  j["timing"] = std::move(timing);
  return j.dump(2) + "\n";
}

std::string render_estimator_csv(const AuditReport& report) {
  std::ostringstream out;
  out << "label,metric,kind,n,point,band_lo,band_hi,confidence_delta,"
         "mc_samples,mc_standard_error,learned_threshold,orientation,"
         "skipped_grid_points,n_part1,n_part2,n_part3\n";
  for (const auto& entry : report.estimators) {
    const AdvantageEstimate& est = entry.estimate;
    out << csv_field(entry.label) << "," << csv_field(est.metric_name) << ","
        << to_string(est.kind)
        << "," << est.n_used << "," << format_double(est.point) << ",";
    if (est.concentration_radius) {
      out << format_double(est.point - *est.concentration_radius) << ","
          << format_double(est.point + *est.concentration_radius);
    } else {
      out << ",";
    }
    out << "," << format_double(est.confidence_delta) << ",";
    if (est.mc_samples) out << *est.mc_samples;
    out << ",";
    if (est.mc_standard_error) out << format_double(*est.mc_standard_error);
    out << ",";
    if (est.learned_threshold) out << format_double(*est.learned_threshold);
    out << ",";
    if (est.orientation) {
      out << (*est.orientation == ThresholdOrientation::positive_above
                  ? "positive_above"
                  : "positive_below");
    }
    out << ",";
    if (est.skipped_grid_points) out << *est.skipped_grid_points;
    out << ",";
    if (est.partition_sizes) {
      out << (*est.partition_sizes)[0] << "," << (*est.partition_sizes)[1]
          << "," << (*est.partition_sizes)[2];
    } else {
      out << ",,";
    }
    out << "\n";
  }
  return out.str();
}

std::string render_risk_csv(const AuditReport& report) {
  std::ostringstream out;
  out << "index,label";
  for (std::size_t k = 1; k <= report.dimension; ++k) out << ",q" << k;
  out << ",metric,point,ci_lo,ci_hi,ci_level,f_signed,uninformative\n";
  for (std::size_t i = 0; i < report.risks.size(); ++i) {
    const auto& est = report.risks[i];
    out << i << ","
        << (report.risk_labels[i] == MembershipLabel::member ? "1" : "-1");
    for (double v : report.risk_points[i]) out << "," << format_double(v);
    out << "," << csv_field(est.metric_name) << "," << format_double(est.point)
        << ","
        << format_double(est.ci.lower) << "," << format_double(est.ci.upper)
        << "," << format_double(est.ci.level) << ","
        << format_double(est.f_p_signed) << "," << (est.uninformative ? 1 : 0)
        << "\n";
  }
  return out.str();
}

void write_report_files(const AuditReport& report,
                        const std::filesystem::path& out_path) {
  write_file_atomic(out_path, render_report_json(report));
  std::filesystem::path table = out_path;
  table.replace_extension(".csv");
  write_file_atomic(table, render_estimator_csv(report));
  if (report.risk_summary) {
    std::filesystem::path risks = out_path;
    risks.replace_extension();
    risks += "_risks.csv";
    write_file_atomic(risks, render_risk_csv(report));
  }
}

}  // namespace mace::io
