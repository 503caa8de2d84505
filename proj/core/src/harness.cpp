// Copyright 2026 The FedScalar Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include "fedscalar/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <set>

#include "fedscalar/errors.hpp"
#include "fedscalar/estimator_lab.hpp"

namespace fedscalar {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

// Quotes a CSV field that contains a comma or quote, doubling inner quotes.
std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"") == std::string_view::npos) {
    return std::string(text);
  }
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

ParamVector random_unit(RngStream& stream, std::size_t d) {
  ParamVector v(d);
  double n = 0.0;
  while (n == 0.0) {
    stream.fill(Distribution::Gaussian, v.values());
    n = norm_sq(v);
  }
  return scale(1.0 / std::sqrt(n), v);
}

void add_check(VerificationReport& report, std::string name, bool passed,
               std::string detail) {
  report.checks.push_back({std::move(name), passed, std::move(detail)});
}

std::string dist_tag(Distribution dist) { return std::string(to_string(dist)); }

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Dataset ds = load_digits(cfg.data_path);
  return run_experiment(cfg, ds);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& ds) {
  cfg.validate();
  const MlpSpec spec{cfg.layer_sizes};
  if (spec.input_size() != ds.samples.front().features.size()) {
    throw ConfigError("config: layer_sizes input width " +
                      std::to_string(spec.input_size()) +
                      " does not match the data (" +
                      std::to_string(ds.samples.front().features.size()) + ")");
  }
  if (spec.class_count() < static_cast<std::size_t>(ds.class_count)) {
    throw ConfigError("config: layer_sizes output width is smaller than the "
                      "number of classes");
  }
  RngStream partition_stream(cfg.master_seed, "partition");
  Partition part;
  try {
    part = partition(ds, cfg.num_clients, cfg.per_client, cfg.partition_scheme,
                     partition_stream);
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const Federation fed{cfg, spec, ds, part};

  ExperimentResult result;
  result.cfg = cfg;
  RngStream init_stream(cfg.master_seed, "init");
  result.initial_params = init_params(spec, init_stream);
  result.records.reserve(static_cast<std::size_t>(cfg.rounds) + 1);

  ServerState state{0, result.initial_params};
  double max_h = 0.0;
  for (int k = 0; k < cfg.rounds; ++k) {
    RoundOutcome out = run_round(state, fed);
    result.ledger.record({out.record.upload_bytes, out.record.download_bytes});
    result.records.push_back(out.record);
    max_h = std::max(max_h, out.max_grad_norm_sq);
    state = std::move(out.next);
  }
  RoundRecord last;
  last.round = state.round;
  evaluate_into(fed, state.params, last);
  result.records.push_back(last);
  result.final_params = state.params;

  auto& s = result.summary;
  s.param_count = spec.param_count();
  s.rounds = static_cast<std::uint64_t>(cfg.rounds);
  s.initial_train_loss = result.records.front().train_loss.value();
  s.final_train_loss = last.train_loss.value();
  s.final_test_accuracy = last.test_accuracy;
  s.total_upload_bytes = result.ledger.total_upload();
  s.total_download_bytes = result.ledger.total_download();
  s.mean_grad_norm_sq = mean_grad_norm_sq(result.records, s.rounds);
  s.max_stochastic_grad_norm_sq = max_h;
  return result;
}

double mean_grad_norm_sq(std::span<const RoundRecord> records,
                         std::uint64_t round_limit) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& r : records) {
    if (r.round < round_limit && r.grad_norm_sq) {
      total += *r.grad_norm_sq;
      ++count;
    }
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                       std::chars_format::general, 17);
  return std::string(buf, end);
}

void write_metrics_csv(std::ostream& out,
                       std::span<const RoundRecord> records) {
  out << kMetricsHeader << '\n';
  for (const auto& r : records) {
    out << r.round << ',' << optional_cell(r.train_loss) << ','
        << optional_cell(r.test_accuracy) << ','
        << optional_cell(r.grad_norm_sq) << ',' << r.upload_bytes << ','
        << r.download_bytes << '\n';
  }
}

void write_summary(std::ostream& out, const ExperimentResult& result) {
  const auto& s = result.summary;
  out << "algorithm = " << to_string(result.cfg.algorithm) << '\n'
      << "dist = " << to_string(result.cfg.dist) << '\n'
      << "param_count = " << s.param_count << '\n'
      << "rounds = " << s.rounds << '\n'
      << "initial_train_loss = " << format_double(s.initial_train_loss) << '\n'
      << "final_train_loss = " << format_double(s.final_train_loss) << '\n'
      << "final_test_accuracy = " << optional_cell(s.final_test_accuracy)
      << '\n'
      << "total_upload_bytes = " << s.total_upload_bytes << '\n'
      << "total_download_bytes = " << s.total_download_bytes << '\n'
      << "mean_grad_norm_sq = " << format_double(s.mean_grad_norm_sq) << '\n'
      << "max_stochastic_grad_norm_sq = "
      << format_double(s.max_stochastic_grad_norm_sq) << '\n';
}

void write_experiment(const ExperimentResult& result,
                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream metrics(dir / "metrics.csv", std::ios::binary);
  write_metrics_csv(metrics, result.records);
  std::ofstream summary(dir / "summary.txt", std::ios::binary);
  write_summary(summary, result);
  if (!metrics || !summary) {
    throw Error("failed writing results to " + dir.string());
  }
}

Variant parse_variant(std::string_view text) {
  Variant v;
  v.label = std::string(text);
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    // layer_sizes values contain commas; a token without '=' continues the
    // previous value.
    const auto token = trim(rest.substr(0, comma));
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) {
      if (v.overrides.empty() || token.empty()) {
        throw ConfigError("compare: expected key=value, got '" +
                          std::string(token) + "'");
      }
      v.overrides.back().second += "," + std::string(token);
    } else {
      v.overrides.emplace_back(std::string(trim(token.substr(0, eq))),
                               std::string(trim(token.substr(eq + 1))));
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (v.overrides.empty()) throw ConfigError("compare: empty variant");
  return v;
}

Comparison compare_runs(const ExperimentConfig& base,
                        std::span<const Variant> variants) {
  base.validate();
  std::vector<std::pair<std::string, ExperimentConfig>> configs;
  configs.emplace_back("base", base);
  for (const auto& v : variants) {
    ExperimentConfig cfg = base;
    for (const auto& [key, value] : v.overrides) apply_setting(cfg, key, value);
    cfg.validate();
    configs.emplace_back(v.label, cfg);
  }

  const Dataset ds = load_digits(base.data_path);
  std::vector<std::future<ExperimentResult>> pending;
  for (const auto& [label, cfg] : configs) {
    const Dataset* data = &ds;
    // A variant may point at a different data file.
    if (cfg.data_path != base.data_path) data = nullptr;
    pending.push_back(std::async(std::launch::async, [cfg = cfg, data] {
      return data ? run_experiment(cfg, *data) : run_experiment(cfg);
    }));
  }

  Comparison cmp;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    ComparisonEntry e;
    e.label = configs[i].first;
    e.result = pending[i].get();
    e.payload_upload_bytes =
        upload_payload_bytes(e.result.cfg.algorithm, e.result.summary.param_count);
    std::vector<double> changes;
    std::optional<double> prev;
    for (const auto& r : e.result.records) {
      if (!r.train_loss) continue;
      if (prev) changes.push_back(*r.train_loss - *prev);
      prev = r.train_loss;
    }
    e.loss_change_variance = sample_variance(changes);
    cmp.entries.push_back(std::move(e));
  }
  const double base_payload =
      static_cast<double>(cmp.entries.front().payload_upload_bytes);
  for (auto& e : cmp.entries) {
    e.payload_upload_ratio =
        static_cast<double>(e.payload_upload_bytes) / base_payload;
  }
  return cmp;
}

void write_comparison_csv(std::ostream& out, const Comparison& cmp) {
  std::set<std::uint64_t> rounds;
  for (const auto& e : cmp.entries) {
    for (const auto& r : e.result.records) {
      if (r.train_loss) rounds.insert(r.round);
    }
  }
  out << "round";
  for (const auto& e : cmp.entries) {
    for (const char* column :
         {":train_loss", ":test_accuracy", ":upload_bytes", ":download_bytes"}) {
      out << ',' << csv_field(e.label + column);
    }
  }
  out << '\n';
  for (std::uint64_t k : rounds) {
    out << k;
    for (const auto& e : cmp.entries) {
      const auto& recs = e.result.records;
      if (k < recs.size() && recs[k].round == k) {
        const auto& r = recs[k];
        out << ',' << optional_cell(r.train_loss) << ','
            << optional_cell(r.test_accuracy) << ',' << r.upload_bytes << ','
            << r.download_bytes;
      } else {
        out << ",,,,";
      }
    }
    out << '\n';
  }
}

void write_comparison_summary(std::ostream& out, const Comparison& cmp) {
  out << "label,algorithm,dist,param_count,final_train_loss,"
         "final_test_accuracy,total_upload_bytes,payload_upload_bytes,"
         "payload_upload_ratio,loss_change_variance\n";
  for (const auto& e : cmp.entries) {
    const auto& s = e.result.summary;
    out << csv_field(e.label) << ',' << to_string(e.result.cfg.algorithm) << ','
        << to_string(e.result.cfg.dist) << ',' << s.param_count << ','
        << format_double(s.final_train_loss) << ','
        << optional_cell(s.final_test_accuracy) << ',' << s.total_upload_bytes
        << ',' << e.payload_upload_bytes << ','
        << format_double(e.payload_upload_ratio) << ','
        << format_double(e.loss_change_variance) << '\n';
  }
}

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

VerificationReport run_verification(const VerificationOptions& options) {
  if (options.samples < 2) throw ArgumentError("verify: need samples >= 2");
  if (options.delta_sets < 1 || options.clients < 1) {
    throw ArgumentError("verify: need delta_sets >= 1 and clients >= 1");
  }
  VerificationReport report;
  const double root_m = std::sqrt(static_cast<double>(options.samples));
  const auto M = options.samples;

  for (std::size_t d : options.dims) {
    if (d == 0) throw ArgumentError("verify: dimensions must be positive");
    const std::string dtag = "d=" + std::to_string(d);
    RngStream g_stream(options.seed, "verify-g", d);
    const ParamVector g = random_unit(g_stream, d);

    for (Distribution dist : {Distribution::Gaussian, Distribution::Rademacher}) {
      // Per-coordinate std of <v,g> v_i for unit g: <= sqrt(3) (Gaussian),
      // <= 1 (Rademacher).
      const double sigma = dist == Distribution::Gaussian ? std::sqrt(3.0) : 1.0;
      const double band = 12.0 * sigma / root_m;
      const auto unbiased = lab::mc_unbiasedness(g, dist, M, options.seed + d);
      add_check(report, "unbiasedness " + dist_tag(dist) + " " + dtag,
                unbiased.max_abs_dev <= band,
                "max_abs_dev=" + format_double(unbiased.max_abs_dev) +
                    " band=" + format_double(band));

      const double bound = static_cast<double>(d) + 4.0;
      if (dist == Distribution::Rademacher && d <= lab::kMaxEnumerationDim) {
        const double exact = lab::exact_rademacher_second_moment(g);
        add_check(report, "second moment rademacher " + dtag + " (exact)",
                  exact <= bound &&
                      std::abs(exact - static_cast<double>(d)) <= 1e-9 * d,
                  "value=" + format_double(exact) + " expected=" +
                      std::to_string(d) + " bound=" + format_double(bound));
      } else {
        const auto est = lab::mc_second_moment(g, dist, M, options.seed + d);
        const double analytic =
            static_cast<double>(d) + (dist == Distribution::Gaussian ? 2.0 : 0.0);
        const double tol = 6.0 * est.std_error;
        add_check(report, "second moment " + dist_tag(dist) + " " + dtag,
                  est.value <= bound && std::abs(est.value - analytic) <= tol,
                  "value=" + format_double(est.value) + " analytic=" +
                      format_double(analytic) + " tol=" + format_double(tol) +
                      " bound=" + format_double(bound));
      }
    }

    for (int set = 0; set < options.delta_sets; ++set) {
      RngStream delta_stream(options.seed, "verify-deltas",
                             d * 1000 + static_cast<std::size_t>(set));
      std::vector<ParamVector> deltas;
      for (int n = 0; n < options.clients; ++n) {
        deltas.push_back(random_unit(delta_stream, d));
      }
      const std::uint64_t mc_seed = options.seed * 7919 + d * 31 + set;
      const std::string stag = dtag + " set=" + std::to_string(set);

      const auto gauss = lab::mc_update_moments(deltas, Distribution::Gaussian,
                                                M, mc_seed);
      const auto radem_mc = lab::mc_update_moments(
          deltas, Distribution::Rademacher, M, mc_seed + 1);
      const bool enumerable = d <= lab::kMaxEnumerationDim;
      const auto radem =
          enumerable ? lab::exact_rademacher_moments(deltas) : radem_mc;

      TraceRow row;
      row.d = d;
      row.set = set;
      row.trace_gaussian_mc = gauss.trace;
      row.trace_gaussian_se = *gauss.trace_std_error;
      row.trace_rademacher = radem.trace;
      row.rademacher_exact = enumerable;
      row.trace_rademacher_mc = radem_mc.trace;
      row.trace_gap = gauss.trace - radem.trace;
      const DenseMatrix formula_gap = lab::closed_form_variance_gap(deltas);
      row.closed_form_gap_trace = formula_gap.trace();
      row.gap_matrix_max_abs_dev = max_abs_diff(
          formula_gap, subtract(gauss.covariance, radem.covariance));
      row.gaussian_formula_max_abs_dev = max_abs_diff(
          lab::closed_form_covariance(deltas, Distribution::Gaussian),
          gauss.covariance);
      row.rademacher_formula_max_abs_dev = max_abs_diff(
          lab::closed_form_covariance(deltas, Distribution::Rademacher),
          radem.covariance);
      report.rows.push_back(row);

      double eps = 5.0 * *gauss.trace_std_error;
      if (!enumerable) eps += 5.0 * *radem_mc.trace_std_error;
      add_check(report, "variance ordering " + stag,
                row.trace_gap >= -eps,
                "trace_gaussian=" + format_double(gauss.trace) +
                    " trace_rademacher=" + format_double(radem.trace) +
                    " gap=" + format_double(row.trace_gap) +
                    " eps=" + format_double(eps));

      if (enumerable) {
        double worst = 0.0;
        const auto& se = *radem_mc.covariance_std_error;
        for (std::size_t i = 0; i < d; ++i) {
          for (std::size_t j = 0; j < d; ++j) {
            const double z = std::abs(radem_mc.covariance(i, j) -
                                      radem.covariance(i, j)) /
                             std::max(se(i, j), 1e-12);
            worst = std::max(worst, z);
          }
        }
        add_check(report, "oracle agreement rademacher " + stag, worst <= 5.0,
                  "max |mc - exact| / se = " + format_double(worst));
      }
    }
  }

  // One-dimensional, single-client edge: v = +-1 so d_x = delta exactly.
  const ParamVector single{0.75};
  const auto edge = lab::exact_rademacher_moments(std::span(&single, 1));
  add_check(report, "edge d=1 N=1 rademacher covariance",
            std::abs(edge.trace) <= 1e-12 && edge.mean == single,
            "trace=" + format_double(edge.trace));
  return report;
}

void write_verification_text(std::ostream& out, const VerificationReport& r) {
  std::size_t passed = 0;
  for (const auto& c : r.checks) {
    out << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  (" << c.detail
        << ")\n";
    if (c.passed) ++passed;
  }
  out << "\nvariance traces (rademacher trace exact when d <= "
      << lab::kMaxEnumerationDim << "):\n";
  for (const auto& row : r.rows) {
    out << "  d=" << row.d << " set=" << row.set
        << " gaussian=" << format_double(row.trace_gaussian_mc)
        << " rademacher=" << format_double(row.trace_rademacher)
        << " gap=" << format_double(row.trace_gap)
        << " closed_form_gap=" << format_double(row.closed_form_gap_trace)
        << " gap_matrix_dev=" << format_double(row.gap_matrix_max_abs_dev)
        << '\n';
  }
  out << '\n' << passed << '/' << r.checks.size() << " checks passed\n";
}

void write_verification_csv(std::ostream& out, const VerificationReport& r) {
  out << "d,set,trace_gaussian_mc,trace_gaussian_se,trace_rademacher,"
         "rademacher_exact,trace_rademacher_mc,trace_gap,closed_form_gap_trace,"
         "gap_matrix_max_abs_dev,gaussian_formula_max_abs_dev,"
         "rademacher_formula_max_abs_dev\n";
  for (const auto& row : r.rows) {
    out << row.d << ',' << row.set << ','
        << format_double(row.trace_gaussian_mc) << ','
        << format_double(row.trace_gaussian_se) << ','
        << format_double(row.trace_rademacher) << ','
        << (row.rademacher_exact ? 1 : 0) << ','
        << format_double(row.trace_rademacher_mc) << ','
        << format_double(row.trace_gap) << ','
        << format_double(row.closed_form_gap_trace) << ','
        << format_double(row.gap_matrix_max_abs_dev) << ','
        << format_double(row.gaussian_formula_max_abs_dev) << ','
        << format_double(row.rademacher_formula_max_abs_dev) << '\n';
  }
}

}  // namespace fedscalar
