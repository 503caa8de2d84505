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

#include <gtest/gtest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fedscalar/errors.hpp"
#include "test_support.hpp"

namespace fedscalar {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.num_clients = 5;
  cfg.active_clients = 5;
  cfg.per_client = 20;
  cfg.rounds = 20;
  cfg.local_steps = 2;
  cfg.batch_size = 5;
  cfg.layer_sizes = {64, 4, 10};
  cfg.eval_every = 5;
  cfg.data_path = testing::digits_path();
  return cfg;
}

const Dataset& digits() {
  static const Dataset ds = load_digits(testing::digits_path());
  return ds;
}

// Minimal RFC 4180 field splitter for one line.
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted && c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
      out.back() += '"';
      ++i;
    } else if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

TEST(FormatDoubleTest, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678, 0.0}) {
    const std::string s = format_double(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, x) << s;
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(RunExperimentTest, RecordLayoutAndByteTotals) {
  const auto cfg = small_config();
  const auto r = run_experiment(cfg, digits());
  ASSERT_EQ(r.records.size(), 21u);
  for (std::size_t k = 0; k < r.records.size(); ++k) {
    const auto& rec = r.records[k];
    EXPECT_EQ(rec.round, k);
    EXPECT_EQ(rec.train_loss.has_value(), k % 5 == 0 || k == 20);
  }
  EXPECT_EQ(r.records.back().upload_bytes, 0u);
  const std::size_t d = r.summary.param_count;
  EXPECT_EQ(d, 64u * 4 + 4 + 4 * 10 + 10);
  const auto per_round = account_bytes(cfg, d);
  EXPECT_EQ(r.summary.total_upload_bytes, 20 * per_round.upload);
  EXPECT_EQ(r.summary.total_download_bytes, 20 * per_round.download);
  EXPECT_EQ(r.ledger.per_round().size(), 20u);
  EXPECT_EQ(r.summary.initial_train_loss, *r.records.front().train_loss);
  EXPECT_EQ(r.summary.final_train_loss, *r.records.back().train_loss);
  EXPECT_EQ(r.summary.mean_grad_norm_sq, mean_grad_norm_sq(r.records, 20));
  EXPECT_GT(r.summary.max_stochastic_grad_norm_sq, 0.0);
  ASSERT_TRUE(r.summary.final_test_accuracy.has_value());
}

TEST(RunExperimentTest, ZeroStepSizeLeavesParamsUnchanged) {
  for (auto alg : {Algorithm::FedScalar, Algorithm::FedAvg}) {
    auto cfg = small_config();
    cfg.rounds = 1;
    cfg.alpha = 0.0;
    cfg.algorithm = alg;
    const auto r = run_experiment(cfg, digits());
    if (alg == Algorithm::FedScalar) {
      EXPECT_EQ(r.final_params, r.initial_params);
      EXPECT_EQ(r.summary.final_train_loss, r.summary.initial_train_loss);
    } else {
      // Summing five identical values can round, so FedAvg is only a fixed
      // point to within a few ulps.
      for (std::size_t i = 0; i < r.final_params.size(); ++i) {
        EXPECT_LE(testing::ulp_distance(r.final_params[i], r.initial_params[i]),
                  4);
      }
    }
  }
}

TEST(RunExperimentTest, SameInitialParamsAcrossAlgorithms) {
  auto cfg = small_config();
  cfg.rounds = 1;
  const auto a = run_experiment(cfg, digits());
  cfg.algorithm = Algorithm::FedAvg;
  const auto b = run_experiment(cfg, digits());
  EXPECT_EQ(a.initial_params, b.initial_params);
}

TEST(RunExperimentTest, MetricsCsvIsBytewiseDeterministic) {
  const auto cfg = small_config();
  std::ostringstream a;
  std::ostringstream b;
  const auto ra = run_experiment(cfg, digits());
  const auto rb = run_experiment(cfg, digits());
  write_metrics_csv(a, ra.records);
  write_metrics_csv(b, rb.records);
  EXPECT_EQ(a.str(), b.str());
  std::ostringstream sa;
  std::ostringstream sb;
  write_summary(sa, ra);
  write_summary(sb, rb);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(RunExperimentTest, MetricsCsvShape) {
  const auto r = run_experiment(small_config(), digits());
  std::ostringstream out;
  write_metrics_csv(out, r.records);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kMetricsHeader);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    ASSERT_EQ(cells.size(), 6u) << line;
    EXPECT_EQ(cells[0], std::to_string(rows));
    EXPECT_EQ(cells[1].empty(), !r.records[rows].train_loss.has_value());
    if (!cells[1].empty()) {
      EXPECT_EQ(std::stod(cells[1]), *r.records[rows].train_loss);
    }
    ++rows;
  }
  EXPECT_EQ(rows, r.records.size());
}

TEST(RunExperimentTest, RejectsMismatchedLayerWidths) {
  auto cfg = small_config();
  cfg.layer_sizes = {63, 4, 10};
  EXPECT_THROW(run_experiment(cfg, digits()), ConfigError);
  cfg.layer_sizes = {64, 4, 9};
  EXPECT_THROW(run_experiment(cfg, digits()), ConfigError);
}

TEST(RunExperimentTest, MissingDataFileIsDataError) {
  auto cfg = small_config();
  cfg.data_path = "/nonexistent/digits.csv";
  EXPECT_THROW(run_experiment(cfg), DataError);
}

TEST(WriteExperimentTest, WritesBothFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "fedscalar_harness_test";
  std::filesystem::remove_all(dir);
  auto cfg = small_config();
  cfg.rounds = 2;
  write_experiment(run_experiment(cfg, digits()), dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "metrics.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.txt"));
  std::ifstream in(dir / "metrics.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, kMetricsHeader);
  std::filesystem::remove_all(dir);
}

TEST(MeanGradNormTest, UsesEvaluatedRoundsBelowLimit) {
  std::vector<RoundRecord> recs(4);
  for (std::size_t k = 0; k < 4; ++k) recs[k].round = k;
  recs[0].grad_norm_sq = 2.0;
  recs[2].grad_norm_sq = 4.0;
  recs[3].grad_norm_sq = 100.0;
  EXPECT_DOUBLE_EQ(mean_grad_norm_sq(recs, 3), 3.0);
  EXPECT_DOUBLE_EQ(mean_grad_norm_sq(recs, 1), 2.0);
}

TEST(ParseVariantTest, Examples) {
  const auto v = parse_variant("algorithm=fedavg,layer_sizes=64,8,10,S=2");
  EXPECT_EQ(v.label, "algorithm=fedavg,layer_sizes=64,8,10,S=2");
  ASSERT_EQ(v.overrides.size(), 3u);
  EXPECT_EQ(v.overrides[1].first, "layer_sizes");
  EXPECT_EQ(v.overrides[1].second, "64,8,10");
  EXPECT_EQ(v.overrides[2].second, "2");
  EXPECT_THROW(parse_variant(""), ConfigError);
  EXPECT_THROW(parse_variant("nonsense"), ConfigError);
}

TEST(CompareRunsTest, EmptyVariantListRunsBaseOnly) {
  auto cfg = small_config();
  cfg.rounds = 3;
  const auto cmp = compare_runs(cfg, {});
  ASSERT_EQ(cmp.entries.size(), 1u);
  EXPECT_EQ(cmp.entries[0].label, "base");
  EXPECT_EQ(cmp.entries[0].payload_upload_ratio, 1.0);
}

TEST(CompareRunsTest, PayloadRatioAndByteScaling) {
  auto cfg = small_config();
  cfg.rounds = 5;
  const std::vector<Variant> variants{
      parse_variant("algorithm=fedavg"),
      parse_variant("layer_sizes=64,8,10"),
      parse_variant("algorithm=fedavg,layer_sizes=64,8,10")};
  const auto cmp = compare_runs(cfg, variants);
  ASSERT_EQ(cmp.entries.size(), 4u);
  const auto& base = cmp.entries[0];
  const auto& avg = cmp.entries[1];
  const auto& wide = cmp.entries[2];
  const auto& wide_avg = cmp.entries[3];
  const std::size_t d = base.result.summary.param_count;
  const std::size_t d_wide = wide.result.summary.param_count;
  EXPECT_EQ(base.payload_upload_bytes, 8u);
  EXPECT_EQ(avg.payload_upload_bytes, 8u * d);
  EXPECT_DOUBLE_EQ(avg.payload_upload_ratio, static_cast<double>(d));
  // FedScalar uploads do not depend on d; FedAvg uploads grow linearly.
  EXPECT_EQ(base.result.summary.total_upload_bytes,
            wide.result.summary.total_upload_bytes);
  EXPECT_EQ(wide_avg.result.summary.total_upload_bytes -
                avg.result.summary.total_upload_bytes,
            5u * 5u * 8u * (d_wide - d));

  std::ostringstream out;
  write_comparison_csv(out, cmp);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(split(header).size(), 1u + 4u * 4u);
  EXPECT_EQ(header.rfind("round,base:train_loss", 0), 0u);
  EXPECT_EQ(split(header)[9], "layer_sizes=64,8,10:train_loss");
  std::ostringstream summary;
  write_comparison_summary(summary, cmp);
  EXPECT_NE(summary.str().find("algorithm=fedavg"), std::string::npos);
}

TEST(VerificationTest, SmallRunPasses) {
  VerificationOptions opts;
  opts.dims = {2, 3};
  opts.samples = 100000;
  opts.delta_sets = 2;
  const auto report = run_verification(opts);
  for (const auto& c : report.checks) {
    EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
  }
  EXPECT_TRUE(report.all_passed());
  EXPECT_EQ(report.rows.size(), 4u);
  for (const auto& row : report.rows) {
    EXPECT_TRUE(row.rademacher_exact);
    EXPECT_GT(row.trace_gap, 0.0);
  }
  std::ostringstream text;
  std::ostringstream csv;
  write_verification_text(text, report);
  write_verification_csv(csv, report);
  EXPECT_FALSE(text.str().empty());
  EXPECT_NE(csv.str().find('\n'), std::string::npos);
}

}  // namespace
}  // namespace fedscalar
