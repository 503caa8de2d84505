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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedscalar/config.hpp"
#include "fedscalar/data.hpp"
#include "fedscalar/linalg.hpp"
#include "fedscalar/protocol.hpp"

namespace fedscalar {

struct ExperimentSummary {
  std::size_t param_count = 0;
  std::uint64_t rounds = 0;
  double initial_train_loss = 0.0;
  double final_train_loss = 0.0;
  std::optional<double> final_test_accuracy;
  std::uint64_t total_upload_bytes = 0;
  std::uint64_t total_download_bytes = 0;
  // Mean of ||grad f(x_k)||^2 over evaluated rounds k < K.
  double mean_grad_norm_sq = 0.0;
  // Largest ||h_n||^2 any client saw; an empirical stand-in for G^2.
  double max_stochastic_grad_norm_sq = 0.0;
};

struct ExperimentResult {
  ExperimentConfig cfg;
  // Rows for rounds 0..K-1, plus a final evaluation-only row for x_K.
  std::vector<RoundRecord> records;
  CommLedger ledger;
  ParamVector initial_params;
  ParamVector final_params;
  ExperimentSummary summary;
};

// Loads cfg.data_path and runs K rounds. Throws ConfigError / DataError.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& ds);

// Mean grad_norm_sq over evaluated records with round < round_limit.
double mean_grad_norm_sq(std::span<const RoundRecord> records,
                         std::uint64_t round_limit);

// Shortest-round-trip-safe rendering: 17 significant digits, locale-free.
std::string format_double(double value);

inline constexpr const char* kMetricsHeader =
    "round,train_loss,test_accuracy,grad_norm_sq,upload_bytes,download_bytes";

// One row per record; evaluation columns are empty off-cadence.
void write_metrics_csv(std::ostream& out, std::span<const RoundRecord> records);
void write_summary(std::ostream& out, const ExperimentResult& result);
// Writes <dir>/metrics.csv and <dir>/summary.txt.
void write_experiment(const ExperimentResult& result,
                      const std::filesystem::path& dir);

// --- comparisons ---------------------------------------------------------

struct Variant {
  std::string label;
  std::vector<std::pair<std::string, std::string>> overrides;
};

// Parses "key=value[,key=value...]". Throws ConfigError.
Variant parse_variant(std::string_view text);

struct ComparisonEntry {
  std::string label;
  ExperimentResult result;
  // Upload payload bytes per client per round, and its ratio to the base.
  std::uint64_t payload_upload_bytes = 0;
  double payload_upload_ratio = 1.0;
  // Sample variance of successive train-loss changes over evaluated rounds.
  double loss_change_variance = 0.0;
};

struct Comparison {
  std::vector<ComparisonEntry> entries;  // base first
};

// Runs base and every variant (base + overrides) with the same seed lineage.
// Runs are independent and execute concurrently.
Comparison compare_runs(const ExperimentConfig& base,
                        std::span<const Variant> variants);

void write_comparison_csv(std::ostream& out, const Comparison& cmp);
void write_comparison_summary(std::ostream& out, const Comparison& cmp);

// --- estimator verification ---------------------------------------------

struct VerificationOptions {
  std::vector<std::size_t> dims{2, 5, 10};
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  int delta_sets = 3;  // random delta sets per dimension
  int clients = 3;     // deltas per set
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct TraceRow {
  std::size_t d = 0;
  int set = 0;
  double trace_gaussian_mc = 0.0;
  double trace_gaussian_se = 0.0;
  // Exact when d <= 20, Monte-Carlo otherwise.
  double trace_rademacher = 0.0;
  bool rademacher_exact = false;
  double trace_rademacher_mc = 0.0;
  double trace_gap = 0.0;
  double closed_form_gap_trace = 0.0;
  double gap_matrix_max_abs_dev = 0.0;
  double gaussian_formula_max_abs_dev = 0.0;
  double rademacher_formula_max_abs_dev = 0.0;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  std::vector<TraceRow> rows;

  bool all_passed() const;
};

VerificationReport run_verification(const VerificationOptions& options);

void write_verification_text(std::ostream& out, const VerificationReport& r);
void write_verification_csv(std::ostream& out, const VerificationReport& r);

}  // namespace fedscalar
