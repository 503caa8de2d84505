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

// fedscalar: run federated training experiments, compare configurations and
// verify the direction-estimator statistics.
//
//   fedscalar run --config exp.cfg [--out dir]
//   fedscalar verify [--dims 2,5,10] [--samples M] [--seed S] [--out dir]
//   fedscalar compare --config exp.cfg --vary key=value[,key=value...] ...
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 verification
// failure, 1 anything else.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedscalar/config.hpp"
#include "fedscalar/errors.hpp"
#include "fedscalar/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitVerification = 4;

namespace fs = std::filesystem;

int run_command(const std::string& config_path, const fs::path& out_dir) {
  const auto cfg = fedscalar::load_config(config_path);
  const auto result = fedscalar::run_experiment(cfg);
  fedscalar::write_experiment(result, out_dir);
  fedscalar::write_summary(std::cout, result);
  std::cout << "wrote " << (out_dir / "metrics.csv").string() << '\n';
  return 0;
}

int verify_command(const fedscalar::VerificationOptions& options,
                   const fs::path& out_dir) {
  const auto report = fedscalar::run_verification(options);
  fs::create_directories(out_dir);
  std::ofstream text(out_dir / "verification.txt", std::ios::binary);
  fedscalar::write_verification_text(text, report);
  std::ofstream csv(out_dir / "verification.csv", std::ios::binary);
  fedscalar::write_verification_csv(csv, report);
  fedscalar::write_verification_text(std::cout, report);
  return report.all_passed() ? 0 : kExitVerification;
}

int compare_command(const std::string& config_path,
                    const std::vector<std::string>& vary,
                    const fs::path& out_dir) {
  const auto base = fedscalar::load_config(config_path);
  std::vector<fedscalar::Variant> variants;
  for (const auto& v : vary) variants.push_back(fedscalar::parse_variant(v));
  const auto cmp = fedscalar::compare_runs(base, variants);
  fs::create_directories(out_dir);
  std::ofstream table(out_dir / "comparison.csv", std::ios::binary);
  fedscalar::write_comparison_csv(table, cmp);
  std::ofstream summary(out_dir / "comparison_summary.csv", std::ios::binary);
  fedscalar::write_comparison_summary(summary, cmp);
  fedscalar::write_comparison_summary(std::cout, cmp);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FedScalar federated learning simulator"};
  app.require_subcommand(1);
  std::string out_dir = "./out";
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one training experiment");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory");

  fedscalar::VerificationOptions vopts;
  auto* verify = app.add_subcommand("verify", "Verify estimator statistics");
  verify->add_option("--dims", vopts.dims, "Dimensions to test")
      ->delimiter(',')
      ->capture_default_str();
  verify->add_option("--samples", vopts.samples, "Monte-Carlo draws")
      ->capture_default_str();
  verify->add_option("--seed", vopts.seed, "Master seed")->capture_default_str();
  verify->add_option("--delta-sets", vopts.delta_sets,
                     "Random delta sets per dimension")
      ->capture_default_str();
  verify->add_option("--out", out_dir, "Output directory");

  std::vector<std::string> vary;
  auto* compare = app.add_subcommand("compare", "Compare config variants");
  compare->add_option("--config", config_path, "Base config file")->required();
  compare->add_option("--vary", vary, "Variant overrides key=value[,...]")
      ->take_all();
  compare->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return run_command(config_path, out_dir);
    if (*verify) return verify_command(vopts, out_dir);
    if (*compare) return compare_command(config_path, vary, out_dir);
  } catch (const fedscalar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fedscalar::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
