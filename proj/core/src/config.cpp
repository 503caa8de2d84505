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

#include "fedscalar/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fedscalar/errors.hpp"

namespace fedscalar {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("config: invalid value '" + std::string(value) +
                    "' for key '" + std::string(key) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [p, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || p != value.data() + value.size()) {
    bad_value(key, value);
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  const std::string v = lower(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, value);
}

std::vector<std::size_t> parse_sizes(std::string_view key,
                                     std::string_view value) {
  std::vector<std::size_t> out;
  std::string_view rest = value;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    out.push_back(parse_number<std::size_t>(key, item));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.empty()) bad_value(key, value);
  return out;
}

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw ConfigError("config: " + field + " " + why);
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  return algorithm == Algorithm::FedScalar ? "fedscalar" : "fedavg";
}

std::string_view to_string(DirectionMode mode) {
  return mode == DirectionMode::Seed ? "seed" : "full_vector";
}

void ExperimentConfig::validate() const {
  if (num_clients < 1) invalid("N", "must be >= 1");
  if (active_clients < 1 || active_clients > num_clients) {
    invalid("m", "must satisfy 1 <= m <= N");
  }
  if (rounds < 1) invalid("K", "must be >= 1");
  if (local_steps < 1) invalid("S", "must be >= 1");
  // alpha = 0 is accepted as a no-op run.
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    invalid("alpha", "must be finite and >= 0");
  }
  if (batch_size < 1) invalid("batch_size", "must be >= 1");
  if (batch_size > per_client) {
    invalid("batch_size", "must not exceed per_client");
  }
  if (per_client < 1) invalid("per_client", "must be >= 1");
  if (eval_every < 1) invalid("eval_every", "must be >= 1");
  if (layer_sizes.size() < 2 ||
      std::any_of(layer_sizes.begin(), layer_sizes.end(),
                  [](std::size_t s) { return s == 0; })) {
    invalid("layer_sizes", "needs >= 2 positive entries");
  }
  if (data_path.empty()) invalid("data_path", "must not be empty");
}

void apply_setting(ExperimentConfig& cfg, std::string_view raw_key,
                   std::string_view raw_value) {
  // Messages echo the key as written; matching is case-insensitive.
  const std::string_view name = trim(raw_key);
  const std::string key = lower(name);
  const std::string_view value = trim(raw_value);
  if (key == "algorithm") {
    const std::string v = lower(value);
    if (v == "fedscalar") {
      cfg.algorithm = Algorithm::FedScalar;
    } else if (v == "fedavg") {
      cfg.algorithm = Algorithm::FedAvg;
    } else {
      bad_value(name, value);
    }
  } else if (key == "dist") {
    const auto d = parse_distribution(value);
    if (!d) bad_value(name, value);
    cfg.dist = *d;
  } else if (key == "n") {
    cfg.num_clients = parse_number<int>(name, value);
  } else if (key == "m") {
    cfg.active_clients = parse_number<int>(name, value);
  } else if (key == "k") {
    cfg.rounds = parse_number<int>(name, value);
  } else if (key == "s") {
    cfg.local_steps = parse_number<int>(name, value);
  } else if (key == "alpha") {
    cfg.alpha = parse_number<double>(name, value);
  } else if (key == "batch_size") {
    cfg.batch_size = parse_number<std::size_t>(name, value);
  } else if (key == "layer_sizes") {
    cfg.layer_sizes = parse_sizes(name, value);
  } else if (key == "partition_scheme") {
    const auto s = parse_partition_scheme(value);
    if (!s) bad_value(name, value);
    cfg.partition_scheme = *s;
  } else if (key == "per_client") {
    cfg.per_client = parse_number<std::size_t>(name, value);
  } else if (key == "master_seed") {
    cfg.master_seed = parse_number<std::uint64_t>(name, value);
  } else if (key == "eval_every") {
    cfg.eval_every = parse_number<int>(name, value);
  } else if (key == "data_path") {
    if (value.empty()) bad_value(name, value);
    cfg.data_path = std::string(value);
  } else if (key == "divide_by_m") {
    cfg.divide_by_m = parse_bool(name, value);
  } else if (key == "direction_mode") {
    const std::string v = lower(value);
    if (v == "seed") {
      cfg.direction_mode = DirectionMode::Seed;
    } else if (v == "full_vector") {
      cfg.direction_mode = DirectionMode::FullVector;
    } else {
      bad_value(name, value);
    }
  } else {
    throw ConfigError("config: unknown key '" + std::string(name) + "'");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config: expected 'key = value' on line " +
                        std::to_string(line_no));
    }
    try {
      apply_setting(cfg, trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " (line " +
                        std::to_string(line_no) + ")");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  return parse_config(in);
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "algorithm = " << to_string(cfg.algorithm) << '\n'
      << "dist = " << to_string(cfg.dist) << '\n'
      << "N = " << cfg.num_clients << '\n'
      << "m = " << cfg.active_clients << '\n'
      << "K = " << cfg.rounds << '\n'
      << "S = " << cfg.local_steps << '\n'
      << "alpha = " << cfg.alpha << '\n'
      << "batch_size = " << cfg.batch_size << '\n'
      << "layer_sizes = ";
  for (std::size_t i = 0; i < cfg.layer_sizes.size(); ++i) {
    out << (i ? "," : "") << cfg.layer_sizes[i];
  }
  out << '\n'
      << "partition_scheme = " << to_string(cfg.partition_scheme) << '\n'
      << "per_client = " << cfg.per_client << '\n'
      << "master_seed = " << cfg.master_seed << '\n'
      << "eval_every = " << cfg.eval_every << '\n'
      << "data_path = " << cfg.data_path << '\n'
      << "divide_by_m = " << (cfg.divide_by_m ? "true" : "false") << '\n'
      << "direction_mode = " << to_string(cfg.direction_mode) << '\n';
  return out.str();
}

}  // namespace fedscalar
