// Copyright 2026 The Authors.
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

#ifndef FEDBAN_CONFIG_HPP_
#define FEDBAN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fedban/mechanism.hpp"
#include "fedban/protocol.hpp"
#include "fedban/strategies.hpp"

namespace fedban {

struct StrategyEntry {
  ClientId client = 0;
  ReportingStrategy strategy;
};

struct MicroSettings {
  ClientId client = 0;  // the designated misreporter
  std::vector<double> factors{0.1, 0.5, 2.0, 10.0};
  std::vector<MechanismKind> mechanisms{MechanismKind::kTruthFedBan,
                                        MechanismKind::kVanillaGreedy};
};

struct MacroSettings {
  std::vector<double> ratios{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<MisreportDirection> directions{MisreportDirection::kUnder,
                                             MisreportDirection::kOver};
  double under_factor = 0.5;
  double over_factor = 2.0;
};

struct OracleSettings {
  std::size_t trials = 200;
  std::size_t max_clients = 8;
  std::size_t max_dim = 3;
  double gamma = 1e-6;
  double epsilon = 1.0;
  std::uint64_t seed = 0;
};

// One experiment document. `sim` carries the per-run parameters; seed,
// mechanism and strategies in it are overwritten per work item.
struct ExperimentConfig {
  SimulationConfig sim;
  std::vector<MechanismKind> mechanisms{MechanismKind::kTruthFedBan,
                                        MechanismKind::kVanillaGreedy,
                                        MechanismKind::kSelectAll};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<StrategyEntry> strategies;
  MicroSettings micro;
  MacroSettings macro;
  OracleSettings oracle;
  std::size_t workers = 0;  // 0: hardware concurrency
  bool round_log = false;

  void Validate() const;

  // sim with the given seed/mechanism and the configured strategy entries.
  SimulationConfig ForRun(MechanismKind mechanism, std::uint64_t seed) const;
};

// Throws ConfigInvalid naming the offending key. Unknown keys are rejected.
ExperimentConfig ParseConfig(std::string_view json_text);
// Io when the file cannot be read; ConfigInvalid (prefixed with the path)
// when its content is bad.
ExperimentConfig LoadConfigFile(const std::string& path);
// Canonical JSON with every field spelled out; ParseConfig round-trips it.
std::string ConfigToJson(const ExperimentConfig& config);

}  // namespace fedban

#endif  // FEDBAN_CONFIG_HPP_
