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

#ifndef FEDBAN_EXPERIMENTS_HPP_
#define FEDBAN_EXPERIMENTS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fedban/config.hpp"
#include "fedban/protocol.hpp"

namespace fedban {

inline constexpr std::array<std::string_view, 4> kMetricNames{
    "regret", "communication", "incentive", "social_cost"};
inline constexpr std::size_t kNumMetrics = kMetricNames.size();

const std::vector<double>& MetricSeries(const RunMetrics& metrics,
                                        std::size_t metric);

// Runs task(0..count-1) on at most `workers` threads (0: hardware
// concurrency). If tasks throw, the exception of the lowest index is
// rethrown after all workers stop.
void RunParallel(std::size_t count, std::size_t workers,
                 const std::function<void(std::size_t)>& task);

struct SeriesSummary {
  std::vector<double> mean;
  std::vector<double> std;  // population standard deviation over seeds
};

SeriesSummary Summarize(const std::vector<const std::vector<double>*>& runs);

struct SeedRun {
  std::uint64_t seed = 0;
  RunMetrics metrics;
  std::vector<RoundRecord> rounds;  // kept only when the config asks for it
};

struct VariantSummary {
  std::string label;
  std::vector<SeedRun> runs;                            // in seed order
  std::array<SeriesSummary, kNumMetrics> series;

  // Seed-mean of the last value of a metric (0 when T = 0).
  double FinalMean(std::size_t metric) const;
  double MeanRounds() const;
};

// One simulation per config, executed on the worker pool; results keep the
// order of `configs`.
std::vector<SeedRun> RunBatch(const std::vector<SimulationConfig>& configs,
                              std::size_t workers);

VariantSummary Summarize(std::string label, std::vector<SeedRun> runs);

// The configured mechanism (sim.mechanism) over every seed.
VariantSummary RunSingle(const ExperimentConfig& config);

// Every mechanism in config.mechanisms over the same seeds.
std::vector<VariantSummary> RunComparison(const ExperimentConfig& config);

struct MicroRow {
  MechanismKind mechanism = MechanismKind::kTruthFedBan;
  std::string strategy;  // "truthful" or "x<factor>"
  double factor = 1.0;
  // Seed means for the designated client.
  double regret = 0.0;
  double incentive = 0.0;
  double utility = 0.0;
  // Divided by the truthful row of the same mechanism.
  double norm_regret = 1.0;
  double norm_incentive = 1.0;
  double norm_utility = 1.0;
  // Seeds where utility exceeded truthful utility + 2 gamma P, P the larger
  // round count of the two runs.
  std::size_t utility_violations = 0;
};

struct MicroResult {
  ClientId client = 0;
  std::vector<MicroRow> rows;
};

MicroResult RunMicroStudy(const ExperimentConfig& config);

struct MacroCell {
  MisreportDirection direction = MisreportDirection::kUnder;
  double ratio = 0.0;
  std::size_t misreporters = 0;
  VariantSummary summary;
};

// sim.mechanism under every (direction, ratio) cell; the misreporting
// population of each seed is drawn with that seed.
std::vector<MacroCell> RunMacroStudy(const ExperimentConfig& config);

std::string MacroCellLabel(const MacroCell& cell);

// Output trees. Each writes config.json plus the files listed in the README.
void WriteRunOutputs(const std::filesystem::path& dir,
                     const ExperimentConfig& config,
                     const std::vector<VariantSummary>& variants);
void WriteMicroOutputs(const std::filesystem::path& dir,
                       const ExperimentConfig& config,
                       const MicroResult& result);
void WriteMacroOutputs(const std::filesystem::path& dir,
                       const ExperimentConfig& config,
                       const std::vector<MacroCell>& cells);

}  // namespace fedban

#endif  // FEDBAN_EXPERIMENTS_HPP_
