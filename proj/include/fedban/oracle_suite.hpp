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

#ifndef FEDBAN_ORACLE_SUITE_HPP_
#define FEDBAN_ORACLE_SUITE_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fedban/config.hpp"
#include "fedban/coverage.hpp"
#include "fedban/mechanism.hpp"

namespace fedban {

// Random instance with 2..max_clients clients in dimension 1..max_dim,
// reports in [1, 100], some zero deltas, and beta chosen so that the
// threshold falls strictly between g(empty) and 0 when g(empty) < 0.
CoverageInstance RandomInstance(std::mt19937_64& rng, std::size_t max_clients,
                                std::size_t max_dim);

// State after `t` pulls of arms with norm <= arm_norm_bound, split at random
// between the synced matrix and the clients' deltas. beta is left at 0.5.
CoverageInstance RandomProtocolState(std::mt19937_64& rng,
                                     std::size_t num_clients, std::size_t dim,
                                     std::size_t t, double arm_norm_bound,
                                     double ridge);

std::string InstanceToJson(const CoverageInstance& inst);
CoverageInstance InstanceFromJson(const std::string& json_text);

struct PropertyResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t passed = 0;
  std::vector<std::string> counterexamples;  // JSON, at most a few

  bool ok() const { return passed == checked; }
};

struct OracleReport {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<PropertyResult> properties;

  bool ok() const;
  const PropertyResult* Find(const std::string& name) const;
  std::string ToJson() const;
};

// Grid tolerance used by the bisection-agreement property (report units).
inline constexpr double kBisectionCheckGamma = 1.0;

// Checks, per random instance: submodularity, budget_monotonicity,
// budget_respect, selection_monotonicity, bi_criteria, truthfulness,
// individual_rationality, bisection_agreement, complexity_bound and
// monopoly_elimination. `greedy`, when set, replaces the budgeted greedy in
// the checks that exercise it (mutation testing).
OracleReport RunOracleSuite(const OracleSettings& settings,
                            const GreedyFn& greedy = {});

}  // namespace fedban

#endif  // FEDBAN_ORACLE_SUITE_HPP_
