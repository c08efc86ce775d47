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

#ifndef FEDBAN_MECHANISM_HPP_
#define FEDBAN_MECHANISM_HPP_

// Participant selection over the coverage function: the budgeted greedy
// subroutine, the (1 + eps) budget-doubling truthful search, the vanilla
// unbudgeted greedy, the ordered-budget variant, and an exhaustive optimum
// for small instances.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedban/coverage.hpp"

namespace fedban {

enum class MechanismKind {
  kTruthFedBan,
  kVanillaGreedy,
  kOrderedBudget,
  kSelectAll,
  kNone,
};

std::string_view MechanismName(MechanismKind kind);
// Throws ConfigInvalid for unknown names.
MechanismKind ParseMechanism(std::string_view name);

struct MechanismParams {
  MechanismKind kind = MechanismKind::kTruthFedBan;
  double beta = 0.5;
  double epsilon = 1.0;
};

// log(beta), the constraint of the exact cover problem.
double OriginalThreshold(double beta);
// (1 - 1/e) log(beta), the threshold the budgeted searches stop at.
double RelaxedThreshold(double beta);
// The threshold a rule's own termination test uses.
double RuleThreshold(const MechanismParams& params);

struct SelectionResult {
  std::vector<ClientId> selected;  // in the order clients were added
  ClientMask mask = 0;
  std::optional<double> terminating_budget;
  double coverage_achieved = 0.0;
  std::size_t iterations = 0;
  double original_threshold = 0.0;
  double relaxed_threshold = 0.0;

  bool Contains(ClientId i) const { return fedban::Contains(mask, i); }
  double TotalCost(std::span<const double> costs) const;
};

// Budgeted greedy subroutine. Repeatedly adds the affordable candidate with
// the largest marginal-gain / cost ratio, where j is affordable when
// cost(S) + cost_j <= budget. Zero-gain candidates are never added; ratio
// ties go to the lowest id.
std::vector<ClientId> GreedyUnderBudget(CoverageOracle& oracle,
                                        std::span<const double> costs,
                                        double budget, ClientMask candidates);

using GreedyFn = std::function<std::vector<ClientId>(
    CoverageOracle&, std::span<const double>, double, ClientMask)>;

// Runs greedy at the start budget, the smallest lattice point (1+eps)^k >=
// min candidate cost, then at each following lattice point until the relaxed
// threshold is reached. `iterations` counts budget increases. Throws
// Infeasible when the whole candidate set cannot reach the threshold, and
// ComplexityBoundExceeded past ceil(log_{1+eps}(sum cost / min cost))
// increases.
SelectionResult TruthfulIncentiveSearch(CoverageOracle& oracle,
                                        std::span<const double> costs,
                                        double beta, double epsilon,
                                        ClientMask candidates,
                                        const GreedyFn& greedy = {});

// Unbudgeted ratio greedy until g(S) >= log(beta).
SelectionResult VanillaGreedySearch(CoverageOracle& oracle,
                                    std::span<const double> costs, double beta,
                                    ClientMask candidates);

// Cost sequence from ranking every candidate by unbudgeted greedy.
std::vector<double> OrderedBudget(CoverageOracle& oracle,
                                  std::span<const double> costs,
                                  ClientMask candidates);

// Grows the budget by successive ranked costs until greedy reaches the
// relaxed threshold.
SelectionResult OrderedBudgetSearch(CoverageOracle& oracle,
                                    std::span<const double> costs, double beta,
                                    ClientMask candidates);

// Dispatch on the rule. kSelectAll picks every candidate; kNone picks none.
SelectionResult RunSelection(const MechanismParams& params,
                             CoverageOracle& oracle,
                             std::span<const double> costs,
                             ClientMask candidates);

// Instance-level conveniences over all clients.
std::vector<ClientId> GreedyUnderBudget(const CoverageInstance& inst,
                                        double budget);
SelectionResult TruthfulIncentiveSearch(const CoverageInstance& inst,
                                        double epsilon);
SelectionResult VanillaGreedySearch(const CoverageInstance& inst);
SelectionResult OrderedBudgetSearch(const CoverageInstance& inst);

struct OptimalCover {
  std::vector<ClientId> selected;  // ascending ids
  double cost = 0.0;
};

inline constexpr std::size_t kMaxEnumerationClients = 20;

// Exhaustive minimum-cost subset with g(S) >= log(beta). Ties go to the
// smaller set, then the lexicographically smaller id list. Throws
// TooManyClients above kMaxEnumerationClients.
OptimalCover BruteForceOpt(const CoverageInstance& inst);

}  // namespace fedban

#endif  // FEDBAN_MECHANISM_HPP_
