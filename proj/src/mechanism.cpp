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

#include "fedban/mechanism.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "fedban/error.hpp"

namespace fedban {
namespace {

constexpr double kInvE = 0.36787944117144233;

bool Meets(double coverage, double threshold) {
  return coverage >= threshold - kCoverageTolerance;
}

void CheckCosts(const CoverageOracle& oracle, std::span<const double> costs) {
  if (costs.size() != oracle.num_clients()) {
    Fail(ErrorCode::kDimensionMismatch, "one reported cost per client");
  }
}

// Best ratio among `pool`; returns N when no candidate has positive gain.
ClientId BestRatio(CoverageOracle& oracle, std::span<const double> costs,
                   ClientMask selected, ClientMask pool) {
  ClientId best = oracle.num_clients();
  double best_ratio = 0.0;
  for (ClientMask m = pool; m != 0; m &= m - 1) {
    const auto j = static_cast<ClientId>(std::countr_zero(m));
    const double gain = oracle.MarginalGain(selected, j);
    if (!(gain > 0.0)) continue;
    const double ratio = gain / costs[j];
    if (best == oracle.num_clients() || ratio > best_ratio) {
      best = j;
      best_ratio = ratio;
    }
  }
  return best;
}

SelectionResult Finish(CoverageOracle& oracle, std::vector<ClientId> order,
                       double beta) {
  SelectionResult r;
  r.mask = MaskOf(order);
  r.selected = std::move(order);
  r.coverage_achieved = oracle.Value(r.mask);
  r.original_threshold = OriginalThreshold(beta);
  r.relaxed_threshold = RelaxedThreshold(beta);
  return r;
}

void CheckBeta(double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    Fail(ErrorCode::kConfigInvalid, "beta must lie in (0, 1]");
  }
}

}  // namespace

std::string_view MechanismName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kTruthFedBan: return "truth_fedban";
    case MechanismKind::kVanillaGreedy: return "vanilla_greedy";
    case MechanismKind::kOrderedBudget: return "ordered_budget";
    case MechanismKind::kSelectAll: return "select_all";
    case MechanismKind::kNone: return "none";
  }
  return "unknown";
}

MechanismKind ParseMechanism(std::string_view name) {
  for (MechanismKind k :
       {MechanismKind::kTruthFedBan, MechanismKind::kVanillaGreedy,
        MechanismKind::kOrderedBudget, MechanismKind::kSelectAll,
        MechanismKind::kNone}) {
    if (MechanismName(k) == name) return k;
  }
  Fail(ErrorCode::kConfigInvalid,
       "mechanism: unknown value '" + std::string(name) + "'");
}

double OriginalThreshold(double beta) { return std::log(beta); }

double RelaxedThreshold(double beta) { return (1.0 - kInvE) * std::log(beta); }

double RuleThreshold(const MechanismParams& params) {
  switch (params.kind) {
    case MechanismKind::kVanillaGreedy: return OriginalThreshold(params.beta);
    case MechanismKind::kTruthFedBan:
    case MechanismKind::kOrderedBudget: return RelaxedThreshold(params.beta);
    case MechanismKind::kSelectAll:
    case MechanismKind::kNone: break;
  }
  return -std::numeric_limits<double>::infinity();
}

double SelectionResult::TotalCost(std::span<const double> costs) const {
  double total = 0.0;
  for (ClientId i : selected) total += costs[i];
  return total;
}

std::vector<ClientId> GreedyUnderBudget(CoverageOracle& oracle,
                                        std::span<const double> costs,
                                        double budget, ClientMask candidates) {
  CheckCosts(oracle, costs);
  candidates &= oracle.all();
  std::vector<ClientId> order;
  ClientMask selected = 0;
  double spent = 0.0;
  for (;;) {
    ClientMask affordable = 0;
    for (ClientMask m = candidates & ~selected; m != 0; m &= m - 1) {
      const auto j = static_cast<ClientId>(std::countr_zero(m));
      if (spent + costs[j] <= budget) affordable |= Bit(j);
    }
    const ClientId u = BestRatio(oracle, costs, selected, affordable);
    if (u == oracle.num_clients()) break;
    order.push_back(u);
    selected |= Bit(u);
    spent += costs[u];
  }
  return order;
}

SelectionResult TruthfulIncentiveSearch(CoverageOracle& oracle,
                                        std::span<const double> costs,
                                        double beta, double epsilon,
                                        ClientMask candidates,
                                        const GreedyFn& greedy) {
  CheckCosts(oracle, costs);
  CheckBeta(beta);
  if (!(epsilon > 0.0)) Fail(ErrorCode::kConfigInvalid, "epsilon must be > 0");
  candidates &= oracle.all();
  const double threshold = RelaxedThreshold(beta);

  double min_cost = std::numeric_limits<double>::infinity();
  double total_cost = 0.0;
  for (ClientId j : IdsOf(candidates)) {
    min_cost = std::min(min_cost, costs[j]);
    total_cost += costs[j];
  }

  // Budgets are drawn from the fixed lattice (1+eps)^k rather than from
  // min_cost * (1+eps)^k. Anchoring at the minimum report lets the cheapest
  // client shift every budget by changing its own report, which breaks
  // monotonicity. The start budget is the smallest lattice point >= min_cost.
  const double base = 1.0 + epsilon;
  long k = 0;
  if (candidates != 0) {
    k = static_cast<long>(std::ceil(std::log(min_cost) / std::log(base)));
    while (std::pow(base, k) < min_cost) ++k;
    while (std::pow(base, k - 1) >= min_cost) --k;
  }
  double budget = candidates == 0 ? 0.0 : std::pow(base, k);

  auto run = [&] {
    return greedy ? greedy(oracle, costs, budget, candidates)
                  : GreedyUnderBudget(oracle, costs, budget, candidates);
  };
  std::vector<ClientId> order;
  std::size_t iterations = 0;  // budget increases after the start budget
  if (!Meets(oracle.Value(0), threshold)) {
    if (candidates == 0) {
      Fail(ErrorCode::kInfeasible,
           "candidate set cannot reach the relaxed coverage threshold");
    }
    order = run();
    while (!Meets(oracle.Value(MaskOf(order)), threshold)) {
      if (budget >= total_cost) {
        Fail(ErrorCode::kInfeasible,
             "candidate set cannot reach the relaxed coverage threshold");
      }
      budget = std::pow(base, ++k);
      ++iterations;
      order = run();
    }
  }

  // The start budget is >= min_cost and greedy at any budget >= total cost
  // takes every useful candidate, so ceil(log_{1+eps}(total / min)) bounds
  // the number of increases.
  const auto bound = static_cast<std::size_t>(std::max(
      0.0, std::ceil(std::log(total_cost / min_cost) / std::log1p(epsilon) -
                     1e-9)));
  if (iterations > bound) {
    Fail(ErrorCode::kComplexityBoundExceeded,
         std::to_string(iterations) + " budget iterations > bound " +
             std::to_string(bound));
  }

  SelectionResult r = Finish(oracle, std::move(order), beta);
  r.terminating_budget = budget;
  r.iterations = iterations;
  return r;
}

SelectionResult VanillaGreedySearch(CoverageOracle& oracle,
                                    std::span<const double> costs, double beta,
                                    ClientMask candidates) {
  CheckCosts(oracle, costs);
  CheckBeta(beta);
  candidates &= oracle.all();
  const double threshold = OriginalThreshold(beta);
  std::vector<ClientId> order;
  ClientMask selected = 0;
  while (!Meets(oracle.Value(selected), threshold)) {
    const ClientId u = BestRatio(oracle, costs, selected, candidates & ~selected);
    if (u == oracle.num_clients()) {
      Fail(ErrorCode::kInfeasible,
           "candidate set cannot reach the coverage threshold");
    }
    order.push_back(u);
    selected |= Bit(u);
  }
  SelectionResult r = Finish(oracle, std::move(order), beta);
  r.iterations = r.selected.size();
  return r;
}

std::vector<double> OrderedBudget(CoverageOracle& oracle,
                                  std::span<const double> costs,
                                  ClientMask candidates) {
  CheckCosts(oracle, costs);
  candidates &= oracle.all();
  std::vector<double> budgets;
  ClientMask selected = 0;
  while ((candidates & ~selected) != 0) {
    ClientId u = BestRatio(oracle, costs, selected, candidates & ~selected);
    if (u == oracle.num_clients()) {
      // Only zero-gain candidates remain: every ratio is 0, lowest id wins.
      u = static_cast<ClientId>(std::countr_zero(candidates & ~selected));
    }
    selected |= Bit(u);
    budgets.push_back(costs[u]);
  }
  return budgets;
}

SelectionResult OrderedBudgetSearch(CoverageOracle& oracle,
                                    std::span<const double> costs, double beta,
                                    ClientMask candidates) {
  CheckCosts(oracle, costs);
  CheckBeta(beta);
  candidates &= oracle.all();
  const double threshold = RelaxedThreshold(beta);
  const std::vector<double> ranked = OrderedBudget(oracle, costs, candidates);
  std::vector<ClientId> order;
  double budget = 0.0;
  std::size_t k = 0;
  while (!Meets(oracle.Value(MaskOf(order)), threshold)) {
    if (k == ranked.size()) {
      Fail(ErrorCode::kInfeasible,
           "candidate set cannot reach the relaxed coverage threshold");
    }
    budget += ranked[k++];
    order = GreedyUnderBudget(oracle, costs, budget, candidates);
  }
  SelectionResult r = Finish(oracle, std::move(order), beta);
  r.terminating_budget = budget;
  r.iterations = k;
  return r;
}

SelectionResult RunSelection(const MechanismParams& params,
                             CoverageOracle& oracle,
                             std::span<const double> costs,
                             ClientMask candidates) {
  switch (params.kind) {
    case MechanismKind::kTruthFedBan:
      return TruthfulIncentiveSearch(oracle, costs, params.beta, params.epsilon,
                                     candidates);
    case MechanismKind::kVanillaGreedy:
      return VanillaGreedySearch(oracle, costs, params.beta, candidates);
    case MechanismKind::kOrderedBudget:
      return OrderedBudgetSearch(oracle, costs, params.beta, candidates);
    case MechanismKind::kSelectAll:
      return Finish(oracle, IdsOf(candidates & oracle.all()), params.beta);
    case MechanismKind::kNone:
      return Finish(oracle, {}, params.beta);
  }
  return Finish(oracle, {}, params.beta);
}

std::vector<ClientId> GreedyUnderBudget(const CoverageInstance& inst,
                                        double budget) {
  inst.Validate();
  CoverageOracle oracle(inst);
  return GreedyUnderBudget(oracle, inst.reported_costs, budget, oracle.all());
}

SelectionResult TruthfulIncentiveSearch(const CoverageInstance& inst,
                                        double epsilon) {
  inst.Validate();
  CoverageOracle oracle(inst);
  return TruthfulIncentiveSearch(oracle, inst.reported_costs, inst.beta,
                                 epsilon, oracle.all());
}

SelectionResult VanillaGreedySearch(const CoverageInstance& inst) {
  inst.Validate();
  CoverageOracle oracle(inst);
  return VanillaGreedySearch(oracle, inst.reported_costs, inst.beta,
                             oracle.all());
}

SelectionResult OrderedBudgetSearch(const CoverageInstance& inst) {
  inst.Validate();
  CoverageOracle oracle(inst);
  return OrderedBudgetSearch(oracle, inst.reported_costs, inst.beta,
                             oracle.all());
}

OptimalCover BruteForceOpt(const CoverageInstance& inst) {
  const std::size_t n = inst.num_clients();
  if (n > kMaxEnumerationClients) {
    Fail(ErrorCode::kTooManyClients,
         std::to_string(n) + " clients exceeds the enumeration limit of " +
             std::to_string(kMaxEnumerationClients));
  }
  inst.Validate();
  CoverageOracle oracle(inst);
  const double threshold = OriginalThreshold(inst.beta);

  bool found = false;
  OptimalCover best;
  int best_size = 0;
  for (ClientMask s = 0; s <= FullMask(n); ++s) {
    double cost = 0.0;
    for (ClientId j : IdsOf(s)) cost += inst.reported_costs[j];
    if (found && cost > best.cost) continue;
    if (!Meets(oracle.Value(s), threshold)) continue;
    const int size = std::popcount(s);
    std::vector<ClientId> ids = IdsOf(s);
    if (!found || cost < best.cost ||
        (cost == best.cost &&
         (size < best_size || (size == best_size && ids < best.selected)))) {
      found = true;
      best.cost = cost;
      best.selected = std::move(ids);
      best_size = size;
    }
  }
  if (!found) {
    Fail(ErrorCode::kInfeasible, "no subset reaches the coverage threshold");
  }
  return best;
}

}  // namespace fedban
