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

#include "fedban/payments.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fedban/error.hpp"

namespace fedban {
namespace {

constexpr int kMaxBracketDoublings = 64;

bool SelectedWithReport(CoverageOracle& oracle, std::span<const double> costs,
                        const MechanismParams& rule, ClientId i,
                        double report) {
  std::vector<double> probe(costs.begin(), costs.end());
  probe[i] = report;
  return RunSelection(rule, oracle, probe, oracle.all()).Contains(i);
}

}  // namespace

const Payment* PaymentSchedule::Find(ClientId i) const {
  for (const Payment& p : payments) {
    if (p.client == i) return &p;
  }
  return nullptr;
}

double PaymentSchedule::TotalIncentive() const {
  double total = 0.0;
  for (const Payment& p : payments) total += p.amount;
  return total;
}

bool IsEssential(CoverageOracle& oracle, ClientId i, double threshold,
                 ClientMask candidates) {
  if (i >= oracle.num_clients()) {
    Fail(ErrorCode::kUnknownClientId, "client " + std::to_string(i));
  }
  const ClientMask rest = candidates & oracle.all() & ~Bit(i);
  return oracle.Value(rest) < threshold - kCoverageTolerance;
}

bool IsEssential(const CoverageInstance& inst, ClientId i, double threshold) {
  CoverageOracle oracle(inst);
  return IsEssential(oracle, i, threshold, oracle.all());
}

double MonopolyFreeBetaBound(double t, double arm_norm_bound, double ridge,
                             std::size_t dim) {
  const double d = static_cast<double>(dim);
  return std::exp(-d * std::log1p(t * arm_norm_bound * arm_norm_bound /
                                  (ridge * d)));
}

CriticalValue CriticalValueClosedForm(CoverageOracle& oracle,
                                      std::span<const double> costs,
                                      double beta, ClientId i) {
  const SelectionResult full =
      VanillaGreedySearch(oracle, costs, beta, oracle.all());
  if (!full.Contains(i)) {
    Fail(ErrorCode::kNotSelected, "client " + std::to_string(i));
  }
  CriticalValue cv;
  if (IsEssential(oracle, i, OriginalThreshold(beta), oracle.all())) {
    cv.essential = true;
    return cv;
  }
  const SelectionResult rerun =
      VanillaGreedySearch(oracle, costs, beta, oracle.all() & ~Bit(i));
  ClientMask prefix = 0;
  for (ClientId ik : rerun.selected) {
    const double gain_i = oracle.MarginalGain(prefix, i);
    const double gain_k = oracle.MarginalGain(prefix, ik);
    cv.value = std::max(cv.value, costs[ik] * gain_i / gain_k);
    prefix |= Bit(ik);
  }
  return cv;
}

CriticalValue CriticalValueClosedForm(const CoverageInstance& inst,
                                      ClientId i) {
  inst.Validate();
  CoverageOracle oracle(inst);
  return CriticalValueClosedForm(oracle, inst.reported_costs, inst.beta, i);
}

CriticalValue CriticalValueBisection(CoverageOracle& oracle,
                                     std::span<const double> costs,
                                     const MechanismParams& rule, ClientId i,
                                     double gamma) {
  if (!(gamma > 0.0)) Fail(ErrorCode::kConfigInvalid, "gamma must be > 0");
  if (i >= oracle.num_clients()) {
    Fail(ErrorCode::kUnknownClientId, "client " + std::to_string(i));
  }
  if (!RunSelection(rule, oracle, costs, oracle.all()).Contains(i)) {
    Fail(ErrorCode::kNotSelected, "client " + std::to_string(i));
  }
  CriticalValue cv;
  if (IsEssential(oracle, i, RuleThreshold(rule), oracle.all())) {
    cv.essential = true;
    return cv;
  }

  const SelectionResult without =
      RunSelection(rule, oracle, costs, oracle.all() & ~Bit(i));
  double high = 0.0;
  if (without.terminating_budget) {
    high = *without.terminating_budget;
  } else {
    for (ClientId j = 0; j < costs.size(); ++j) {
      if (j != i) high += costs[j];
    }
  }
  if (!(high > 0.0)) high = costs[i];
  int doublings = 0;
  while (SelectedWithReport(oracle, costs, rule, i, high)) {
    if (++doublings > kMaxBracketDoublings) {
      Fail(ErrorCode::kNonMonotoneDetected,
           "client " + std::to_string(i) + " stays selected at every report");
    }
    high *= 2.0;
  }
  cv.upper_bracket = high;

  // Reports known to be included / excluded; the true report is included by
  // the precondition above.
  double highest_included = costs[i];
  double lowest_excluded = high;
  double low = 0.0;
  while ((high - low) / 2.0 >= gamma) {
    const double mid = (low + high) / 2.0;
    ++cv.iterations;
    if (SelectedWithReport(oracle, costs, rule, i, mid)) {
      if (mid > lowest_excluded) {
        Fail(ErrorCode::kNonMonotoneDetected,
             "client " + std::to_string(i) + " included at a report above " +
                 "one where it was excluded");
      }
      highest_included = std::max(highest_included, mid);
      low = mid;
    } else {
      if (mid < highest_included) {
        Fail(ErrorCode::kNonMonotoneDetected,
             "client " + std::to_string(i) + " excluded at a report below " +
                 "one where it was included");
      }
      lowest_excluded = std::min(lowest_excluded, mid);
      high = mid;
    }
  }
  cv.value = (low + high) / 2.0;
  return cv;
}

CriticalValue CriticalValueBisection(const CoverageInstance& inst,
                                     const MechanismParams& rule, ClientId i,
                                     double gamma) {
  inst.Validate();
  CoverageOracle oracle(inst);
  return CriticalValueBisection(oracle, inst.reported_costs, rule, i, gamma);
}

PaymentSchedule SettleRound(const SelectionResult& selection,
                            CoverageOracle& oracle,
                            std::span<const double> costs,
                            const MechanismParams& rule, double gamma,
                            double surrogate) {
  PaymentSchedule schedule;
  schedule.surrogate_for_essential = surrogate;
  schedule.tolerance = gamma;
  for (ClientId i : selection.selected) {
    Payment p;
    p.client = i;
    switch (rule.kind) {
      case MechanismKind::kNone:
        continue;
      case MechanismKind::kSelectAll:
        p.amount = costs[i];
        break;
      case MechanismKind::kVanillaGreedy: {
        const CriticalValue cv =
            CriticalValueClosedForm(oracle, costs, rule.beta, i);
        p.essential = cv.essential;
        p.amount = cv.essential ? surrogate : cv.value;
        break;
      }
      case MechanismKind::kTruthFedBan:
      case MechanismKind::kOrderedBudget: {
        const CriticalValue cv =
            CriticalValueBisection(oracle, costs, rule, i, gamma);
        p.essential = cv.essential;
        p.amount = cv.essential ? surrogate : cv.value;
        break;
      }
    }
    schedule.payments.push_back(p);
  }
  return schedule;
}

}  // namespace fedban
