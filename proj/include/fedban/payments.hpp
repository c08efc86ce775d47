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

#ifndef FEDBAN_PAYMENTS_HPP_
#define FEDBAN_PAYMENTS_HPP_

// Critical-value payments. A selected client is paid the largest report at
// which it would still be selected, computed from the other clients'
// reports only: in closed form for the vanilla greedy rule and by bisection
// for the budgeted rules. A client without whom the threshold is unreachable
// is essential and its critical value is unbounded.

#include <cstddef>
#include <span>
#include <vector>

#include "fedban/coverage.hpp"
#include "fedban/mechanism.hpp"

namespace fedban {

inline constexpr double kDefaultEssentialSurrogate = 1e4;

struct CriticalValue {
  bool essential = false;
  double value = 0.0;  // meaningless when essential
  std::size_t iterations = 0;  // bisection probes inside the bracket
  double upper_bracket = 0.0;  // H the bisection started from
};

struct Payment {
  ClientId client = 0;
  bool essential = false;
  double amount = 0.0;  // surrogate value when essential
};

struct PaymentSchedule {
  std::vector<Payment> payments;  // one per selected client, selection order
  double surrogate_for_essential = kDefaultEssentialSurrogate;
  double tolerance = 0.0;

  const Payment* Find(ClientId i) const;
  double TotalIncentive() const;
};

// True iff g(candidates \ {i}) < threshold, i.e. no subset without i can
// reach it.
bool IsEssential(CoverageOracle& oracle, ClientId i, double threshold,
                 ClientMask candidates);
bool IsEssential(const CoverageInstance& inst, ClientId i, double threshold);

// (1 + t L^2 / (lambda d))^-d: any beta at or below it leaves no client
// essential at step t.
double MonopolyFreeBetaBound(double t, double arm_norm_bound, double ridge,
                             std::size_t dim);

// max_k cost(i_k) * gain(i | S'_{k-1}) / gain(i_k | S'_{k-1}) over the
// vanilla-greedy rerun S' = (i_1, ..., i_K) without i. Throws NotSelected
// unless vanilla greedy selects i on the full candidate set.
CriticalValue CriticalValueClosedForm(CoverageOracle& oracle,
                                      std::span<const double> costs,
                                      double beta, ClientId i);
CriticalValue CriticalValueClosedForm(const CoverageInstance& inst,
                                      ClientId i);

// Bisection on i's report over [0, H], H the terminating budget of the rule
// run without i (doubled until i is excluded at H, for rules where that
// budget does not bound the threshold). Stops once (H - L) / 2 < gamma and
// returns the bracket midpoint. Throws NotSelected, and
// NonMonotoneDetected if a lower report is ever excluded while a higher one
// was included.
CriticalValue CriticalValueBisection(CoverageOracle& oracle,
                                     std::span<const double> costs,
                                     const MechanismParams& rule, ClientId i,
                                     double gamma);
CriticalValue CriticalValueBisection(const CoverageInstance& inst,
                                     const MechanismParams& rule, ClientId i,
                                     double gamma);

// Pays every selected client its critical value (closed form for vanilla
// greedy, bisection for the budgeted rules). select_all pays each client its
// report; none pays nobody.
PaymentSchedule SettleRound(const SelectionResult& selection,
                            CoverageOracle& oracle,
                            std::span<const double> costs,
                            const MechanismParams& rule, double gamma,
                            double surrogate);

}  // namespace fedban

#endif  // FEDBAN_PAYMENTS_HPP_
