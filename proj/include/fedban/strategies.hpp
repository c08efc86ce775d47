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

#ifndef FEDBAN_STRATEGIES_HPP_
#define FEDBAN_STRATEGIES_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fedban/coverage.hpp"

namespace fedban {

enum class StrategyKind { kTruthful, kMultiplicative, kFixed };

struct ReportingStrategy {
  StrategyKind kind = StrategyKind::kTruthful;
  double factor = 1.0;       // kMultiplicative
  double fixed_value = 0.0;  // kFixed
  std::size_t applies_from_step = 0;

  static ReportingStrategy Truthful() { return {}; }
  static ReportingStrategy Multiplicative(double factor,
                                          std::size_t from_step = 0) {
    return {StrategyKind::kMultiplicative, factor, 0.0, from_step};
  }
  static ReportingStrategy Fixed(double value, std::size_t from_step = 0) {
    return {StrategyKind::kFixed, 1.0, value, from_step};
  }

  bool IsTruthful() const { return kind == StrategyKind::kTruthful; }
  std::string Label() const;
};

// The cost a client reports at step t. Strategies report truthfully before
// applies_from_step. Throws NonPositiveReport for a non-positive result.
double MakeReport(const ReportingStrategy& strategy, double true_cost,
                  std::size_t t);

enum class MisreportDirection { kUnder, kOver };

std::string_view DirectionName(MisreportDirection direction);
MisreportDirection ParseDirection(std::string_view name);

// floor(ratio * n) clients, chosen by a seeded shuffle, misreport by
// `factor`; the rest are truthful. An under-reporting factor must be < 1 and
// an over-reporting one > 1.
std::vector<ReportingStrategy> AssignPopulation(std::size_t n, double ratio,
                                                MisreportDirection direction,
                                                double factor,
                                                std::uint64_t seed);

struct ClientLedger {
  double incentives = 0.0;
  double cost = 0.0;  // true participation cost actually incurred
  double utility = 0.0;
  double regret = 0.0;
  std::size_t rounds_selected = 0;
};

// Per-client cumulative accounting; utility = incentives - cost.
class UtilityLedger {
 public:
  explicit UtilityLedger(std::size_t num_clients) : clients_(num_clients) {}

  // Adds payment - true_cost to the client's utility when it was selected;
  // unselected clients are untouched.
  void RecordRound(ClientId i, bool selected, double payment,
                   double true_cost);
  void RecordRegret(ClientId i, double regret) { clients_[i].regret += regret; }

  std::size_t size() const { return clients_.size(); }
  const ClientLedger& operator[](ClientId i) const { return clients_[i]; }

 private:
  std::vector<ClientLedger> clients_;
};

}  // namespace fedban

#endif  // FEDBAN_STRATEGIES_HPP_
