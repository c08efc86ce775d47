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

#include "fedban/strategies.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "fedban/error.hpp"
#include "fedban/rng.hpp"

namespace fedban {

std::string ReportingStrategy::Label() const {
  switch (kind) {
    case StrategyKind::kTruthful: return "truthful";
    case StrategyKind::kMultiplicative: {
      std::string s = std::to_string(factor);
      s.erase(s.find_last_not_of('0') + 1);
      if (!s.empty() && s.back() == '.') s.pop_back();
      return "x" + s;
    }
    case StrategyKind::kFixed: return "fixed_" + std::to_string(fixed_value);
  }
  return "unknown";
}

double MakeReport(const ReportingStrategy& strategy, double true_cost,
                  std::size_t t) {
  double report = true_cost;
  if (t >= strategy.applies_from_step) {
    switch (strategy.kind) {
      case StrategyKind::kTruthful: break;
      case StrategyKind::kMultiplicative:
        report = strategy.factor * true_cost;
        break;
      case StrategyKind::kFixed:
        report = strategy.fixed_value;
        break;
    }
  }
  if (!(report > 0.0)) {
    Fail(ErrorCode::kNonPositiveReport,
         "strategy " + strategy.Label() + " reported " + std::to_string(report));
  }
  return report;
}

std::string_view DirectionName(MisreportDirection direction) {
  return direction == MisreportDirection::kUnder ? "under" : "over";
}

MisreportDirection ParseDirection(std::string_view name) {
  if (name == "under") return MisreportDirection::kUnder;
  if (name == "over") return MisreportDirection::kOver;
  Fail(ErrorCode::kConfigInvalid,
       "direction: expected 'under' or 'over', got '" + std::string(name) + "'");
}

std::vector<ReportingStrategy> AssignPopulation(std::size_t n, double ratio,
                                                MisreportDirection direction,
                                                double factor,
                                                std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    Fail(ErrorCode::kConfigInvalid, "misreport ratio must lie in [0, 1]");
  }
  if (!(factor > 0.0) ||
      (direction == MisreportDirection::kUnder && !(factor < 1.0)) ||
      (direction == MisreportDirection::kOver && !(factor > 1.0))) {
    Fail(ErrorCode::kConfigInvalid,
         "misreport factor " + std::to_string(factor) +
             " does not match direction " + std::string(DirectionName(direction)));
  }
  std::vector<ClientId> order(n);
  std::iota(order.begin(), order.end(), ClientId{0});
  auto engine = MakeEngine(seed, Stream::kPopulation, 0);
  for (std::size_t k = n; k > 1; --k) {
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    std::swap(order[k - 1], order[pick(engine)]);
  }
  const auto liars =
      static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  std::vector<ReportingStrategy> out(n, ReportingStrategy::Truthful());
  for (std::size_t k = 0; k < liars; ++k) {
    out[order[k]] = ReportingStrategy::Multiplicative(factor);
  }
  return out;
}

void UtilityLedger::RecordRound(ClientId i, bool selected, double payment,
                                double true_cost) {
  if (!selected) return;
  ClientLedger& c = clients_[i];
  c.incentives += payment;
  c.cost += true_cost;
  c.utility += payment - true_cost;
  ++c.rounds_selected;
}

}  // namespace fedban
