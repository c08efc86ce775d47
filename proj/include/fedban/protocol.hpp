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

#ifndef FEDBAN_PROTOCOL_HPP_
#define FEDBAN_PROTOCOL_HPP_

// The incentivized federated communication protocol: clients act locally
// and fire a determinant-ratio trigger; a triggered round uploads every
// client's dV, runs the selection rule on cost reports, absorbs the
// participants' statistics on the server, settles critical-value payments
// and broadcasts the per-client catch-up buffers.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedban/bandit_env.hpp"
#include "fedban/linalg.hpp"
#include "fedban/mechanism.hpp"
#include "fedban/payments.hpp"
#include "fedban/strategies.hpp"

namespace fedban {

enum class Arrival { kRoundRobin, kUniform };

struct SimulationConfig {
  std::size_t horizon = 6250;  // T
  std::size_t num_clients = 25;
  std::size_t dim = 5;
  std::size_t arms_per_step = 20;
  double noise_sigma = 0.1;
  double ridge = 1.0;
  double delta = 0.1;
  double arm_norm_bound = 1.0;
  MechanismParams mechanism{};
  double gamma = 1.0;
  double cost_weight = 1e-4;
  double intrinsic_cost_min = 0.0;
  double intrinsic_cost_max = 100.0;
  // nullopt evaluates DefaultCommThreshold; +inf disables communication.
  std::optional<double> comm_threshold;
  double essential_surrogate = kDefaultEssentialSurrogate;
  Arrival arrival = Arrival::kRoundRobin;
  std::vector<ReportingStrategy> strategies;  // empty: everyone truthful
  std::uint64_t seed = 0;
  bool keep_round_log = true;

  // Throws ConfigInvalid naming the first offending field.
  void Validate() const;
  double ResolvedCommThreshold() const;
};

struct ClientState {
  ClientId id = 0;
  SymMatrix v;        // V_i: local copy of all statistics known to i
  Vector b;
  SymMatrix delta_v;  // dV_i: not yet absorbed by the server
  Vector delta_b;
  std::size_t delta_t = 0;
  double cost_weight = 0.0;
  double intrinsic_cost = 0.0;
  ReportingStrategy strategy;

  ClientState() = default;
  ClientState(ClientId id, std::size_t dim, double cost_weight,
              double intrinsic_cost, ReportingStrategy strategy);

  // w * det(dV_i) + C_i, determinant taken without a ridge.
  double TrueCost() const;
};

struct ServerState {
  SymMatrix v;
  Vector b;
  std::vector<SymMatrix> outbox_v;  // dV_{-j}
  std::vector<Vector> outbox_b;
  double incentive_cost = 0.0;
  double social_cost = 0.0;
  std::uint64_t scalars_transferred = 0;  // C_T
  std::uint64_t control_scalars = 0;      // reports and payments, not in C_T
  std::size_t rounds = 0;                 // P

  ServerState() = default;
  ServerState(std::size_t num_clients, std::size_t dim);
};

struct RoundRecord {
  std::size_t index = 0;
  std::size_t trigger_step = 0;
  ClientId trigger_client = 0;
  std::vector<double> true_costs;
  std::vector<double> reports;
  SelectionResult selection;
  PaymentSchedule payments;
  std::uint64_t scalars_up = 0;
  std::uint64_t scalars_down = 0;
  std::uint64_t control_scalars = 0;
  double social_cost_increment = 0.0;
  double incentive_increment = 0.0;
};

// N d^2 + |S| d up, N (d^2 + d) down.
std::uint64_t RoundScalars(std::size_t num_clients, std::size_t dim,
                           std::size_t num_selected);

void LocalStep(ClientState& client, const StepObservation& obs);

// delta_t * (log det(V_i + lambda I) - log det(V_i - dV_i + lambda I)) > D_c.
bool TriggerFired(const ClientState& client, double ridge, double threshold);

// T / (N^2 d log T) - sqrt(T^2 / (N^2 d R log T)) * (1 - 1/e) log(beta) with
// R = ceil(d log(1 + T / (lambda d))). Requires T >= 3.
double DefaultCommThreshold(std::size_t horizon, std::size_t num_clients,
                            std::size_t dim, double ridge, double beta);

struct RoundSettings {
  MechanismParams mechanism;
  double gamma = 1.0;
  double essential_surrogate = kDefaultEssentialSurrogate;
  double ridge = 1.0;
};

// One full communication round. Either every state change is applied or,
// on error, none is.
RoundRecord RunCommunicationRound(ServerState& server,
                                  std::vector<ClientState>& clients,
                                  const RoundSettings& settings,
                                  std::size_t step, ClientId trigger_client);

struct RunMetrics {
  // Per step t = 1..T (index t - 1), all cumulative.
  std::vector<double> regret;
  std::vector<double> communication;
  std::vector<double> incentive;
  std::vector<double> social_cost;
  std::vector<double> client_utility;  // final, per client
  std::vector<double> client_incentive;
  std::vector<double> client_regret;
  std::size_t rounds = 0;
  std::uint64_t control_scalars = 0;
  double comm_threshold = 0.0;
};

struct SimulationResult {
  RunMetrics metrics;
  std::vector<RoundRecord> rounds;  // empty unless keep_round_log
  UtilityLedger ledger{0};
  ServerState server;
  std::vector<ClientState> clients;
};

// Executes T steps. Fully deterministic given the config (including seed).
SimulationResult RunSimulation(const SimulationConfig& config);

// One JSON object per line; schema in docs/round_log.md.
std::string RoundRecordToJson(const RoundRecord& record);

}  // namespace fedban

#endif  // FEDBAN_PROTOCOL_HPP_
