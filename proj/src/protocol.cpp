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

#include "fedban/protocol.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

#include "fedban/error.hpp"
#include "fedban/rng.hpp"
#include "json.hpp"

namespace fedban {
namespace {

constexpr double kInvE = 0.36787944117144233;

void Require(bool ok, const char* field, const std::string& why) {
  if (!ok) Fail(ErrorCode::kConfigInvalid, std::string(field) + ": " + why);
}

}  // namespace

void SimulationConfig::Validate() const {
  Require(num_clients >= 1, "N", "must be >= 1");
  Require(num_clients <= kMaxClients, "N",
          "must be <= " + std::to_string(kMaxClients));
  Require(dim >= 1, "d", "must be >= 1");
  Require(arms_per_step >= 1, "K", "must be >= 1");
  Require(noise_sigma >= 0.0, "sigma", "must be >= 0");
  Require(ridge > 0.0, "lambda", "must be > 0");
  Require(delta > 0.0 && delta < 1.0, "delta", "must lie in (0, 1)");
  Require(arm_norm_bound > 0.0, "L", "must be > 0");
  Require(mechanism.beta > 0.0 && mechanism.beta <= 1.0, "beta",
          "must lie in (0, 1]");
  Require(mechanism.epsilon > 0.0, "epsilon", "must be > 0");
  Require(gamma > 0.0, "gamma", "must be > 0");
  Require(cost_weight >= 0.0, "w", "must be >= 0");
  Require(intrinsic_cost_min >= 0.0, "intrinsic_cost_min", "must be >= 0");
  Require(intrinsic_cost_max > intrinsic_cost_min, "intrinsic_cost_max",
          "must exceed intrinsic_cost_min");
  Require(essential_surrogate > 0.0, "essential_surrogate", "must be > 0");
  Require(strategies.empty() || strategies.size() == num_clients, "strategies",
          "needs one entry per client");
  if (comm_threshold) {
    Require(*comm_threshold >= 0.0, "D_c", "must be >= 0");
  } else {
    Require(horizon == 0 || horizon >= 3, "D_c",
            "\"auto\" needs T >= 3 (log T > 1)");
  }
}

double SimulationConfig::ResolvedCommThreshold() const {
  if (comm_threshold) return *comm_threshold;
  if (horizon == 0) return std::numeric_limits<double>::infinity();
  return DefaultCommThreshold(horizon, num_clients, dim, ridge,
                              mechanism.beta);
}

ClientState::ClientState(ClientId client_id, std::size_t dim,
                         double weight, double intrinsic,
                         ReportingStrategy reporting)
    : id(client_id),
      v(dim),
      b(dim),
      delta_v(dim),
      delta_b(dim),
      cost_weight(weight),
      intrinsic_cost(intrinsic),
      strategy(reporting) {}

double ClientState::TrueCost() const {
  return cost_weight * Determinant(delta_v) + intrinsic_cost;
}

ServerState::ServerState(std::size_t num_clients, std::size_t dim)
    : v(dim),
      b(dim),
      outbox_v(num_clients, SymMatrix(dim)),
      outbox_b(num_clients, Vector(dim)) {}

std::uint64_t RoundScalars(std::size_t num_clients, std::size_t dim,
                           std::size_t num_selected) {
  const std::uint64_t n = num_clients, d = dim, s = num_selected;
  return n * d * d + s * d + n * (d * d + d);
}

void LocalStep(ClientState& client, const StepObservation& obs) {
  client.v.AddOuter(obs.chosen_arm);
  client.delta_v.AddOuter(obs.chosen_arm);
  Vector xy = obs.chosen_arm;
  xy *= obs.reward;
  client.b += xy;
  client.delta_b += xy;
  ++client.delta_t;
}

bool TriggerFired(const ClientState& client, double ridge, double threshold) {
  if (client.delta_t == 0 || client.delta_v.IsZero()) return false;
  SymMatrix synced = client.v;
  synced -= client.delta_v;
  const double log_ratio = LogDet(client.v, ridge) - LogDet(synced, ridge);
  return static_cast<double>(client.delta_t) * log_ratio > threshold;
}

double DefaultCommThreshold(std::size_t horizon, std::size_t num_clients,
                            std::size_t dim, double ridge, double beta) {
  Require(horizon >= 3, "T", "must be >= 3");
  const double t = static_cast<double>(horizon);
  const double n = static_cast<double>(num_clients);
  const double d = static_cast<double>(dim);
  const double log_t = std::log(t);
  const double r = std::ceil(d * std::log1p(t / (ridge * d)));
  return t / (n * n * d * log_t) -
         std::sqrt(t * t / (n * n * d * r * log_t)) * (1.0 - kInvE) *
             std::log(beta);
}

RoundRecord RunCommunicationRound(ServerState& server,
                                  std::vector<ClientState>& clients,
                                  const RoundSettings& settings,
                                  std::size_t step, ClientId trigger_client) {
  const std::size_t n = clients.size();
  const std::size_t d = server.v.dim();
  ServerState next_server = server;
  std::vector<ClientState> next = clients;

  RoundRecord rec;
  rec.index = server.rounds;
  rec.trigger_step = step;
  rec.trigger_client = trigger_client;

  // (1)-(2): every client uploads dV_i and reports a cost.
  std::vector<SymMatrix> deltas;
  deltas.reserve(n);
  rec.true_costs.resize(n);
  rec.reports.resize(n);
  for (ClientState& c : next) {
    deltas.push_back(c.delta_v);
    rec.true_costs[c.id] = c.TrueCost();
    rec.reports[c.id] = MakeReport(c.strategy, rec.true_costs[c.id], step);
  }

  // (3): selection.
  CoverageOracle oracle(server.v, deltas, settings.ridge);
  rec.selection =
      RunSelection(settings.mechanism, oracle, rec.reports, oracle.all());

  // (4)-(5): participants upload db_i; server absorbs and fills outboxes.
  for (ClientId i : rec.selection.selected) {
    ClientState& c = next[i];
    next_server.v += c.delta_v;
    next_server.b += c.delta_b;
    for (ClientId j = 0; j < n; ++j) {
      if (j == i) continue;
      next_server.outbox_v[j] += c.delta_v;
      next_server.outbox_b[j] += c.delta_b;
    }
    c.delta_v.SetZero();
    c.delta_b.SetZero();
    c.delta_t = 0;
  }

  // (6): payments.
  rec.payments = SettleRound(rec.selection, oracle, rec.reports,
                             settings.mechanism, settings.gamma,
                             settings.essential_surrogate);

  // (7): every client downloads its catch-up buffer.
  for (ClientState& c : next) {
    c.v += next_server.outbox_v[c.id];
    c.b += next_server.outbox_b[c.id];
    next_server.outbox_v[c.id].SetZero();
    next_server.outbox_b[c.id].SetZero();
  }

  // (8): accounting.
  const std::size_t s = rec.selection.selected.size();
  rec.scalars_up = static_cast<std::uint64_t>(n) * d * d +
                   static_cast<std::uint64_t>(s) * d;
  rec.scalars_down = static_cast<std::uint64_t>(n) * (d * d + d);
  rec.control_scalars = n + s;
  for (ClientId i : rec.selection.selected) {
    rec.social_cost_increment += rec.true_costs[i];
  }
  rec.incentive_increment = rec.payments.TotalIncentive();

  next_server.scalars_transferred += rec.scalars_up + rec.scalars_down;
  next_server.control_scalars += rec.control_scalars;
  next_server.social_cost += rec.social_cost_increment;
  next_server.incentive_cost += rec.incentive_increment;
  ++next_server.rounds;

  server = std::move(next_server);
  clients = std::move(next);
  return rec;
}

SimulationResult RunSimulation(const SimulationConfig& config) {
  config.Validate();
  const std::size_t n = config.num_clients;
  const std::size_t d = config.dim;
  const std::size_t horizon = config.horizon;

  SimulationResult result;
  result.ledger = UtilityLedger(n);
  result.server = ServerState(n, d);
  result.clients.reserve(n);
  for (ClientId i = 0; i < n; ++i) {
    auto engine = MakeEngine(config.seed, Stream::kIntrinsicCost, i);
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(engine);
    const double intrinsic =
        config.intrinsic_cost_min +
        (config.intrinsic_cost_max - config.intrinsic_cost_min) * (1.0 - u);
    result.clients.emplace_back(
        i, d, config.cost_weight, intrinsic,
        config.strategies.empty() ? ReportingStrategy::Truthful()
                                  : config.strategies[i]);
  }

  RunMetrics& m = result.metrics;
  m.regret.reserve(horizon);
  m.communication.reserve(horizon);
  m.incentive.reserve(horizon);
  m.social_cost.reserve(horizon);

  const double threshold = config.ResolvedCommThreshold();
  m.comm_threshold = threshold;
  const bool communicate = config.mechanism.kind != MechanismKind::kNone &&
                           std::isfinite(threshold);

  EnvironmentParams env_params;
  env_params.dim = d;
  env_params.arms_per_step = config.arms_per_step;
  env_params.noise_sigma = config.noise_sigma;
  env_params.arm_norm_bound = config.arm_norm_bound;
  env_params.seed = config.seed;
  const Environment env(env_params);

  RoundSettings settings;
  settings.mechanism = config.mechanism;
  settings.gamma = config.gamma;
  settings.essential_surrogate = config.essential_surrogate;
  settings.ridge = config.ridge;

  double regret = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    ClientId who = (t - 1) % n;
    if (config.arrival == Arrival::kUniform) {
      auto engine = MakeEngine(config.seed, Stream::kArrival, t);
      who = std::uniform_int_distribution<std::size_t>(0, n - 1)(engine);
    }
    ClientState& client = result.clients[who];
    const std::vector<Vector> arms = env.ArmSet(t);
    const std::size_t pick = SelectArmUcb(client.v, client.b, arms,
                                          config.ridge, config.noise_sigma,
                                          config.delta);
    const StepObservation obs = env.Pull(arms[pick], t);
    LocalStep(client, obs);
    regret += obs.instant_regret;
    result.ledger.RecordRegret(who, obs.instant_regret);

    if (communicate && TriggerFired(client, config.ridge, threshold)) {
      RoundRecord rec = RunCommunicationRound(result.server, result.clients,
                                              settings, t, who);
      for (ClientId i = 0; i < n; ++i) {
        const Payment* p = rec.payments.Find(i);
        result.ledger.RecordRound(i, rec.selection.Contains(i),
                                  p ? p->amount : 0.0, rec.true_costs[i]);
      }
      if (config.keep_round_log) result.rounds.push_back(std::move(rec));
    }

    m.regret.push_back(regret);
    m.communication.push_back(
        static_cast<double>(result.server.scalars_transferred));
    m.incentive.push_back(result.server.incentive_cost);
    m.social_cost.push_back(result.server.social_cost);
  }

  m.rounds = result.server.rounds;
  m.control_scalars = result.server.control_scalars;
  for (ClientId i = 0; i < n; ++i) {
    m.client_utility.push_back(result.ledger[i].utility);
    m.client_incentive.push_back(result.ledger[i].incentives);
    m.client_regret.push_back(result.ledger[i].regret);
  }
  return result;
}

std::string RoundRecordToJson(const RoundRecord& r) {
  nlohmann::ordered_json j;
  j["round"] = r.index;
  j["step"] = r.trigger_step;
  j["trigger_client"] = r.trigger_client;
  j["true_costs"] = r.true_costs;
  j["reports"] = r.reports;
  j["selected"] = r.selection.selected;
  j["coverage"] = r.selection.coverage_achieved;
  j["terminating_budget"] = r.selection.terminating_budget
                                ? nlohmann::ordered_json(*r.selection.terminating_budget)
                                : nlohmann::ordered_json(nullptr);
  j["budget_iterations"] = r.selection.iterations;
  auto payments = nlohmann::ordered_json::array();
  for (const Payment& p : r.payments.payments) {
    payments.push_back(
        {{"client", p.client}, {"amount", p.amount}, {"essential", p.essential}});
  }
  j["payments"] = std::move(payments);
  j["scalars_up"] = r.scalars_up;
  j["scalars_down"] = r.scalars_down;
  j["control_scalars"] = r.control_scalars;
  j["social_cost"] = r.social_cost_increment;
  j["incentive"] = r.incentive_increment;
  return j.dump();
}

}  // namespace fedban
