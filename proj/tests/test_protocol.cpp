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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "fedban/error.hpp"
#include "fedban/protocol.hpp"
#include "fedban/rng.hpp"
#include "json.hpp"
#include "oracles.hpp"

using fedban::ClientState;
using fedban::MechanismKind;
using fedban::ServerState;
using fedban::SimulationConfig;
using fedban::SymMatrix;
using fedban::Vector;

namespace {

fedban::StepObservation Obs(Vector x, double y) {
  fedban::StepObservation o;
  o.chosen_arm = std::move(x);
  o.reward = y;
  return o;
}

double MaxAbsDiff(const SymMatrix& a, const SymMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) {
      m = std::max(m, std::fabs(a(i, j) - b(i, j)));
    }
  }
  return m;
}

double MaxAbsDiff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

SimulationConfig Small(MechanismKind kind, std::uint64_t seed = 0) {
  SimulationConfig c;
  c.horizon = 600;
  c.num_clients = 6;
  c.dim = 3;
  c.mechanism.kind = kind;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("local_step") {
  ClientState c(0, 2, 1e-4, 5.0, {});
  LocalStep(c, Obs(Vector{1, 2}, 0.5));
  CHECK(c.delta_t == 1);
  CHECK(c.delta_v == SymMatrix::FromRows({{1, 2}, {2, 4}}));
  CHECK(c.delta_b == Vector{0.5, 1.0});
  LocalStep(c, Obs(Vector{0, 1}, 2.0));
  CHECK(c.delta_t == 2);
  CHECK(c.delta_v == SymMatrix::FromRows({{1, 2}, {2, 5}}));
  CHECK(c.v == c.delta_v);
}

TEST_CASE("local_step matches the Gram-sum oracle") {
  std::mt19937_64 rng(113);
  ClientState c(0, 4, 0.0, 1.0, {});
  oracle::Dense gram(4, std::vector<double>(4, 0.0));
  std::vector<double> b(4, 0.0);
  for (int k = 0; k < 100; ++k) {
    const Vector x = oracle::RandomVector(rng, 4);
    const double y = std::normal_distribution<double>(0, 1)(rng);
    LocalStep(c, Obs(x, y));
    for (std::size_t i = 0; i < 4; ++i) {
      b[i] += x[i] * y;
      for (std::size_t j = 0; j < 4; ++j) gram[i][j] += x[i] * x[j];
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::fabs(c.b[i] - b[i]) <= 1e-10);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::fabs(c.v(i, j) - gram[i][j]) <= 1e-10);
  }
}

TEST_CASE("true cost uses the raw determinant") {
  ClientState c(0, 2, 0.5, 3.0, {});
  CHECK(c.TrueCost() == 3.0);
  LocalStep(c, Obs(Vector{1, 0}, 0));
  CHECK(c.TrueCost() == 3.0);  // rank-deficient delta
  LocalStep(c, Obs(Vector{0, 2}, 0));
  CHECK(c.TrueCost() == doctest::Approx(3.0 + 0.5 * 4.0));
}

TEST_CASE("trigger examples") {
  ClientState idle(0, 2, 0, 1, {});
  CHECK_FALSE(fedban::TriggerFired(idle, 1.0, 0.0));

  ClientState one(0, 2, 0, 1, {});
  LocalStep(one, Obs(Vector{0.1, 0}, 0));
  CHECK(fedban::TriggerFired(one, 1.0, 0.0));

  // V = [3], dV = [3], delta_t = 2: 2 ln 4 > 2.
  ClientState s(0, 1, 0, 1, {});
  s.v = SymMatrix::Diagonal({3});
  s.delta_v = SymMatrix::Diagonal({3});
  s.delta_t = 2;
  CHECK(fedban::TriggerFired(s, 1.0, 2.0));
  CHECK_FALSE(fedban::TriggerFired(s, 1.0, 2.0 * std::log(4.0) + 1e-9));
}

TEST_CASE("default D_c") {
  // beta = 1 leaves only the first term.
  CHECK(fedban::DefaultCommThreshold(6250, 25, 5, 1.0, 1.0) ==
        doctest::Approx(6250.0 / (625.0 * 5.0 * std::log(6250.0))).epsilon(1e-14));

  // Two-step evaluation: R first, then the formula.
  const double t = 6250, n = 25, d = 5;
  const double r = std::ceil(d * std::log(1.0 + t / d));
  CHECK(r == 36.0);
  const double first = t / (n * n * d * std::log(t));
  const double root = std::sqrt(t * t / (n * n * d * r * std::log(t)));
  const double want = first - root * std::log(std::pow(0.5, 1.0 - std::exp(-1.0)));
  const double got = fedban::DefaultCommThreshold(6250, 25, 5, 1.0, 0.5);
  CHECK(std::fabs(got - want) <= 1e-12 * want);
  CHECK(got == doctest::Approx(2.99045).epsilon(1e-5));

  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t nn : {5u, 10u, 25u, 50u}) {
    const double v = fedban::DefaultCommThreshold(6250, nn, 5, 1.0, 0.5);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(fedban::DefaultCommThreshold(2, 25, 5, 1.0, 0.5), fedban::Error);
}

TEST_CASE("round scalars") {
  CHECK(fedban::RoundScalars(25, 5, 3) == 25u * 25 + 3 * 5 + 25u * 30);
  CHECK(fedban::RoundScalars(2, 1, 0) == 2u + 0 + 4);
}

TEST_CASE("a round with only zero deltas still counts the sync") {
  ServerState server(3, 2);
  std::vector<ClientState> clients;
  for (std::size_t i = 0; i < 3; ++i) clients.emplace_back(i, 2, 0.0, 1.0, fedban::ReportingStrategy{});
  fedban::RoundSettings settings;
  const auto rec = fedban::RunCommunicationRound(server, clients, settings, 1, 0);
  CHECK(rec.selection.selected.empty());
  CHECK(rec.incentive_increment == 0.0);
  CHECK(rec.social_cost_increment == 0.0);
  CHECK(rec.scalars_up == 3u * 4);
  CHECK(rec.scalars_down == 3u * 6);
  CHECK(server.scalars_transferred == 3u * 4 + 3u * 6);
  CHECK(server.rounds == 1);
}

TEST_CASE("two-client round, hand traced") {
  ServerState server(2, 1);
  std::vector<ClientState> clients{ClientState(0, 1, 0.0, 1.0, {}),
                                   ClientState(1, 1, 0.0, 1.0, {})};
  LocalStep(clients[0], Obs(Vector{std::sqrt(3.0)}, 1.0));
  fedban::RoundSettings settings;
  settings.mechanism = {MechanismKind::kVanillaGreedy, 0.5, 1.0};
  const auto rec = fedban::RunCommunicationRound(server, clients, settings, 1, 0);
  REQUIRE(rec.selection.selected == std::vector<fedban::ClientId>{0});
  CHECK(server.v(0, 0) == doctest::Approx(3.0));
  CHECK(clients[1].v(0, 0) == doctest::Approx(3.0));
  CHECK(clients[0].v == clients[1].v);
  CHECK(clients[0].b == clients[1].b);
  CHECK(clients[0].delta_v.IsZero());
  CHECK(clients[0].delta_t == 0);
  CHECK(server.outbox_v[1].IsZero());
  CHECK(rec.scalars_up == 2u * 1 + 1u * 1);
  CHECK(rec.scalars_down == 2u * 2);
  CHECK(rec.control_scalars == 3u);
  CHECK(rec.social_cost_increment == rec.true_costs[0]);
  CHECK(rec.incentive_increment == doctest::Approx(rec.payments.TotalIncentive()));
}

TEST_CASE("a failing round leaves state untouched") {
  ServerState server(2, 1);
  fedban::ReportingStrategy bad = fedban::ReportingStrategy::Fixed(-1.0);
  std::vector<ClientState> clients{ClientState(0, 1, 0.0, 1.0, {}),
                                   ClientState(1, 1, 0.0, 1.0, bad)};
  LocalStep(clients[0], Obs(Vector{1.0}, 1.0));
  const auto before_server = server;
  const auto before = clients;
  fedban::RoundSettings settings;
  CHECK_THROWS_AS(fedban::RunCommunicationRound(server, clients, settings, 1, 0),
                  fedban::Error);
  CHECK(server.v == before_server.v);
  CHECK(server.rounds == 0);
  CHECK(clients[0].delta_v == before[0].delta_v);
  CHECK(clients[0].delta_t == before[0].delta_t);
}

TEST_CASE("conservation and participant consistency over a driven protocol") {
  std::mt19937_64 rng(127);
  const std::size_t n = 5, d = 3;
  ServerState server(n, d);
  std::vector<ClientState> clients;
  for (std::size_t i = 0; i < n; ++i) {
    clients.emplace_back(i, d, 1e-3, 1.0 + static_cast<double>(i), fedban::ReportingStrategy{});
  }
  fedban::RoundSettings settings;
  settings.mechanism = {MechanismKind::kTruthFedBan, 0.5, 1.0};
  SymMatrix total(d);
  Vector total_b(d);
  std::size_t rounds = 0;
  for (std::size_t t = 1; t <= 400; ++t) {
    const std::size_t who = rng() % n;
    Vector x = oracle::RandomVector(rng, d);
    x *= 1.0 / x.Norm();
    const double y = std::normal_distribution<double>(0, 1)(rng);
    LocalStep(clients[who], Obs(x, y));
    total.AddOuter(x);
    Vector xy = x;
    xy *= y;
    total_b += xy;
    if (fedban::TriggerFired(clients[who], 1.0, 1.0)) {
      const auto rec = fedban::RunCommunicationRound(server, clients, settings, t, who);
      ++rounds;
      for (auto i : rec.selection.selected) {
        CHECK(clients[i].delta_v.IsZero());
        CHECK(MaxAbsDiff(clients[i].v, server.v) <= 1e-9);
        CHECK(MaxAbsDiff(clients[i].b, server.b) <= 1e-9);
      }
    }
    SymMatrix acc = server.v;
    Vector acc_b = server.b;
    for (const auto& c : clients) {
      acc += c.delta_v;
      acc_b += c.delta_b;
      // Each client knows the synced state plus its own pending data.
      SymMatrix own = server.v;
      own += c.delta_v;
      CHECK(MaxAbsDiff(own, c.v) <= 1e-9);
    }
    REQUIRE(MaxAbsDiff(acc, total) <= 1e-9);
    REQUIRE(MaxAbsDiff(acc_b, total_b) <= 1e-9);
  }
  CHECK(rounds > 0);
}

TEST_CASE("config validation names the field") {
  SimulationConfig c;
  c.mechanism.beta = 0.0;
  try {
    c.Validate();
    FAIL("expected ConfigInvalid");
  } catch (const fedban::Error& e) {
    CHECK(e.code() == fedban::ErrorCode::kConfigInvalid);
    CHECK(std::string(e.what()).find("beta") != std::string::npos);
  }
  SimulationConfig k;
  k.arms_per_step = 0;
  CHECK_THROWS_WITH_AS(k.Validate(), doctest::Contains("K"), fedban::Error);
}

TEST_CASE("T = 0 gives empty metrics") {
  SimulationConfig c = Small(MechanismKind::kTruthFedBan);
  c.horizon = 0;
  const auto r = fedban::RunSimulation(c);
  CHECK(r.metrics.regret.empty());
  CHECK(r.metrics.rounds == 0);
  for (double u : r.metrics.client_utility) CHECK(u == 0.0);
}

TEST_CASE("infinite D_c means no communication") {
  SimulationConfig c = Small(MechanismKind::kTruthFedBan);
  c.comm_threshold = std::numeric_limits<double>::infinity();
  const auto r = fedban::RunSimulation(c);
  CHECK(r.metrics.rounds == 0);
  CHECK(r.metrics.communication.back() == 0.0);
  CHECK(r.server.v.IsZero());
}

TEST_CASE("simulation is deterministic and series are cumulative") {
  for (auto kind : {MechanismKind::kTruthFedBan, MechanismKind::kVanillaGreedy,
                    MechanismKind::kOrderedBudget, MechanismKind::kSelectAll}) {
    SimulationConfig c = Small(kind, 3);
    c.arrival = fedban::Arrival::kUniform;
    const auto a = fedban::RunSimulation(c);
    const auto b = fedban::RunSimulation(c);
    CHECK(a.metrics.regret == b.metrics.regret);
    CHECK(a.metrics.incentive == b.metrics.incentive);
    CHECK(a.metrics.client_utility == b.metrics.client_utility);
    REQUIRE(a.metrics.regret.size() == c.horizon);
    CHECK(a.metrics.rounds == a.rounds.size());
    for (std::size_t t = 1; t < c.horizon; ++t) {
      CHECK(a.metrics.regret[t] >= a.metrics.regret[t - 1]);
      CHECK(a.metrics.communication[t] >= a.metrics.communication[t - 1]);
      CHECK(a.metrics.incentive[t] >= a.metrics.incentive[t - 1]);
      CHECK(a.metrics.social_cost[t] >= a.metrics.social_cost[t - 1]);
    }
    // C_T is the sum of the per-round formula.
    std::uint64_t scalars = 0;
    double utility0 = 0.0;
    for (const auto& rec : a.rounds) {
      scalars += fedban::RoundScalars(c.num_clients, c.dim, rec.selection.selected.size());
      if (const auto* p = rec.payments.Find(0)) utility0 += p->amount - rec.true_costs[0];
    }
    CHECK(a.server.scalars_transferred == scalars);
    CHECK(a.metrics.client_utility[0] == doctest::Approx(utility0).epsilon(1e-9));
  }
}

TEST_CASE("noiseless single client learns") {
  SimulationConfig c;
  c.horizon = 500;
  c.num_clients = 1;
  c.dim = 5;
  c.noise_sigma = 0.0;
  c.mechanism.kind = MechanismKind::kNone;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    c.seed = seed;
    const auto r = fedban::RunSimulation(c);
    std::vector<double> window;
    for (std::size_t w = 0; w < 10; ++w) {
      const double start = w == 0 ? 0.0 : r.metrics.regret[w * 50 - 1];
      window.push_back((r.metrics.regret[w * 50 + 49] - start) / 50.0);
    }
    std::size_t rises = 0;
    for (std::size_t w = 1; w < window.size(); ++w) rises += window[w] > window[w - 1];
    CHECK(window.back() < window.front());
    CHECK(rises <= 3);
  }
}

TEST_CASE("sharing data beats learning alone") {
  SimulationConfig c;
  c.horizon = 6250;
  c.seed = 0;
  c.mechanism.kind = MechanismKind::kSelectAll;
  const double shared = fedban::RunSimulation(c).metrics.regret.back();
  c.mechanism.kind = MechanismKind::kNone;
  const double alone = fedban::RunSimulation(c).metrics.regret.back();
  CHECK(shared <= alone);
}

TEST_CASE("round log lines are JSON with the documented keys") {
  const auto r = fedban::RunSimulation(Small(MechanismKind::kTruthFedBan));
  REQUIRE_FALSE(r.rounds.empty());
  for (const auto& rec : r.rounds) {
    const auto j = nlohmann::json::parse(fedban::RoundRecordToJson(rec));
    for (const char* key : {"round", "step", "trigger_client", "true_costs", "reports",
                            "selected", "coverage", "terminating_budget",
                            "budget_iterations", "payments", "scalars_up",
                            "scalars_down", "control_scalars", "social_cost",
                            "incentive"}) {
      CHECK(j.contains(key));
    }
    CHECK(j["reports"].size() == 6);
  }
}
