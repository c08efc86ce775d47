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
#include <random>
#include <vector>

#include "fedban/coverage.hpp"
#include "fedban/error.hpp"
#include "oracles.hpp"

using fedban::ClientId;
using fedban::CoverageInstance;
using fedban::SymMatrix;

namespace {

// log det via cofactor expansion of V_last + sum_S dV + ridge I.
double OracleLogDet(const CoverageInstance& inst, const std::vector<ClientId>& s) {
  SymMatrix m = inst.v_last;
  for (ClientId j : s) m += inst.deltas[j];
  return std::log(oracle::CofactorDet(oracle::ToDense(m, inst.ridge)));
}

double OracleCoverage(const CoverageInstance& inst,
                      const std::vector<ClientId>& s) {
  std::vector<ClientId> all;
  for (ClientId j = 0; j < inst.num_clients(); ++j) all.push_back(j);
  return OracleLogDet(inst, s) - OracleLogDet(inst, all);
}

CoverageInstance RandomCover(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  CoverageInstance inst;
  inst.v_last = oracle::RandomGram(rng, d, rng() % 3);
  for (std::size_t j = 0; j < n; ++j) {
    inst.deltas.push_back(rng() % 5 == 0 ? SymMatrix(d)
                                         : oracle::RandomGram(rng, d, 1 + rng() % 3, 0.7));
    inst.reported_costs.push_back(1.0);
  }
  return inst;
}

}  // namespace

TEST_CASE("coverage examples") {
  CoverageInstance inst;
  inst.v_last = SymMatrix::Zero(2);
  inst.deltas = {SymMatrix::Diagonal({3, 0}), SymMatrix::Diagonal({0, 3})};
  inst.reported_costs = {1, 1};
  const std::vector<ClientId> one{0};
  const std::vector<ClientId> both{0, 1};
  CHECK(fedban::Coverage(inst, one) == doctest::Approx(-std::log(4.0)));
  CHECK(fedban::Coverage(inst, both) == 0.0);

  CoverageInstance zero = inst;
  zero.deltas = {SymMatrix::Zero(2), SymMatrix::Zero(2)};
  CHECK(fedban::Coverage(zero, {}) == 0.0);
  CHECK(fedban::Coverage(zero, one) == 0.0);
}

TEST_CASE("marginal gain examples") {
  CoverageInstance inst;
  inst.v_last = SymMatrix::Zero(1);
  inst.deltas = {SymMatrix::Diagonal({3}), SymMatrix::Zero(1)};
  inst.reported_costs = {1, 1};
  CHECK(fedban::MarginalGain(inst, {}, 0) == doctest::Approx(std::log(4.0)));
  CHECK(fedban::MarginalGain(inst, {}, 1) == 0.0);
  const std::vector<ClientId> has0{0};
  try {
    (void)fedban::MarginalGain(inst, has0, 0);
    FAIL("expected AlreadySelected");
  } catch (const fedban::Error& e) {
    CHECK(e.code() == fedban::ErrorCode::kAlreadySelected);
  }
  const std::vector<ClientId> bad{5};
  try {
    (void)fedban::Coverage(inst, bad);
    FAIL("expected UnknownClientId");
  } catch (const fedban::Error& e) {
    CHECK(e.code() == fedban::ErrorCode::kUnknownClientId);
  }
}

TEST_CASE("coverage matches the cofactor oracle on random instances") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const std::size_t d = 1 + trial % 3;
    const CoverageInstance inst = RandomCover(rng, n, d);
    fedban::CoverageOracle cov(inst);
    for (fedban::ClientMask m = 0; m <= cov.all(); ++m) {
      const auto ids = fedban::IdsOf(m);
      const double got = cov.Value(m);
      CHECK(got <= 0.0);
      CHECK(std::fabs(got - OracleCoverage(inst, ids)) <= 1e-9);
      for (ClientId j = 0; j < n; ++j) {
        if (fedban::Contains(m, j)) continue;
        auto with = ids;
        with.push_back(j);
        const double diff = fedban::Coverage(inst, with) - fedban::Coverage(inst, ids);
        CHECK(std::fabs(cov.MarginalGain(m, j) - diff) <= 1e-12);
        CHECK(cov.MarginalGain(m, j) >= 0.0);
      }
    }
    CHECK(cov.Value(cov.all()) == 0.0);
  }
}

TEST_CASE("coverage is submodular") {
  std::mt19937_64 rng(43);
  std::size_t checked = 0;
  while (checked < 1000) {
    const std::size_t n = 3 + rng() % 6;
    const CoverageInstance inst = RandomCover(rng, n, 1 + rng() % 3);
    fedban::CoverageOracle cov(inst);
    for (int k = 0; k < 10; ++k) {
      const fedban::ClientMask b = rng() & cov.all();
      const fedban::ClientMask a = b & rng();
      const ClientId i = rng() % n;
      if (fedban::Contains(b, i)) continue;
      CHECK(cov.MarginalGain(a, i) >= cov.MarginalGain(b, i) - 1e-9);
      ++checked;
    }
  }
}

TEST_CASE("mask helpers") {
  const std::vector<ClientId> ids{0, 3, 5};
  CHECK(fedban::MaskOf(ids) == 0b101001);
  CHECK(fedban::IdsOf(0b101001) == ids);
  CHECK(fedban::FullMask(64) == ~fedban::ClientMask{0});
  CHECK(fedban::FullMask(3) == 0b111);
}

TEST_CASE("instance validation") {
  CoverageInstance inst;
  inst.v_last = SymMatrix::Zero(2);
  inst.deltas = {SymMatrix::Zero(2)};
  inst.reported_costs = {0.0};
  CHECK_THROWS_AS(inst.Validate(), fedban::Error);
  inst.reported_costs = {1.0};
  inst.beta = 1.5;
  CHECK_THROWS_AS(inst.Validate(), fedban::Error);
  inst.beta = 0.5;
  CHECK_NOTHROW(inst.Validate());
  inst.deltas = {SymMatrix::Zero(3)};
  CHECK_THROWS_AS(inst.Validate(), fedban::Error);
}
