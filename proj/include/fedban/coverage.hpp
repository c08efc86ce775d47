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

#ifndef FEDBAN_COVERAGE_HPP_
#define FEDBAN_COVERAGE_HPP_

// The log-determinant coverage function
//   g(S) = log det(V_last + sum_{j in S} dV_j + lambda I)
//        - log det(V_last + sum_{all j} dV_j + lambda I),
// which is monotone, submodular and never positive.

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "fedban/linalg.hpp"

namespace fedban {

using ClientId = std::size_t;
using ClientMask = std::uint64_t;

inline constexpr std::size_t kMaxClients = 64;
// Absolute tolerance on every coverage-vs-threshold comparison.
inline constexpr double kCoverageTolerance = 1e-12;

constexpr ClientMask Bit(ClientId i) { return ClientMask{1} << i; }
constexpr bool Contains(ClientMask m, ClientId i) { return (m >> i) & 1U; }
constexpr ClientMask FullMask(std::size_t n) {
  return n >= 64 ? ~ClientMask{0} : (ClientMask{1} << n) - 1;
}
ClientMask MaskOf(std::span<const ClientId> ids);
std::vector<ClientId> IdsOf(ClientMask mask);

struct CoverageInstance {
  SymMatrix v_last;
  std::vector<SymMatrix> deltas;
  std::vector<double> reported_costs;
  double beta = 0.5;
  double ridge = 1.0;

  std::size_t num_clients() const { return deltas.size(); }
  // Dimensions agree, costs > 0, beta in (0, 1], ridge > 0, N <= 64.
  void Validate() const;
};

// Memoizing evaluator of g over client bitmasks. Coverage depends only on
// the set, never on reports, so one oracle serves every rerun of a round.
// Not thread-safe; give each worker its own copy.
class CoverageOracle {
 public:
  CoverageOracle(const SymMatrix& v_last, std::span<const SymMatrix> deltas,
                 double ridge);
  explicit CoverageOracle(const CoverageInstance& inst)
      : CoverageOracle(inst.v_last, inst.deltas, inst.ridge) {}

  std::size_t num_clients() const { return deltas_.size(); }
  std::size_t dim() const { return dim_; }
  ClientMask all() const { return FullMask(deltas_.size()); }
  bool HasZeroDelta(ClientId j) const { return Contains(zero_mask_, j); }

  double Value(ClientMask s);
  // g(s + j) - g(s); throws AlreadySelected when j is in s.
  double MarginalGain(ClientMask s, ClientId j);

  std::size_t evaluations() const { return evaluations_; }

 private:
  double LogDetOf(ClientMask s);

  std::size_t dim_;
  double ridge_;
  SymMatrix v_last_;
  std::vector<SymMatrix> deltas_;
  ClientMask zero_mask_ = 0;
  double log_det_full_ = 0.0;
  std::vector<double> scratch_;
  std::unordered_map<ClientMask, double> memo_;
  std::size_t evaluations_ = 0;
};

// Set-of-ids entry points. Throw UnknownClientId for ids >= N.
double Coverage(const CoverageInstance& inst, std::span<const ClientId> s);
double MarginalGain(const CoverageInstance& inst, std::span<const ClientId> s,
                    ClientId j);

}  // namespace fedban

#endif  // FEDBAN_COVERAGE_HPP_
