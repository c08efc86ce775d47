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

#include "fedban/coverage.hpp"

#include <algorithm>
#include <string>

#include "fedban/error.hpp"

namespace fedban {
namespace {

void CheckIds(std::span<const ClientId> ids, std::size_t n) {
  for (ClientId id : ids) {
    if (id >= n) {
      Fail(ErrorCode::kUnknownClientId,
           "client " + std::to_string(id) + " (N = " + std::to_string(n) + ")");
    }
  }
}

}  // namespace

ClientMask MaskOf(std::span<const ClientId> ids) {
  ClientMask m = 0;
  for (ClientId id : ids) m |= Bit(id);
  return m;
}

std::vector<ClientId> IdsOf(ClientMask mask) {
  std::vector<ClientId> ids;
  for (ClientId i = 0; mask != 0; ++i, mask >>= 1) {
    if (mask & 1U) ids.push_back(i);
  }
  return ids;
}

void CoverageInstance::Validate() const {
  const std::size_t n = deltas.size();
  if (n > kMaxClients) {
    Fail(ErrorCode::kTooManyClients,
         std::to_string(n) + " clients exceeds " + std::to_string(kMaxClients));
  }
  if (reported_costs.size() != n) {
    Fail(ErrorCode::kDimensionMismatch, "one reported cost per client");
  }
  for (const SymMatrix& dv : deltas) {
    if (dv.dim() != v_last.dim()) {
      Fail(ErrorCode::kDimensionMismatch, "delta dimension differs from V");
    }
  }
  for (double c : reported_costs) {
    if (!(c > 0.0)) {
      Fail(ErrorCode::kNonPositiveReport, "reported costs must be > 0");
    }
  }
  if (!(beta > 0.0 && beta <= 1.0)) {
    Fail(ErrorCode::kConfigInvalid, "beta must lie in (0, 1]");
  }
  if (!(ridge > 0.0)) Fail(ErrorCode::kConfigInvalid, "ridge must be > 0");
}

CoverageOracle::CoverageOracle(const SymMatrix& v_last,
                               std::span<const SymMatrix> deltas, double ridge)
    : dim_(v_last.dim()),
      ridge_(ridge),
      v_last_(v_last),
      deltas_(deltas.begin(), deltas.end()),
      scratch_(v_last.dim() * v_last.dim()) {
  if (deltas_.size() > kMaxClients) {
    Fail(ErrorCode::kTooManyClients, std::to_string(deltas_.size()) +
                                         " clients exceeds " +
                                         std::to_string(kMaxClients));
  }
  for (ClientId j = 0; j < deltas_.size(); ++j) {
    if (deltas_[j].dim() != dim_) {
      Fail(ErrorCode::kDimensionMismatch, "delta dimension differs from V");
    }
    if (deltas_[j].IsZero()) zero_mask_ |= Bit(j);
  }
  log_det_full_ = LogDetOf(all());
}

double CoverageOracle::LogDetOf(ClientMask s) {
  ++evaluations_;
  const auto base = v_last_.entries();
  std::copy(base.begin(), base.end(), scratch_.begin());
  for (ClientMask m = s; m != 0; m &= m - 1) {
    const auto e = deltas_[static_cast<ClientId>(__builtin_ctzll(m))].entries();
    for (std::size_t k = 0; k < e.size(); ++k) scratch_[k] += e[k];
  }
  for (std::size_t i = 0; i < dim_; ++i) scratch_[i * dim_ + i] += ridge_;
  return LogDetInPlace(scratch_, dim_);
}

double CoverageOracle::Value(ClientMask s) {
  const ClientMask key = s & all() & ~zero_mask_;
  if (key == (all() & ~zero_mask_)) return 0.0;
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  const double g = LogDetOf(key) - log_det_full_;
  memo_.emplace(key, g);
  return g;
}

double CoverageOracle::MarginalGain(ClientMask s, ClientId j) {
  if (j >= deltas_.size()) {
    Fail(ErrorCode::kUnknownClientId, "client " + std::to_string(j));
  }
  if (Contains(s, j)) {
    Fail(ErrorCode::kAlreadySelected, "client " + std::to_string(j));
  }
  if (HasZeroDelta(j)) return 0.0;
  // Adding PSD mass cannot shrink a determinant; clamp rounding noise.
  return std::max(0.0, Value(s | Bit(j)) - Value(s));
}

double Coverage(const CoverageInstance& inst, std::span<const ClientId> s) {
  CheckIds(s, inst.num_clients());
  CoverageOracle oracle(inst);
  return oracle.Value(MaskOf(s));
}

double MarginalGain(const CoverageInstance& inst, std::span<const ClientId> s,
                    ClientId j) {
  CheckIds(s, inst.num_clients());
  CoverageOracle oracle(inst);
  return oracle.MarginalGain(MaskOf(s), j);
}

}  // namespace fedban
