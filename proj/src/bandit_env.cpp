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

#include "fedban/bandit_env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fedban/error.hpp"
#include "fedban/rng.hpp"

namespace fedban {

Vector SampleUnitSphere(std::size_t dim, std::mt19937_64& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x(dim);
  double norm = 0.0;
  while (norm == 0.0) {
    for (std::size_t i = 0; i < dim; ++i) x[i] = normal(engine);
    norm = x.Norm();
  }
  x *= 1.0 / norm;
  return x;
}

Environment::Environment(const EnvironmentParams& params) : params_(params) {
  if (params.dim == 0) Fail(ErrorCode::kConfigInvalid, "d must be >= 1");
  if (params.arms_per_step == 0) {
    Fail(ErrorCode::kConfigInvalid, "K must be >= 1");
  }
  if (!(params.arm_norm_bound > 0.0)) {
    Fail(ErrorCode::kConfigInvalid, "arm_norm_bound must be > 0");
  }
  if (!(params.noise_sigma >= 0.0)) {
    Fail(ErrorCode::kConfigInvalid, "sigma must be >= 0");
  }
  auto engine = MakeEngine(params.seed, Stream::kTheta, 0);
  theta_star_ = SampleUnitSphere(params.dim, engine);
}

std::vector<Vector> Environment::ArmSet(std::size_t t) const {
  auto engine = MakeEngine(params_.seed, Stream::kArms, t);
  std::vector<Vector> arms;
  arms.reserve(params_.arms_per_step);
  for (std::size_t k = 0; k < params_.arms_per_step; ++k) {
    Vector x = SampleUnitSphere(params_.dim, engine);
    x *= params_.arm_norm_bound;
    arms.push_back(std::move(x));
  }
  return arms;
}

StepObservation Environment::Pull(const Vector& arm, std::size_t t) const {
  const std::vector<Vector> arms = ArmSet(t);
  if (std::find(arms.begin(), arms.end(), arm) == arms.end()) {
    Fail(ErrorCode::kArmNotInSet, "arm is not in the arm set of step " +
                                      std::to_string(t));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& x : arms) best = std::max(best, ExpectedReward(x));
  const double mean = ExpectedReward(arm);

  auto engine = MakeEngine(params_.seed, Stream::kNoise, t);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double eta = params_.noise_sigma * normal(engine);

  StepObservation obs;
  obs.chosen_arm = arm;
  obs.reward = mean + eta;
  obs.instant_regret = std::max(0.0, best - mean);
  return obs;
}

std::size_t SelectArmUcb(const SymMatrix& v, const Vector& b,
                         std::span<const Vector> arms, double ridge,
                         double sigma, double delta) {
  if (arms.empty()) Fail(ErrorCode::kEmptyArmSet, "no arms to choose from");
  const Cholesky chol(v, ridge);
  const Vector theta_hat = chol.Solve(b);
  const double log_ratio =
      chol.LogDet() - static_cast<double>(v.dim()) * std::log(ridge);
  const double alpha =
      sigma * std::sqrt(std::max(0.0, log_ratio) + 2.0 * std::log(1.0 / delta)) +
      std::sqrt(ridge);

  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < arms.size(); ++k) {
    const Vector& x = arms[k];
    const double width = std::sqrt(std::max(0.0, x.Dot(chol.Solve(x))));
    const double score = x.Dot(theta_hat) + alpha * width;
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  return best;
}

}  // namespace fedban
