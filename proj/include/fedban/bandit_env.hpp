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

#ifndef FEDBAN_BANDIT_ENV_HPP_
#define FEDBAN_BANDIT_ENV_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fedban/linalg.hpp"

namespace fedban {

struct EnvironmentParams {
  std::size_t dim = 5;
  std::size_t arms_per_step = 20;
  double noise_sigma = 0.1;
  double arm_norm_bound = 1.0;
  std::uint64_t seed = 0;
};

struct StepObservation {
  Vector chosen_arm;
  double reward = 0.0;
  double instant_regret = 0.0;
};

// Synthetic linear-reward environment. Immutable after construction; every
// query is a pure function of (seed, t).
class Environment {
 public:
  explicit Environment(const EnvironmentParams& params);

  const EnvironmentParams& params() const { return params_; }
  const Vector& theta_star() const { return theta_star_; }

  // K arms drawn uniformly from the radius-L sphere. t >= 1.
  std::vector<Vector> ArmSet(std::size_t t) const;

  // Throws ArmNotInSet unless `arm` is bitwise one of ArmSet(t).
  StepObservation Pull(const Vector& arm, std::size_t t) const;

  double ExpectedReward(const Vector& arm) const {
    return theta_star_.Dot(arm);
  }

 private:
  EnvironmentParams params_;
  Vector theta_star_;
};

// Uniform direction on the unit sphere in `dim` dimensions.
Vector SampleUnitSphere(std::size_t dim, std::mt19937_64& engine);

// Index of the arm maximizing x^T theta_hat + alpha * ||x||_{(V + lambda I)^-1}
// with theta_hat = (V + lambda I)^-1 b and
// alpha = sigma * sqrt(log det(V + lambda I) - log det(lambda I)
//                      + 2 log(1/delta)) + sqrt(lambda).
// Ties go to the lowest index. Throws EmptyArmSet.
std::size_t SelectArmUcb(const SymMatrix& v, const Vector& b,
                         std::span<const Vector> arms, double ridge,
                         double sigma, double delta);

}  // namespace fedban

#endif  // FEDBAN_BANDIT_ENV_HPP_
