// Copyright 2026 The memsel Authors.
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

// Monte-Carlo estimates of posterior predictive quantities, independent of
// the closed forms in criteria.hpp. Each (trajectory, context) term gets its
// own Dirichlet posterior draws; terms are summed and their standard errors
// combined in quadrature.

#ifndef MEMSEL_ORACLE_HPP_
#define MEMSEL_ORACLE_HPP_

#include <cstddef>
#include <cstdint>

#include "memsel/chain.hpp"
#include "memsel/criteria.hpp"

namespace memsel {

struct OracleEstimate {
  double estimate = 0;
  double std_error = 0;
  std::size_t draws = 0;
};

inline constexpr std::size_t kMinOracleDraws = 1000;

// All functions throw std::invalid_argument for draws < kMinOracleDraws.

// log E[Pr(N | p)] under the posterior given N (natural-log scale).
OracleEstimate mc_lpd(const CountTable& total, const DirichletPrior& prior, std::size_t draws,
                      std::uint64_t seed);

// sum_j sum_x log E[Pr(N_x^(j) | p_x)] under the posterior given N.
OracleEstimate mc_lppd(const TrajectoryCounts& tc, const DirichletPrior& prior,
                       std::size_t draws, std::uint64_t seed);

// Leave-one-out predictive density, deviance scale: each trajectory scored
// by draws from the posterior of the remaining trajectories.
OracleEstimate mc_loo(const TrajectoryCounts& tc, const DirichletPrior& prior,
                      std::size_t draws, std::uint64_t seed);

// Two-fold CV, deviance scale, input-order folds (first floor(J/2) vs rest).
OracleEstimate mc_cv2(const TrajectoryCounts& tc, const DirichletPrior& prior,
                      std::size_t draws, std::uint64_t seed);

// sum_j sum_x var[log Pr(N_x^(j) | p_x)] under the posterior given N; the
// Monte-Carlo counterpart of k_WAIC2.
OracleEstimate mc_variance_loglik(const TrajectoryCounts& tc, const DirichletPrior& prior,
                                  std::size_t draws, std::uint64_t seed);

// 2 var[log Pr(N | p)]; the counterpart of k_DIC2.
OracleEstimate mc_k_dic2(const CountTable& total, const DirichletPrior& prior,
                         std::size_t draws, std::uint64_t seed);

}  // namespace memsel

#endif  // MEMSEL_ORACLE_HPP_
