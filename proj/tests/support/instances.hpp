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

// Test-only helpers: random small count instances, brute-force refit
// scorers and invariant checks. Nothing here calls into criteria.cpp.

#ifndef MEMSEL_TESTS_SUPPORT_INSTANCES_HPP_
#define MEMSEL_TESTS_SUPPORT_INSTANCES_HPP_

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "memsel/chain.hpp"
#include "memsel/criteria.hpp"

namespace memsel::testing {

struct Instance {
  std::shared_ptr<const StateAlphabet> alphabet;
  TrajectoryCounts counts;
  DirichletPrior prior;
  std::string label;
};

// M in {2,3}, h in {0,1,2}, J in {j_min..4}, each cell 0..5 with roughly
// half the cells zero, alpha drawn from {0.5, 1, 2} per component.
inline Instance random_instance(std::mt19937_64& rng, std::size_t j_min = 2) {
  std::uniform_int_distribution<std::size_t> pick_m(2, 3), pick_h(0, 2), pick_j(j_min, 4);
  std::uniform_int_distribution<int> cell(-5, 5);
  const double alphas[] = {0.5, 1.0, 2.0};
  std::uniform_int_distribution<int> pick_a(0, 2);

  const std::size_t m = pick_m(rng);
  const std::size_t h = pick_h(rng);
  const std::size_t j = pick_j(rng);
  auto alphabet = std::make_shared<const StateAlphabet>(StateAlphabet::indexed(m));

  // Candidate contexts: all h-tuples over the alphabet, plus one padded.
  std::vector<Context> contexts;
  std::vector<StateId> tok(h, 0);
  for (std::size_t i = 0;; ++i) {
    contexts.push_back(Context::history(tok));
    std::size_t pos = 0;
    while (pos < h && ++tok[pos] == static_cast<StateId>(m)) tok[pos++] = 0;
    if (pos == h) break;
  }
  if (h > 0) {
    std::vector<StateId> padded(h, kStart);
    padded[h - 1] = 0;
    contexts.push_back(Context::history(padded));
  }

  std::vector<TrajectoryCounts::Entry> tables;
  for (std::size_t t = 0; t < j; ++t) {
    CountRows rows;
    for (const auto& ctx : contexts) {
      CountVector row(m);
      for (auto& c : row) c = std::max(0, cell(rng));
      rows.emplace(ctx, row);
    }
    tables.emplace_back("t" + std::to_string(t),
                        CountTable(h, alphabet, BoundaryMode::kPadded, std::move(rows)));
  }
  std::vector<double> alpha(m);
  for (auto& a : alpha) a = alphas[pick_a(rng)];
  std::string label = "M=" + std::to_string(m) + " h=" + std::to_string(h) +
                      " J=" + std::to_string(j);
  return {alphabet, TrajectoryCounts::from_tables(std::move(tables)),
          DirichletPrior(std::move(alpha)), label};
}

// ln B(v), written out independently of specfun.
inline double ref_log_beta(const std::vector<double>& v) {
  double acc = 0.0, sum = 0.0;
  for (double x : v) {
    acc += std::lgamma(x);
    sum += x;
  }
  return acc - std::lgamma(sum);
}

// log of the posterior predictive of `test` given `train`, one context.
inline double ref_log_predictive(const CountVector& train, const CountVector& test,
                                 const DirichletPrior& prior) {
  std::vector<double> a(train.size()), b(train.size());
  for (std::size_t k = 0; k < train.size(); ++k) {
    a[k] = static_cast<double>(train[k] + test[k]) + prior[k];
    b[k] = static_cast<double>(train[k]) + prior[k];
  }
  return ref_log_beta(a) - ref_log_beta(b);
}

// Sums the given trajectories' tables into plain rows.
inline CountRows pool(const TrajectoryCounts& tc, const std::vector<std::size_t>& which) {
  CountRows out;
  const std::size_t m = tc.total().num_states();
  for (std::size_t j : which) {
    for (const auto& [ctx, row] : tc.per_trajectory()[j].second.rows()) {
      auto [it, _] = out.try_emplace(ctx, m, 0);
      for (std::size_t k = 0; k < m; ++k) it->second[k] += row[k];
    }
  }
  return out;
}

// Adds each context's log predictive to a running sum, one term at a time.
inline void score_into(double& acc, const CountRows& train, const CountTable& test,
                       const DirichletPrior& prior) {
  const CountVector zeros(test.num_states(), 0);
  for (const auto& [ctx, row] : test.rows()) {
    auto it = train.find(ctx);
    acc += ref_log_predictive(it == train.end() ? zeros : it->second, row, prior);
  }
}

// Literal leave-one-out: refit without trajectory j, score j, repeat.
inline double refit_loo(const TrajectoryCounts& tc, const DirichletPrior& prior) {
  const std::size_t jn = tc.num_trajectories();
  double acc = 0.0;
  for (std::size_t j = 0; j < jn; ++j) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < jn; ++i) {
      if (i != j) rest.push_back(i);
    }
    score_into(acc, pool(tc, rest), tc.per_trajectory()[j].second, prior);
  }
  return -2.0 * acc;
}

// Literal two-fold CV: first floor(J/2) trajectories against the rest.
inline double refit_cv2(const TrajectoryCounts& tc, const DirichletPrior& prior) {
  const std::size_t jn = tc.num_trajectories();
  const std::size_t split = jn / 2;
  std::vector<std::size_t> first, second;
  for (std::size_t i = 0; i < jn; ++i) (i < split ? first : second).push_back(i);
  const CountRows fit_first = pool(tc, first);
  const CountRows fit_second = pool(tc, second);
  double acc = 0.0;
  for (std::size_t i = 0; i < jn; ++i) {
    score_into(acc, i < split ? fit_second : fit_first, tc.per_trajectory()[i].second, prior);
  }
  return -2.0 * acc;
}

// Same quantity as a product of one-step-ahead predictive probabilities,
// replaying trajectory j's transitions one at a time.
inline double sequential_log_predictive(CountVector train, const CountVector& test,
                                        const DirichletPrior& prior) {
  double acc = 0.0;
  for (std::size_t k = 0; k < test.size(); ++k) {
    for (std::int64_t r = 0; r < test[k]; ++r) {
      double denom = 0.0;
      for (std::size_t q = 0; q < train.size(); ++q) denom += train[q] + prior[q];
      acc += std::log((train[k] + prior[k]) / denom);
      ++train[k];
    }
  }
  return acc;
}

}  // namespace memsel::testing

#endif  // MEMSEL_TESTS_SUPPORT_INSTANCES_HPP_
