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

#include "memsel/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "memsel/rng.hpp"

namespace memsel {
namespace {

constexpr std::uint64_t kLpdTag = 1;
constexpr std::uint64_t kLppdTag = 2;
constexpr std::uint64_t kLooTag = 3;
constexpr std::uint64_t kCv2Tag = 4;
constexpr std::uint64_t kVarTag = 5;
constexpr std::uint64_t kDicTag = 6;

void check_draws(std::size_t draws) {
  if (draws < kMinOracleDraws) {
    throw std::invalid_argument("oracle needs at least " + std::to_string(kMinOracleDraws) +
                                " draws, got " + std::to_string(draws));
  }
}

// Accumulates independent term estimates.
struct Sum {
  double estimate = 0;
  double variance = 0;
  void add(double est, double se) {
    estimate += est;
    variance += se * se;
  }
};

bool all_zero(const CountVector& v) {
  for (auto c : v) {
    if (c != 0) return false;
  }
  return true;
}

// Draws s_i = sum_m test_m log p_m with p ~ Dirichlet(alpha + train).
std::vector<double> log_lik_draws(const CountVector& train, const CountVector& test,
                                  const DirichletPrior& prior, std::size_t draws, Rng& rng) {
  const std::size_t m = prior.size();
  std::vector<double> post(m), p(m), s(draws);
  for (std::size_t k = 0; k < m; ++k) post[k] = prior[k] + static_cast<double>(train[k]);
  for (std::size_t i = 0; i < draws; ++i) {
    sample_dirichlet(rng, post, p);
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (test[k] != 0) acc += static_cast<double>(test[k]) * std::log(p[k]);
    }
    s[i] = acc;
  }
  return s;
}

// log mean(exp(s)) with a delta-method standard error.
std::pair<double, double> log_mean_exp(const std::vector<double>& s) {
  double hi = -INFINITY;
  for (double x : s) hi = std::max(hi, x);
  const auto n = static_cast<double>(s.size());
  double mean = 0.0;
  for (double x : s) mean += std::exp(x - hi);
  mean /= n;
  double ss = 0.0;
  for (double x : s) {
    const double d = std::exp(x - hi) - mean;
    ss += d * d;
  }
  const double var = ss / (n - 1.0);
  return {hi + std::log(mean), std::sqrt(var / n) / mean};
}

// Sample variance with the standard error of the variance estimator.
std::pair<double, double> sample_variance(const std::vector<double>& s) {
  const auto n = static_cast<double>(s.size());
  double mean = 0.0;
  for (double x : s) mean += x;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : s) {
    const double d = (x - mean) * (x - mean);
    m2 += d;
    m4 += d * d;
  }
  const double var = m2 / (n - 1.0);
  m4 /= n;
  const double biased = m2 / n;
  const double se = std::sqrt(std::max(m4 - biased * biased, 0.0) / n);
  return {var, se};
}

CountVector lookup(const CountRows& rows, const Context& ctx, std::size_t m) {
  auto it = rows.find(ctx);
  return it == rows.end() ? CountVector(m, 0) : it->second;
}

// Sums trajectory tables whose index satisfies `keep`.
template <typename Pred>
CountRows sum_tables(const TrajectoryCounts& tc, Pred keep) {
  const std::size_t m = tc.total().num_states();
  CountRows out;
  for (std::size_t i = 0; i < tc.num_trajectories(); ++i) {
    if (!keep(i)) continue;
    for (const auto& [ctx, row] : tc.per_trajectory()[i].second.rows()) {
      auto [it, inserted] = out.try_emplace(ctx, m, 0);
      for (std::size_t k = 0; k < m; ++k) it->second[k] += row[k];
    }
  }
  return out;
}

// Sum over trajectories i of log E[Pr(N^(i) | p)], p drawn from the posterior
// of train_for(i).
template <typename TrainFor>
Sum heldout_sum(const TrajectoryCounts& tc, const DirichletPrior& prior, std::size_t draws,
                std::uint64_t seed, std::uint64_t tag, TrainFor train_for) {
  const std::size_t m = tc.total().num_states();
  Sum sum;
  for (std::size_t i = 0; i < tc.num_trajectories(); ++i) {
    const CountRows train = train_for(i);
    std::uint64_t term = 0;
    for (const auto& [ctx, row] : tc.per_trajectory()[i].second.rows()) {
      Rng rng = derive_stream(seed, {tag, i, term++});
      const auto s = log_lik_draws(lookup(train, ctx, m), row, prior, draws, rng);
      const auto [est, se] = log_mean_exp(s);
      sum.add(est, se);
    }
  }
  return sum;
}

OracleEstimate finish(const Sum& s, std::size_t draws, double scale = 1.0) {
  return {scale * s.estimate, std::abs(scale) * std::sqrt(s.variance), draws};
}

}  // namespace

OracleEstimate mc_lpd(const CountTable& total, const DirichletPrior& prior, std::size_t draws,
                      std::uint64_t seed) {
  check_draws(draws);
  Sum sum;
  std::uint64_t term = 0;
  for (const auto& [ctx, row] : total.rows()) {
    Rng rng = derive_stream(seed, {kLpdTag, term++});
    const auto [est, se] = log_mean_exp(log_lik_draws(row, row, prior, draws, rng));
    sum.add(est, se);
  }
  return finish(sum, draws);
}

OracleEstimate mc_lppd(const TrajectoryCounts& tc, const DirichletPrior& prior,
                       std::size_t draws, std::uint64_t seed) {
  check_draws(draws);
  const CountRows all = sum_tables(tc, [](std::size_t) { return true; });
  return finish(heldout_sum(tc, prior, draws, seed, kLppdTag,
                            [&](std::size_t) { return all; }),
                draws);
}

OracleEstimate mc_loo(const TrajectoryCounts& tc, const DirichletPrior& prior,
                      std::size_t draws, std::uint64_t seed) {
  check_draws(draws);
  return finish(heldout_sum(tc, prior, draws, seed, kLooTag,
                            [&](std::size_t i) {
                              return sum_tables(tc, [i](std::size_t k) { return k != i; });
                            }),
                draws, -2.0);
}

OracleEstimate mc_cv2(const TrajectoryCounts& tc, const DirichletPrior& prior,
                      std::size_t draws, std::uint64_t seed) {
  check_draws(draws);
  const std::size_t j = tc.num_trajectories();
  if (j < 2) throw std::invalid_argument("two-fold CV needs at least two trajectories");
  const std::size_t split = j / 2;
  const CountRows first = sum_tables(tc, [split](std::size_t k) { return k < split; });
  const CountRows second = sum_tables(tc, [split](std::size_t k) { return k >= split; });
  return finish(heldout_sum(tc, prior, draws, seed, kCv2Tag,
                            [&](std::size_t i) { return i < split ? second : first; }),
                draws, -2.0);
}

OracleEstimate mc_variance_loglik(const TrajectoryCounts& tc, const DirichletPrior& prior,
                                  std::size_t draws, std::uint64_t seed) {
  check_draws(draws);
  const std::size_t m = tc.total().num_states();
  const CountRows all = sum_tables(tc, [](std::size_t) { return true; });
  Sum sum;
  for (std::size_t i = 0; i < tc.num_trajectories(); ++i) {
    std::uint64_t term = 0;
    for (const auto& [ctx, row] : tc.per_trajectory()[i].second.rows()) {
      if (all_zero(row)) continue;
      Rng rng = derive_stream(seed, {kVarTag, i, term++});
      const auto [var, se] =
          sample_variance(log_lik_draws(lookup(all, ctx, m), row, prior, draws, rng));
      sum.add(var, se);
    }
  }
  return finish(sum, draws);
}

OracleEstimate mc_k_dic2(const CountTable& total, const DirichletPrior& prior,
                         std::size_t draws, std::uint64_t seed) {
  check_draws(draws);
  Sum sum;
  std::uint64_t term = 0;
  for (const auto& [ctx, row] : total.rows()) {
    Rng rng = derive_stream(seed, {kDicTag, term++});
    const auto [var, se] = sample_variance(log_lik_draws(row, row, prior, draws, rng));
    sum.add(var, se);
  }
  return finish(sum, draws, 2.0);
}

}  // namespace memsel
