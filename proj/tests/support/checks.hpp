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

// Shared check routines for the unit and acceptance suites. Each returns a
// list of human-readable failures; an empty list means the check passed.

#ifndef MEMSEL_TESTS_SUPPORT_CHECKS_HPP_
#define MEMSEL_TESTS_SUPPORT_CHECKS_HPP_

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "instances.hpp"
#include "memsel/criteria.hpp"
#include "memsel/oracle.hpp"

namespace memsel::testing {

using Failures = std::vector<std::string>;

inline bool close(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * (1.0 + std::max(std::abs(a), std::abs(b)));
}

struct OracleCheck {
  Failures failures;
  double max_abs_z = 0.0;
  std::size_t comparisons = 0;
};

// Closed form against the Monte-Carlo estimators, |z| <= z_max each.
inline OracleCheck oracle_agreement(const Instance& inst, std::size_t draws, std::uint64_t seed,
                                    double z_max) {
  OracleCheck out;
  const auto& tc = inst.counts;
  const auto& prior = inst.prior;
  auto cmp = [&](const char* what, double closed, const OracleEstimate& mc) {
    ++out.comparisons;
    double z = 0.0;
    if (mc.std_error > 0) {
      z = (closed - mc.estimate) / mc.std_error;
    } else if (!close(closed, mc.estimate, 1e-12)) {
      z = INFINITY;
    }
    out.max_abs_z = std::max(out.max_abs_z, std::abs(z));
    if (!(std::abs(z) <= z_max)) {
      out.failures.push_back(fmt::format("{} {}: closed {:.8g} vs mc {:.8g} +- {:.3g} (z={:.2f})",
                                         inst.label, what, closed, mc.estimate, mc.std_error, z));
    }
  };
  cmp("LPD", lpd(tc.total(), prior), mc_lpd(tc.total(), prior, draws, seed));
  cmp("LPPD", lppd(tc, prior), mc_lppd(tc, prior, draws, seed + 1));
  cmp("LOO", loo(tc, prior), mc_loo(tc, prior, draws, seed + 2));
  if (tc.num_trajectories() >= 2) {
    cmp("CV2", lppd_cv2(tc, prior), mc_cv2(tc, prior, draws, seed + 3));
  }
  cmp("k_WAIC2", waic(tc, prior, 2).k, mc_variance_loglik(tc, prior, draws, seed + 4));
  cmp("k_DIC2", dic(tc, prior, 2).k, mc_k_dic2(tc.total(), prior, draws, seed + 5));
  return out;
}

// Closed-form LOO and CV2 against literal refit loops, compared with ==.
inline Failures refit_equivalence(const Instance& inst) {
  Failures f;
  const double closed_loo = loo(inst.counts, inst.prior);
  const double ref_loo = refit_loo(inst.counts, inst.prior);
  if (closed_loo != ref_loo) {
    f.push_back(fmt::format("{} LOO: {:.17g} != refit {:.17g}", inst.label, closed_loo, ref_loo));
  }
  if (inst.counts.num_trajectories() >= 2) {
    const double closed_cv = lppd_cv2(inst.counts, inst.prior);
    const double ref_cv = refit_cv2(inst.counts, inst.prior);
    if (closed_cv != ref_cv) {
      f.push_back(fmt::format("{} CV2: {:.17g} != refit {:.17g}", inst.label, closed_cv, ref_cv));
    }
  }
  return f;
}

inline Instance permute_states(const Instance& inst, const std::vector<StateId>& perm) {
  auto map_ctx = [&](const Context& c) {
    std::vector<StateId> t(c.tokens().begin(), c.tokens().end());
    for (auto& s : t) {
      if (s != kStart) s = perm[static_cast<std::size_t>(s)];
    }
    return Context::history(t);
  };
  std::vector<TrajectoryCounts::Entry> tables;
  for (const auto& [id, table] : inst.counts.per_trajectory()) {
    CountRows rows;
    for (const auto& [ctx, row] : table.rows()) {
      CountVector out(row.size());
      for (std::size_t k = 0; k < row.size(); ++k) out[static_cast<std::size_t>(perm[k])] = row[k];
      rows.emplace(map_ctx(ctx), out);
    }
    tables.emplace_back(id, CountTable(table.h(), inst.alphabet, table.boundary_mode(),
                                       std::move(rows)));
  }
  std::vector<double> alpha(inst.prior.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) alpha[static_cast<std::size_t>(perm[k])] = inst.prior[k];
  return {inst.alphabet, TrajectoryCounts::from_tables(std::move(tables)),
          DirichletPrior(std::move(alpha)), inst.label + " permuted"};
}

inline Instance reverse_trajectories(const Instance& inst) {
  auto tables = inst.counts.per_trajectory();
  std::reverse(tables.begin(), tables.end());
  return {inst.alphabet, TrajectoryCounts::from_tables(std::move(tables)), inst.prior,
          inst.label + " reversed"};
}

// Posterior mean of the log-likelihood, via boost digamma.
inline double ref_expected_loglik(const CountTable& total, const DirichletPrior& prior) {
  using boost::math::digamma;
  double acc = 0.0;
  for (const auto& [ctx, row] : total.rows()) {
    double nx = 0.0;
    for (auto c : row) nx += static_cast<double>(c);
    const double a0 = prior.concentration() + nx;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] == 0) continue;
      acc += static_cast<double>(row[k]) * (digamma(row[k] + prior[k]) - digamma(a0));
    }
  }
  return acc;
}

// Posterior variance of sum_m test_m log p_m under Dirichlet(alpha + train).
inline double ref_loglik_variance(const CountVector& test, const CountVector& train,
                                  const DirichletPrior& prior) {
  using boost::math::trigamma;
  double nt = 0.0, a0 = prior.concentration();
  for (std::size_t k = 0; k < test.size(); ++k) {
    nt += static_cast<double>(test[k]);
    a0 += static_cast<double>(train[k]);
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < test.size(); ++k) {
    const double n = static_cast<double>(test[k]);
    acc += n * n * trigamma(prior[k] + static_cast<double>(train[k]));
  }
  return acc - nt * nt * trigamma(a0);
}

inline Failures invariants(const Instance& inst, std::mt19937_64& rng) {
  Failures f;
  const auto& tc = inst.counts;
  const auto& prior = inst.prior;
  const auto base = evaluate(tc, prior);
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) f.push_back(inst.label + ": " + what);
  };

  // Relabeling states (prior permuted alike) changes nothing.
  std::vector<StateId> perm(prior.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto permuted = evaluate(permute_states(inst, perm).counts,
                                 permute_states(inst, perm).prior);
  for (Criterion c : kAllCriteria) {
    const double a = base.value(c), b = permuted.value(c);
    expect((std::isnan(a) && std::isnan(b)) || close(a, b),
           fmt::format("state permutation changed {} ({} vs {})", criterion_name(c), a, b));
  }

  // Trajectory order matters only to the fold split.
  const auto rev = evaluate(reverse_trajectories(inst).counts, prior);
  for (Criterion c : kAllCriteria) {
    if (c == Criterion::kCv2) continue;
    expect(close(base.value(c), rev.value(c)),
           fmt::format("trajectory order changed {}", criterion_name(c)));
  }

  // Definitional identities.
  const double e_loglik = ref_expected_loglik(tc.total(), prior);
  expect(close(base.waic1, base.lppd + 2.0 * base.k_waic1), "WAIC1 != -2 LPPD + 2k");
  expect(close(base.waic2, base.lppd + 2.0 * base.k_waic2), "WAIC2 != -2 LPPD + 2k");
  expect(close(base.dic1, base.dic_deviance + 2.0 * base.k_dic1), "DIC1 != deviance + 2k");
  expect(close(base.dic2, base.dic_deviance + 2.0 * base.k_dic2), "DIC2 != deviance + 2k");
  expect(close(base.k_waic1, -base.lppd - 2.0 * e_loglik, 1e-8),
         "k_WAIC1 != 2 (LPPD - E[log lik])");
  expect(close(base.k_dic1, -base.dic_deviance - 2.0 * e_loglik, 1e-8),
         "k_DIC1 != 2 (log lik at mean - E[log lik])");
  double k2 = 0.0;
  for (const auto& [id, table] : tc.per_trajectory()) {
    for (const auto& [ctx, row] : table.rows()) {
      k2 += ref_loglik_variance(row, *tc.total().find(ctx), prior);
    }
  }
  expect(close(base.k_waic2, k2, 1e-8), fmt::format("k_WAIC2 {} != reference {}", base.k_waic2, k2));
  double kd = 0.0;
  for (const auto& [ctx, row] : tc.total().rows()) kd += ref_loglik_variance(row, row, prior);
  expect(close(base.k_dic2, 2.0 * kd, 1e-8), fmt::format("k_DIC2 {} != reference {}", base.k_dic2, 2.0 * kd));

  // Complexities are non-negative.
  for (double k : {base.k_waic1, base.k_waic2, base.k_dic1, base.k_dic2}) {
    expect(k >= -1e-10, fmt::format("negative complexity {}", k));
  }

  // Pooling everything into one trajectory makes LPPD collapse to LPD and
  // LOO to the prior predictive.
  std::vector<TrajectoryCounts::Entry> one;
  one.emplace_back("all", tc.total());
  const auto pooled = TrajectoryCounts::from_tables(std::move(one));
  expect(close(lppd(pooled, prior), lpd(tc.total(), prior)), "J=1 LPPD != LPD");
  double prior_pred = 0.0;
  for (const auto& [ctx, row] : tc.total().rows()) {
    prior_pred += ref_log_predictive(CountVector(row.size(), 0), row, prior);
  }
  expect(close(loo(pooled, prior), -2.0 * prior_pred), "J=1 LOO != prior predictive");

  // AIC does not see the prior.
  const auto other = evaluate(tc, DirichletPrior::symmetric(prior.size(), 3.0));
  expect(base.aic == other.aic, "AIC depends on the prior");
  return f;
}

}  // namespace memsel::testing

#endif  // MEMSEL_TESTS_SUPPORT_CHECKS_HPP_
