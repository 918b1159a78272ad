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

#include "memsel/criteria.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "memsel/rng.hpp"
#include "memsel/specfun.hpp"

namespace memsel {
namespace {

void check_prior(const CountTable& table, const DirichletPrior& prior) {
  if (prior.size() != table.num_states()) {
    throw std::invalid_argument("prior has " + std::to_string(prior.size()) +
                                " components but the alphabet has " +
                                std::to_string(table.num_states()) + " states");
  }
}

// Log-beta of integer count vectors shifted by the prior.
class BetaTerms {
 public:
  explicit BetaTerms(const DirichletPrior& prior) : prior_(prior), buf_(prior.size()) {}

  // ln B(n + alpha)
  double of(const CountVector& n) {
    for (std::size_t m = 0; m < buf_.size(); ++m) {
      buf_[m] = static_cast<double>(n[m]) + prior_[m];
    }
    return log_multivariate_beta(buf_);
  }

  // ln B(n + sign * extra + alpha); sign is +1 or -1.
  double of(const CountVector& n, const CountVector& extra, int sign) {
    for (std::size_t m = 0; m < buf_.size(); ++m) {
      buf_[m] = static_cast<double>(n[m] + sign * extra[m]) + prior_[m];
    }
    return log_multivariate_beta(buf_);
  }

 private:
  const DirichletPrior& prior_;
  std::vector<double> buf_;
};

std::int64_t row_sum(const CountVector& row) {
  return std::accumulate(row.begin(), row.end(), std::int64_t{0});
}

const CountVector& total_row(const CountTable& total, const Context& ctx) {
  const auto* row = total.find(ctx);
  if (!row) throw std::logic_error("per-trajectory context missing from total table");
  return *row;
}

// sum_x sum_m N_xm [psi(alpha_m + N_xm) - psi(alpha0 + N_x)]: the posterior
// expectation of the log likelihood.
double expected_loglik(const CountTable& total, const DirichletPrior& prior) {
  double acc = 0.0;
  for (const auto& [ctx, row] : total.rows()) {
    const double nx = static_cast<double>(row_sum(row));
    const double psi_total = digamma(prior.concentration() + nx);
    for (std::size_t m = 0; m < row.size(); ++m) {
      if (row[m] == 0) continue;
      const double n = static_cast<double>(row[m]);
      acc += n * (digamma(prior[m] + n) - psi_total);
    }
  }
  return acc;
}

// sum_m n_m^2 psi'(alpha_m + N_m) - n^2 psi'(alpha0 + N): posterior variance of
// sum_m n_m log p_m under Dirichlet(alpha + N).
double loglik_variance(const CountVector& n, const CountVector& posterior_counts,
                       const DirichletPrior& prior) {
  const double big_n = static_cast<double>(row_sum(posterior_counts));
  const double small_n = static_cast<double>(row_sum(n));
  double acc = 0.0;
  for (std::size_t m = 0; m < n.size(); ++m) {
    if (n[m] == 0) continue;
    const double nm = static_cast<double>(n[m]);
    acc += nm * nm * trigamma(prior[m] + static_cast<double>(posterior_counts[m]));
  }
  return acc - small_n * small_n * trigamma(prior.concentration() + big_n);
}

}  // namespace

DirichletPrior::DirichletPrior(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.empty()) throw std::invalid_argument("Dirichlet prior needs components");
  for (double a : alpha_) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("Dirichlet prior components must be finite and > 0");
    }
  }
  concentration_ = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
}

DirichletPrior DirichletPrior::symmetric(std::size_t m, double a) {
  return DirichletPrior(std::vector<double>(m, a));
}

PosteriorSummary posterior_summary(const CountTable& total, const DirichletPrior& prior) {
  check_prior(total, prior);
  PosteriorSummary s;
  const std::size_t m = prior.size();
  s.prior_mean.resize(m);
  for (std::size_t k = 0; k < m; ++k) s.prior_mean[k] = prior[k] / prior.concentration();
  for (const auto& [ctx, row] : total.rows()) {
    std::vector<double> params(m), means(m);
    const double denom = prior.concentration() + static_cast<double>(row_sum(row));
    for (std::size_t k = 0; k < m; ++k) {
      params[k] = prior[k] + static_cast<double>(row[k]);
      means[k] = params[k] / denom;
    }
    s.parameters.emplace(ctx, std::move(params));
    s.means.emplace(ctx, std::move(means));
  }
  return s;
}

double aic(const CountTable& total, std::int64_t k_params) {
  if (k_params < 1) throw std::invalid_argument("AIC parameter count must be >= 1");
  double loglik = 0.0;
  for (const auto& [ctx, row] : total.rows()) {
    const double nx = static_cast<double>(row_sum(row));
    for (auto c : row) {
      if (c == 0) continue;
      const double n = static_cast<double>(c);
      loglik += n * std::log(n / nx);
    }
  }
  return -2.0 * loglik + 2.0 * static_cast<double>(k_params);
}

namespace {

std::int64_t checked_power(std::size_t m, std::size_t e) {
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  const auto mm = static_cast<std::int64_t>(m);
  std::int64_t power = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (power > kMax / mm) {
      throw std::overflow_error("M^h overflows a 64-bit parameter count (M=" +
                                std::to_string(m) + ", h=" + std::to_string(e) + ")");
    }
    power *= mm;
  }
  return power;
}

}  // namespace

std::int64_t default_param_count(std::size_t m, std::size_t h) {
  if (m < 2) throw std::invalid_argument("parameter count needs M >= 2");
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  const auto mm = static_cast<std::int64_t>(m);
  const std::int64_t power = checked_power(m, h);
  if (power > kMax / (mm - 1)) {
    throw std::overflow_error("M^h (M-1) overflows a 64-bit parameter count");
  }
  return power * (mm - 1);
}

std::int64_t model_param_count(std::size_t m, std::size_t h, BoundaryMode mode) {
  if (mode == BoundaryMode::kTruncated) return default_param_count(m, h);
  if (m < 2) throw std::invalid_argument("parameter count needs M >= 2");
  return checked_power(m, h + 1) - 1;
}

double lpd(const CountTable& total, const DirichletPrior& prior) {
  check_prior(total, prior);
  BetaTerms beta(prior);
  double acc = 0.0;
  for (const auto& [ctx, row] : total.rows()) {
    acc += beta.of(row, row, +1) - beta.of(row);
  }
  return acc;
}

double lppd(const TrajectoryCounts& tc, const DirichletPrior& prior) {
  const CountTable& total = tc.total();
  check_prior(total, prior);
  BetaTerms beta(prior);
  double acc = 0.0;
  for (const auto& [id, table] : tc.per_trajectory()) {
    for (const auto& [ctx, row] : table.rows()) {
      const CountVector& n = total_row(total, ctx);
      acc += beta.of(n, row, +1) - beta.of(n);
    }
  }
  return acc;
}

double dic_deviance(const CountTable& total, const DirichletPrior& prior) {
  check_prior(total, prior);
  double acc = 0.0;
  for (const auto& [ctx, row] : total.rows()) {
    const double denom = prior.concentration() + static_cast<double>(row_sum(row));
    for (std::size_t m = 0; m < row.size(); ++m) {
      if (row[m] == 0) continue;
      const double n = static_cast<double>(row[m]);
      acc += n * std::log((n + prior[m]) / denom);
    }
  }
  return -2.0 * acc;
}

Penalized waic(const TrajectoryCounts& tc, const DirichletPrior& prior, int variant) {
  const CountTable& total = tc.total();
  check_prior(total, prior);
  const double pointwise = lppd(tc, prior);
  double k = 0.0;
  if (variant == 1) {
    k = 2.0 * pointwise - 2.0 * expected_loglik(total, prior);
  } else if (variant == 2) {
    for (const auto& [id, table] : tc.per_trajectory()) {
      for (const auto& [ctx, row] : table.rows()) {
        k += loglik_variance(row, total_row(total, ctx), prior);
      }
    }
  } else {
    throw std::invalid_argument("WAIC variant must be 1 or 2");
  }
  return {-2.0 * pointwise + 2.0 * k, k};
}

Penalized dic(const TrajectoryCounts& tc, const DirichletPrior& prior, int variant) {
  const CountTable& total = tc.total();
  const double deviance = dic_deviance(total, prior);
  double k = 0.0;
  if (variant == 1) {
    // 2 (log-lik at posterior mean - posterior mean log-lik) >= 0.
    k = -deviance - 2.0 * expected_loglik(total, prior);
  } else if (variant == 2) {
    for (const auto& [ctx, row] : total.rows()) k += loglik_variance(row, row, prior);
    k *= 2.0;
  } else {
    throw std::invalid_argument("DIC variant must be 1 or 2");
  }
  return {deviance + 2.0 * k, k};
}

double loo(const TrajectoryCounts& tc, const DirichletPrior& prior) {
  const CountTable& total = tc.total();
  check_prior(total, prior);
  BetaTerms beta(prior);
  double acc = 0.0;
  for (const auto& [id, table] : tc.per_trajectory()) {
    for (const auto& [ctx, row] : table.rows()) {
      const CountVector& n = total_row(total, ctx);
      acc += beta.of(n) - beta.of(n, row, -1);
    }
  }
  return -2.0 * acc;
}

double lppd_cv2(const TrajectoryCounts& tc, const DirichletPrior& prior,
                std::optional<std::uint64_t> shuffle_seed) {
  const std::size_t j_count = tc.num_trajectories();
  if (j_count < 2) throw std::invalid_argument("two-fold CV needs at least two trajectories");
  const CountTable& total = tc.total();
  check_prior(total, prior);
  const std::size_t m = total.num_states();

  std::vector<std::size_t> order(j_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle_seed) {
    Rng rng = derive_stream(*shuffle_seed, {0x63763273ULL});
    std::shuffle(order.begin(), order.end(), rng);
  }
  const std::size_t split = j_count / 2;

  // Fold totals: index 0 = first fold, 1 = second fold.
  std::array<CountRows, 2> fold;
  for (std::size_t i = 0; i < j_count; ++i) {
    auto& target = fold[i < split ? 0 : 1];
    for (const auto& [ctx, row] : tc.per_trajectory()[order[i]].second.rows()) {
      auto [it, inserted] = target.try_emplace(ctx, m, 0);
      for (std::size_t k = 0; k < m; ++k) it->second[k] += row[k];
    }
  }

  BetaTerms beta(prior);
  const CountVector zeros(m, 0);
  double acc = 0.0;
  for (std::size_t i = 0; i < j_count; ++i) {
    // Score each trajectory against the posterior of the opposite fold.
    const CountRows& train = fold[i < split ? 1 : 0];
    for (const auto& [ctx, row] : tc.per_trajectory()[order[i]].second.rows()) {
      auto it = train.find(ctx);
      const CountVector& n = it == train.end() ? zeros : it->second;
      acc += beta.of(n, row, +1) - beta.of(n);
    }
  }
  return -2.0 * acc;
}

std::string_view criterion_name(Criterion c) {
  switch (c) {
    case Criterion::kAic: return "AIC";
    case Criterion::kDic1: return "DIC1";
    case Criterion::kDic2: return "DIC2";
    case Criterion::kLpd: return "LPD";
    case Criterion::kLppd: return "LPPD";
    case Criterion::kWaic1: return "WAIC1";
    case Criterion::kWaic2: return "WAIC2";
    case Criterion::kLoo: return "LOO";
    case Criterion::kCv2: return "LPPD_CV2";
  }
  return "?";
}

Criterion parse_criterion(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "CV2") return Criterion::kCv2;
  for (Criterion c : kAllCriteria) {
    if (criterion_name(c) == upper) return c;
  }
  throw std::invalid_argument("unknown criterion '" + std::string(name) + "'");
}

double CriterionReport::value(Criterion c) const {
  switch (c) {
    case Criterion::kAic: return aic;
    case Criterion::kDic1: return dic1;
    case Criterion::kDic2: return dic2;
    case Criterion::kLpd: return lpd;
    case Criterion::kLppd: return lppd;
    case Criterion::kWaic1: return waic1;
    case Criterion::kWaic2: return waic2;
    case Criterion::kLoo: return loo;
    case Criterion::kCv2: return cv2.value_or(std::numeric_limits<double>::quiet_NaN());
  }
  return std::numeric_limits<double>::quiet_NaN();
}

CriterionReport evaluate(const TrajectoryCounts& tc, const DirichletPrior& prior,
                         const EvalOptions& options, std::string model) {
  const CountTable& total = tc.total();
  check_prior(total, prior);
  const std::size_t m = total.num_states();
  const std::size_t h = total.h();

  CriterionReport r;
  r.model = model.empty() ? "h=" + std::to_string(h) : std::move(model);
  r.h = h;
  r.boundary_mode = total.boundary_mode();
  r.num_trajectories = tc.num_trajectories();
  r.transitions = total.total();

  if (auto classes = total.tie_classes()) {
    const auto c = static_cast<std::int64_t>(*classes);
    const auto mm = static_cast<std::int64_t>(m);
    r.num_params = c * (mm - 1);
    r.k_aic = static_cast<double>(options.aic_penalty == AicPenalty::kFull ? c * mm
                                                                           : r.num_params);
  } else {
    r.num_params = model_param_count(m, h, total.boundary_mode());
    r.k_aic = static_cast<double>(
        options.aic_penalty == AicPenalty::kFull ? checked_power(m, h + 1) : r.num_params);
  }
  r.aic = aic(total, static_cast<std::int64_t>(r.k_aic));

  const double log_pd = lpd(total, prior);
  const double log_ppd = lppd(tc, prior);
  r.lpd = -2.0 * log_pd;
  r.lppd = -2.0 * log_ppd;

  const auto w1 = waic(tc, prior, 1);
  const auto w2 = waic(tc, prior, 2);
  r.waic1 = w1.value;
  r.k_waic1 = w1.k;
  r.waic2 = w2.value;
  r.k_waic2 = w2.k;

  r.dic_deviance = dic_deviance(total, prior);
  const auto d1 = dic(tc, prior, 1);
  const auto d2 = dic(tc, prior, 2);
  r.dic1 = d1.value;
  r.k_dic1 = d1.k;
  r.dic2 = d2.value;
  r.k_dic2 = d2.k;

  r.loo = loo(tc, prior);
  if (tc.num_trajectories() >= 2) r.cv2 = lppd_cv2(tc, prior, options.cv_shuffle_seed);
  return r;
}

std::size_t argmin(std::span<const CriterionReport> reports, Criterion criterion) {
  if (reports.empty()) throw std::invalid_argument("argmin over no reports");
  std::size_t best = reports.size();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const double v = reports[i].value(criterion);
    if (std::isnan(v)) continue;
    if (best == reports.size() || v < reports[best].value(criterion)) best = i;
  }
  return best == reports.size() ? 0 : best;
}

OrderSelection select_order(std::span<const Trajectory> trajectories,
                            std::shared_ptr<const StateAlphabet> alphabet, HRange range,
                            const DirichletPrior& prior, BoundaryMode mode,
                            Criterion criterion, const EvalOptions& options) {
  if (range.lo < 0 || range.hi < range.lo) {
    throw std::invalid_argument("invalid h range " + std::to_string(range.lo) + ".." +
                                std::to_string(range.hi));
  }
  OrderSelection out;
  for (int h = range.lo; h <= range.hi; ++h) {
    const auto tc = count_transitions(trajectories, alphabet, h, mode);
    out.reports.push_back(evaluate(tc, prior, options));
  }
  out.best_h = out.reports[argmin(out.reports, criterion)].h;
  return out;
}

}  // namespace memsel
