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

// Closed-form model-selection criteria for Dirichlet-multinomial h-step
// Markov models, and order selection across a range of h.
//
// Every criterion is reported on the deviance scale (-2 x log density), so a
// lower value is always better. Rows with zero counts contribute nothing and
// are skipped.

#ifndef MEMSEL_CRITERIA_HPP_
#define MEMSEL_CRITERIA_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memsel/chain.hpp"

namespace memsel {

// Dirichlet hyperparameters shared by every context row.
class DirichletPrior {
 public:
  // Throws std::invalid_argument unless every component is finite and > 0.
  explicit DirichletPrior(std::vector<double> alpha);
  static DirichletPrior symmetric(std::size_t m, double a = 1.0);

  std::size_t size() const noexcept { return alpha_.size(); }
  std::span<const double> alpha() const noexcept { return alpha_; }
  double operator[](std::size_t m) const { return alpha_[m]; }
  // Sum of the components (M alpha for a symmetric prior).
  double concentration() const noexcept { return concentration_; }

 private:
  std::vector<double> alpha_;
  double concentration_;
};

struct PosteriorSummary {
  // alpha + N_x per observed context.
  std::map<Context, std::vector<double>> parameters;
  // (alpha_m + N_xm) / (sum(alpha) + N_x).
  std::map<Context, std::vector<double>> means;
  // Shared by unobserved contexts: the prior itself.
  std::vector<double> prior_mean;
};

PosteriorSummary posterior_summary(const CountTable& total, const DirichletPrior& prior);

// Criterion value together with its effective-complexity term.
struct Penalized {
  double value;
  double k;
};

// -2 sum N log(N / N_x) + 2 k_params, with 0 log 0 = 0.
double aic(const CountTable& total, std::int64_t k_params);

// M^h (M - 1). Throws std::overflow_error when it does not fit in int64.
std::int64_t default_param_count(std::size_t m, std::size_t h);

// Free rows of an untied model: M^h (M - 1) when truncated; padded tables
// also carry every START-prefixed context, giving M^(h+1) - 1.
std::int64_t model_param_count(std::size_t m, std::size_t h, BoundaryMode mode);

// Log predictive density of the whole data set (natural-log scale, not
// multiplied by -2).
double lpd(const CountTable& total, const DirichletPrior& prior);

// Log pointwise predictive density, trajectories as points.
double lppd(const TrajectoryCounts& tc, const DirichletPrior& prior);

// -2 sum N log(posterior mean) over all transitions.
double dic_deviance(const CountTable& total, const DirichletPrior& prior);

// variant 1: k from posterior-mean log densities (digamma form);
// variant 2: k from posterior variances (trigamma form).
Penalized waic(const TrajectoryCounts& tc, const DirichletPrior& prior, int variant);
Penalized dic(const TrajectoryCounts& tc, const DirichletPrior& prior, int variant);

// Leave-one-trajectory-out predictive density, deviance scale.
double loo(const TrajectoryCounts& tc, const DirichletPrior& prior);

// Two-fold cross-validated LPPD, deviance scale. The first floor(J/2)
// trajectories form one fold, the rest the other; with shuffle_seed the order
// is permuted first. Depends on trajectory order. Throws for J < 2.
double lppd_cv2(const TrajectoryCounts& tc, const DirichletPrior& prior,
                std::optional<std::uint64_t> shuffle_seed = std::nullopt);

enum class Criterion { kAic, kDic1, kDic2, kLpd, kLppd, kWaic1, kWaic2, kLoo, kCv2 };

inline constexpr std::array<Criterion, 9> kAllCriteria = {
    Criterion::kAic,   Criterion::kDic1,  Criterion::kDic2, Criterion::kLpd, Criterion::kLppd,
    Criterion::kWaic1, Criterion::kWaic2, Criterion::kLoo,  Criterion::kCv2};

// "AIC", "DIC1", "DIC2", "LPD", "LPPD", "WAIC1", "WAIC2", "LOO", "LPPD_CV2".
std::string_view criterion_name(Criterion c);
// Case-insensitive; also accepts "CV2".
Criterion parse_criterion(std::string_view name);

enum class AicPenalty {
  kFreeParameters,  // k = model_param_count(), or C (M - 1) for tied tables
  kFull,            // k = M^(h + 1), or C M for tied tables
};

struct EvalOptions {
  AicPenalty aic_penalty = AicPenalty::kFreeParameters;
  std::optional<std::uint64_t> cv_shuffle_seed;
};

struct CriterionReport {
  std::string model;  // "h=1", "jagged(h=1)", ...
  std::size_t h = 0;
  BoundaryMode boundary_mode = BoundaryMode::kPadded;
  std::size_t num_trajectories = 0;
  std::int64_t transitions = 0;
  std::int64_t num_params = 0;

  double aic = 0;
  double dic1 = 0;
  double dic2 = 0;
  double lpd = 0;   // -2 LPD
  double lppd = 0;  // -2 LPPD
  double waic1 = 0;
  double waic2 = 0;
  double loo = 0;
  // Absent for a single trajectory.
  std::optional<double> cv2;

  double dic_deviance = 0;
  double k_aic = 0;
  double k_dic1 = 0;
  double k_dic2 = 0;
  double k_waic1 = 0;
  double k_waic2 = 0;

  // NaN for an absent CV2.
  double value(Criterion c) const;
};

CriterionReport evaluate(const TrajectoryCounts& tc, const DirichletPrior& prior,
                         const EvalOptions& options = {}, std::string model = {});

struct HRange {
  int lo = 0;
  int hi = 0;
};

struct OrderSelection {
  std::size_t best_h = 0;
  std::vector<CriterionReport> reports;
};

// Index of the report minimizing the criterion; the first (smallest h) wins
// ties. NaN values never win. Throws for an empty list.
std::size_t argmin(std::span<const CriterionReport> reports, Criterion criterion);

// Evaluates every criterion for every h in the inclusive range and picks the
// argmin of `criterion`.
OrderSelection select_order(std::span<const Trajectory> trajectories,
                            std::shared_ptr<const StateAlphabet> alphabet, HRange range,
                            const DirichletPrior& prior, BoundaryMode mode,
                            Criterion criterion, const EvalOptions& options = {});

}  // namespace memsel

#endif  // MEMSEL_CRITERIA_HPP_
