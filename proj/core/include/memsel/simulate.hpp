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

// Random h-step networks, trajectory sampling and Monte-Carlo power studies
// for the selection criteria.

#ifndef MEMSEL_SIMULATE_HPP_
#define MEMSEL_SIMULATE_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "memsel/chain.hpp"
#include "memsel/criteria.hpp"
#include "memsel/rng.hpp"

namespace memsel {

// True transition probabilities of an h_true-step chain with a designated
// start state and an absorbing state. The walker sits in start_state before
// its first recorded step; a sampled trajectory lists the states entered
// after that, ending with absorbing_state unless capped.
class RandomNetwork {
 public:
  // Rows must be keyed by depth-h_true history contexts over
  // (start history + recorded steps), each a probability vector of length M.
  RandomNetwork(std::size_t num_states, std::size_t h_true, StateId start_state,
                StateId absorbing_state, std::map<Context, std::vector<double>> rows);

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t h_true() const noexcept { return h_true_; }
  StateId start_state() const noexcept { return start_; }
  StateId absorbing_state() const noexcept { return absorbing_; }
  const std::map<Context, std::vector<double>>& rows() const noexcept { return rows_; }

  // Transition probabilities out of `context`. Throws std::out_of_range when
  // the network has no row for it.
  const std::vector<double>& row(const Context& context) const;

 private:
  std::size_t num_states_;
  std::size_t h_true_;
  StateId start_;
  StateId absorbing_;
  std::map<Context, std::vector<double>> rows_;
};

// Largest context count generate_network() will enumerate.
inline constexpr std::size_t kMaxNetworkContexts = std::size_t{1} << 22;

// One symmetric Dirichlet(1) row per context of depth h_true (START-padded
// contexts included), state 0 as start and state M-1 as absorbing. Each row
// is drawn from its own stream keyed by the context, so the result depends
// only on (M, h_true, seed). Throws std::length_error when the context count
// exceeds kMaxNetworkContexts.
RandomNetwork generate_network(std::size_t num_states, std::size_t h_true, std::uint64_t seed);

struct SampledTrajectory {
  Trajectory trajectory;
  bool truncated = false;  // hit length_cap before absorption
};

SampledTrajectory sample_trajectory(const RandomNetwork& net, std::size_t length_cap, Rng& rng,
                                    std::string id = {});

struct SimConfig {
  std::size_t num_states = 8;
  std::size_t h_true = 1;
  HRange h_range{1, 5};
  std::vector<std::size_t> j_values{4};
  std::size_t replicates = 1000;
  std::size_t length_cap = 10000;
  std::uint64_t seed = 1;
  std::vector<Criterion> criteria{kAllCriteria.begin(), kAllCriteria.end()};
  BoundaryMode boundary_mode = BoundaryMode::kPadded;
  double prior_alpha = 1.0;
  // false: one network per h_true reused by every replicate and J.
  // true: a fresh network for every replicate index.
  bool network_per_replicate = false;
  // 0 = worker_count().
  unsigned threads = 0;
};

// Throws std::invalid_argument for an unusable configuration.
void validate(const SimConfig& cfg);

struct SelectionRow {
  std::string truth;  // "h=1", "jagged", ...
  std::size_t j = 0;  // trajectories (games) per replicate
  Criterion criterion = Criterion::kLoo;
  std::string chosen;  // model label, "h=2", ...
  std::size_t h_chosen = 0;
  std::size_t count = 0;
  double frequency = 0;
};

struct SelectionFrequencyTable {
  std::size_t replicates = 0;
  std::vector<SelectionRow> rows;

  // Fraction of replicates choosing `chosen` (model label); 0 if absent.
  double frequency(std::size_t j, Criterion c, const std::string& chosen) const;
  double frequency(std::size_t j, Criterion c, std::size_t h) const;
};

struct DeltaRow {
  std::size_t h_true = 0;
  std::size_t j = 0;
  Criterion criterion = Criterion::kLoo;
  std::size_t h = 0;
  double min = 0;
  double max = 0;
  double mean = 0;
  double fraction_below_zero = 0;
  std::size_t below_zero = 0;
  std::size_t n = 0;
};

struct DeltaTable {
  std::vector<DeltaRow> rows;
  const DeltaRow* find(std::size_t j, Criterion c, std::size_t h) const;
};

struct PowerStudy {
  SelectionFrequencyTable selection;
  // Empty when h_true lies outside h_range.
  DeltaTable deltas;
  std::size_t truncated_trajectories = 0;
};

// Runs every replicate once and derives both tables from the same draws.
PowerStudy run_power_study(const SimConfig& cfg);

SelectionFrequencyTable power_analysis(const SimConfig& cfg);

// Criterion(h) - Criterion(h_true) summaries. Requires h_true in h_range.
DeltaTable delta_distributions(const SimConfig& cfg);

// Binary hit/miss model with one-shot memory: P(hit) for the first shot of
// a game, after a hit and after a miss.
struct FreeThrowModel {
  std::string name = "h=1";
  double p_hit_first = 0.5;
  double p_hit_after_hit = 0.5;
  double p_hit_after_miss = 0.5;

  static FreeThrowModel independent(double p_hit);
  static FreeThrowModel jagged(double p_after_miss, double p_otherwise);
};

// Free-throw alphabet: state 0 = "miss", state 1 = "hit".
std::shared_ptr<const StateAlphabet> free_throw_alphabet();

// Maximum-likelihood h = 1 padded model (first / after hit / after miss).
// Rows with no data fall back to the pooled hit rate.
FreeThrowModel fit_free_throw_model(std::span<const Trajectory> games);

struct FreeThrowSimConfig {
  std::size_t games = 91;
  double shots_per_game = 693.0 / 91.0;
  FreeThrowModel truth;
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  HRange h_range{0, 3};
  BoundaryMode boundary_mode = BoundaryMode::kPadded;
  double prior_alpha = 1.0;
  std::vector<Criterion> criteria{kAllCriteria.begin(), kAllCriteria.end()};
  // Also score the jagged two-class model each replicate.
  bool include_jagged = true;
  unsigned threads = 0;
};

void validate(const FreeThrowSimConfig& cfg);

struct FreeThrowStudy {
  // Chosen h over h_range only (the jagged model is not a candidate here).
  SelectionFrequencyTable selection;
  // Per criterion: fraction of replicates in which the jagged model scores
  // strictly below both the h = 0 and the h = 1 model. Empty unless
  // include_jagged and h_range covers 0 and 1.
  std::map<Criterion, double> jagged_beats_both;
  // Mean shots per replicate, for reporting.
  double mean_shots = 0;
};

// Draws per-game shot counts from Poisson(shots_per_game) (zero-shot games
// are dropped), samples outcomes from the true model and runs order
// selection on each replicate.
FreeThrowStudy free_throw_power(const FreeThrowSimConfig& cfg);

// One replicate's games, exposed for testing. Games with zero shots are
// omitted, so fewer than cfg.games trajectories may come back.
std::vector<Trajectory> sample_free_throw_games(const FreeThrowSimConfig& cfg, Rng& rng);

}  // namespace memsel

#endif  // MEMSEL_SIMULATE_HPP_
