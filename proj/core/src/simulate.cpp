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

#include "memsel/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "memsel/tying.hpp"

namespace memsel {
namespace {

constexpr std::uint64_t kNetworkTag = 0x6e6574ULL;
constexpr std::uint64_t kReplicateTag = 0x726570ULL;
constexpr std::uint64_t kFreeThrowTag = 0x667474ULL;

std::uint64_t context_key(const Context& ctx) {
  std::uint64_t key = 0x9b5ULL + ctx.depth();
  for (StateId t : ctx.tokens()) key = mix64(key ^ static_cast<std::uint64_t>(t + 2));
  return key;
}

// Runs task(i) for i in [0, n) on `threads` workers. Tasks write only to
// their own slot, so the outcome is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& task) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(n, threads == 0 ? worker_count() : threads));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          task(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::size_t pick(Rng& rng, const std::vector<double>& probs) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double cum = 0.0;
  for (std::size_t m = 0; m < probs.size(); ++m) {
    cum += probs[m];
    if (u < cum) return m;
  }
  // Rounding left u above the last partial sum: take the last non-zero entry.
  for (std::size_t m = probs.size(); m-- > 0;) {
    if (probs[m] > 0.0) return m;
  }
  return probs.size() - 1;
}

// Per-replicate criterion values laid out [h index][criterion index].
struct ReplicateValues {
  std::vector<double> values;
  std::size_t truncated = 0;
};

std::string h_label(std::size_t h) { return "h=" + std::to_string(h); }

// First index (smallest h) holding the minimum non-NaN value, or npos.
std::size_t argmin_values(const std::vector<double>& v, std::size_t offset, std::size_t stride,
                          std::size_t count) {
  std::size_t best = std::string::npos;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = v[offset + i * stride];
    if (std::isnan(x)) continue;
    if (best == std::string::npos || x < v[offset + best * stride]) best = i;
  }
  return best;
}

}  // namespace

RandomNetwork::RandomNetwork(std::size_t num_states, std::size_t h_true, StateId start_state,
                             StateId absorbing_state,
                             std::map<Context, std::vector<double>> rows)
    : num_states_(num_states),
      h_true_(h_true),
      start_(start_state),
      absorbing_(absorbing_state),
      rows_(std::move(rows)) {
  if (num_states_ < 2) throw std::invalid_argument("a network needs at least two states");
  const auto m = static_cast<StateId>(num_states_);
  if (start_ < 0 || start_ >= m || absorbing_ < 0 || absorbing_ >= m) {
    throw std::invalid_argument("start/absorbing state outside the alphabet");
  }
  for (const auto& [ctx, probs] : rows_) {
    if (ctx.depth() != h_true_ || ctx.is_tie_class()) {
      throw std::invalid_argument("network row context does not have depth h_true");
    }
    if (probs.size() != num_states_) {
      throw std::invalid_argument("network row width differs from the state count");
    }
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0)) throw std::invalid_argument("negative transition probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("network row does not sum to 1");
    }
  }
}

const std::vector<double>& RandomNetwork::row(const Context& context) const {
  auto it = rows_.find(context);
  if (it == rows_.end()) throw std::out_of_range("network has no row for context");
  return it->second;
}

RandomNetwork generate_network(std::size_t num_states, std::size_t h_true, std::uint64_t seed) {
  if (num_states < 2) throw std::invalid_argument("generate_network needs M >= 2");
  if (h_true < 1) throw std::invalid_argument("generate_network needs h_true >= 1");

  // Contexts with k real tokens after h_true - k START tokens, k = 0..h_true.
  std::size_t total = 0;
  std::size_t power = 1;
  for (std::size_t k = 0; k <= h_true; ++k) {
    total += power;
    if (total > kMaxNetworkContexts) {
      throw std::length_error("network with M=" + std::to_string(num_states) + ", h_true=" +
                              std::to_string(h_true) +
                              " has too many contexts to enumerate; use a smaller model");
    }
    if (k < h_true) power *= num_states;
  }

  const std::vector<double> ones(num_states, 1.0);
  std::map<Context, std::vector<double>> rows;
  std::vector<StateId> tokens(h_true);
  for (std::size_t k = 0; k <= h_true; ++k) {
    const std::size_t pad = h_true - k;
    std::fill(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(pad), kStart);
    std::vector<std::size_t> digits(k, 0);
    while (true) {
      for (std::size_t i = 0; i < k; ++i) tokens[pad + i] = static_cast<StateId>(digits[i]);
      Context ctx = Context::history(tokens);
      Rng rng = derive_stream(seed, {kNetworkTag, context_key(ctx)});
      std::vector<double> probs(num_states);
      sample_dirichlet(rng, ones, probs);
      rows.emplace(std::move(ctx), std::move(probs));
      // Odometer increment over the k real tokens.
      std::size_t pos = k;
      while (pos > 0) {
        if (++digits[pos - 1] < num_states) break;
        digits[pos - 1] = 0;
        --pos;
      }
      if (pos == 0) break;
    }
  }
  return RandomNetwork(num_states, h_true, 0, static_cast<StateId>(num_states - 1),
                       std::move(rows));
}

SampledTrajectory sample_trajectory(const RandomNetwork& net, std::size_t length_cap, Rng& rng,
                                    std::string id) {
  if (length_cap < 1) throw std::invalid_argument("length cap must be >= 1");
  const std::size_t h = net.h_true();
  SampledTrajectory out;
  out.trajectory.id = std::move(id);
  auto& steps = out.trajectory.steps;

  // Path so far, starting from the start state, kept h deep.
  std::vector<StateId> window(h, kStart);
  if (h > 0) window.back() = net.start_state();
  while (true) {
    const auto& probs = net.row(Context::history(window));
    const auto next = static_cast<StateId>(pick(rng, probs));
    steps.push_back(next);
    if (next == net.absorbing_state()) break;
    if (steps.size() >= length_cap) {
      out.truncated = true;
      break;
    }
    if (h > 0) {
      std::rotate(window.begin(), window.begin() + 1, window.end());
      window.back() = next;
    }
  }
  return out;
}

void validate(const SimConfig& cfg) {
  if (cfg.num_states < 2) throw std::invalid_argument("simulation needs M >= 2");
  if (cfg.h_true < 1) throw std::invalid_argument("simulation needs h_true >= 1");
  if (cfg.h_range.lo < 0 || cfg.h_range.hi < cfg.h_range.lo) {
    throw std::invalid_argument("invalid h range");
  }
  if (cfg.j_values.empty()) throw std::invalid_argument("no J values");
  for (auto j : cfg.j_values) {
    if (j < 1) throw std::invalid_argument("J values must be >= 1");
  }
  if (cfg.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (cfg.length_cap < 1) throw std::invalid_argument("length cap must be >= 1");
  if (cfg.criteria.empty()) throw std::invalid_argument("no criteria selected");
  if (!(cfg.prior_alpha > 0.0)) throw std::invalid_argument("prior alpha must be > 0");
}

double SelectionFrequencyTable::frequency(std::size_t j, Criterion c,
                                          const std::string& chosen) const {
  for (const auto& r : rows) {
    if (r.j == j && r.criterion == c && r.chosen == chosen) return r.frequency;
  }
  return 0.0;
}

double SelectionFrequencyTable::frequency(std::size_t j, Criterion c, std::size_t h) const {
  return frequency(j, c, h_label(h));
}

const DeltaRow* DeltaTable::find(std::size_t j, Criterion c, std::size_t h) const {
  for (const auto& r : rows) {
    if (r.j == j && r.criterion == c && r.h == h) return &r;
  }
  return nullptr;
}

PowerStudy run_power_study(const SimConfig& cfg) {
  validate(cfg);
  const std::size_t m = cfg.num_states;
  const auto h_lo = static_cast<std::size_t>(cfg.h_range.lo);
  const std::size_t num_h = static_cast<std::size_t>(cfg.h_range.hi - cfg.h_range.lo) + 1;
  const std::size_t num_c = cfg.criteria.size();
  const std::size_t num_j = cfg.j_values.size();
  const std::size_t reps = cfg.replicates;

  auto alphabet = std::make_shared<const StateAlphabet>(StateAlphabet::indexed(m));
  const auto prior = DirichletPrior::symmetric(m, cfg.prior_alpha);

  std::optional<RandomNetwork> shared_net;
  if (!cfg.network_per_replicate) {
    shared_net = generate_network(m, cfg.h_true, mix64(cfg.seed ^ kNetworkTag));
  }

  std::vector<ReplicateValues> results(num_j * reps);
  parallel_for(results.size(), cfg.threads, [&](std::size_t task) {
    const std::size_t ji = task / reps;
    const std::size_t rep = task % reps;
    const std::size_t j = cfg.j_values[ji];

    std::optional<RandomNetwork> own_net;
    if (!shared_net) {
      own_net = generate_network(m, cfg.h_true, derive_stream(cfg.seed, {kNetworkTag, rep})());
    }
    const RandomNetwork& net = shared_net ? *shared_net : *own_net;

    Rng rng = derive_stream(cfg.seed, {kReplicateTag, j, rep});
    ReplicateValues out;
    std::vector<Trajectory> trajs;
    trajs.reserve(j);
    for (std::size_t i = 0; i < j; ++i) {
      auto s = sample_trajectory(net, cfg.length_cap, rng, "t" + std::to_string(i));
      out.truncated += s.truncated ? 1 : 0;
      trajs.push_back(std::move(s.trajectory));
    }
    out.values.assign(num_h * num_c, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t hi = 0; hi < num_h; ++hi) {
      const auto tc =
          count_transitions(trajs, alphabet, static_cast<int>(h_lo + hi), cfg.boundary_mode);
      const auto report = evaluate(tc, prior);
      for (std::size_t ci = 0; ci < num_c; ++ci) {
        out.values[hi * num_c + ci] = report.value(cfg.criteria[ci]);
      }
    }
    results[task] = std::move(out);
  });

  PowerStudy study;
  study.selection.replicates = reps;
  const std::string truth = h_label(cfg.h_true);
  const bool have_delta = cfg.h_true >= h_lo && cfg.h_true < h_lo + num_h;
  const std::size_t true_idx = cfg.h_true - h_lo;

  for (const auto& r : results) study.truncated_trajectories += r.truncated;

  for (std::size_t ji = 0; ji < num_j; ++ji) {
    const std::size_t j = cfg.j_values[ji];
    for (std::size_t ci = 0; ci < num_c; ++ci) {
      std::vector<std::size_t> counts(num_h, 0);
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const auto best = argmin_values(results[ji * reps + rep].values, ci, num_c, num_h);
        if (best != std::string::npos) ++counts[best];
      }
      for (std::size_t hi = 0; hi < num_h; ++hi) {
        SelectionRow row;
        row.truth = truth;
        row.j = j;
        row.criterion = cfg.criteria[ci];
        row.h_chosen = h_lo + hi;
        row.chosen = h_label(row.h_chosen);
        row.count = counts[hi];
        row.frequency = static_cast<double>(counts[hi]) / static_cast<double>(reps);
        study.selection.rows.push_back(std::move(row));
      }

      if (!have_delta) continue;
      for (std::size_t hi = 0; hi < num_h; ++hi) {
        DeltaRow d;
        d.h_true = cfg.h_true;
        d.j = j;
        d.criterion = cfg.criteria[ci];
        d.h = h_lo + hi;
        d.min = std::numeric_limits<double>::infinity();
        d.max = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
          const auto& v = results[ji * reps + rep].values;
          const double delta = v[hi * num_c + ci] - v[true_idx * num_c + ci];
          if (std::isnan(delta)) continue;
          d.min = std::min(d.min, delta);
          d.max = std::max(d.max, delta);
          sum += delta;
          if (delta < 0.0) ++d.below_zero;
          ++d.n;
        }
        if (d.n > 0) {
          d.mean = sum / static_cast<double>(d.n);
          d.fraction_below_zero = static_cast<double>(d.below_zero) / static_cast<double>(d.n);
        } else {
          d.min = d.max = d.mean = std::numeric_limits<double>::quiet_NaN();
        }
        study.deltas.rows.push_back(d);
      }
    }
  }
  return study;
}

SelectionFrequencyTable power_analysis(const SimConfig& cfg) {
  return run_power_study(cfg).selection;
}

DeltaTable delta_distributions(const SimConfig& cfg) {
  if (cfg.h_range.lo < 0 || static_cast<std::size_t>(cfg.h_range.lo) > cfg.h_true ||
      static_cast<std::size_t>(cfg.h_range.hi) < cfg.h_true) {
    throw std::invalid_argument("delta distributions need h_true inside the h range");
  }
  return run_power_study(cfg).deltas;
}

FreeThrowModel FreeThrowModel::independent(double p_hit) {
  return FreeThrowModel{"h=0", p_hit, p_hit, p_hit};
}

FreeThrowModel FreeThrowModel::jagged(double p_after_miss, double p_otherwise) {
  return FreeThrowModel{"jagged", p_otherwise, p_otherwise, p_after_miss};
}

std::shared_ptr<const StateAlphabet> free_throw_alphabet() {
  static const auto alphabet =
      std::make_shared<const StateAlphabet>(std::vector<std::string>{"miss", "hit"});
  return alphabet;
}

FreeThrowModel fit_free_throw_model(std::span<const Trajectory> games) {
  const auto tc = count_transitions(games, free_throw_alphabet(), 1, BoundaryMode::kPadded);
  const auto& total = tc.total();
  constexpr StateId kMiss = 0;
  constexpr StateId kHit = 1;
  std::int64_t hits = 0;
  for (const auto& [ctx, row] : total.rows()) hits += row[kHit];
  const double pooled =
      static_cast<double>(hits) / static_cast<double>(std::max<std::int64_t>(total.total(), 1));
  auto rate = [&](StateId prev) {
    const Context ctx = Context::history({prev});
    const auto n = total.row_total(ctx);
    return n == 0 ? pooled : static_cast<double>(total.count(ctx, kHit)) / static_cast<double>(n);
  };
  return FreeThrowModel{"fitted(h=1)", rate(kStart), rate(kHit), rate(kMiss)};
}

void validate(const FreeThrowSimConfig& cfg) {
  if (cfg.games < 1) throw std::invalid_argument("free-throw simulation needs games >= 1");
  if (!(cfg.shots_per_game > 0.0) || !std::isfinite(cfg.shots_per_game)) {
    throw std::invalid_argument("shots-per-game rate must be > 0");
  }
  for (double p : {cfg.truth.p_hit_first, cfg.truth.p_hit_after_hit, cfg.truth.p_hit_after_miss}) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("hit probability outside [0, 1]");
  }
  if (cfg.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (cfg.h_range.lo < 0 || cfg.h_range.hi < cfg.h_range.lo) {
    throw std::invalid_argument("invalid h range");
  }
  if (cfg.criteria.empty()) throw std::invalid_argument("no criteria selected");
  if (!(cfg.prior_alpha > 0.0)) throw std::invalid_argument("prior alpha must be > 0");
}

std::vector<Trajectory> sample_free_throw_games(const FreeThrowSimConfig& cfg, Rng& rng) {
  std::poisson_distribution<int> shots(cfg.shots_per_game);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Trajectory> games;
  for (std::size_t g = 0; g < cfg.games; ++g) {
    const int n = shots(rng);
    if (n == 0) continue;
    Trajectory t{"game" + std::to_string(g + 1), {}};
    t.steps.reserve(static_cast<std::size_t>(n));
    double p = cfg.truth.p_hit_first;
    for (int s = 0; s < n; ++s) {
      const bool hit = unif(rng) < p;
      t.steps.push_back(hit ? 1 : 0);
      p = hit ? cfg.truth.p_hit_after_hit : cfg.truth.p_hit_after_miss;
    }
    games.push_back(std::move(t));
  }
  return games;
}

FreeThrowStudy free_throw_power(const FreeThrowSimConfig& cfg) {
  validate(cfg);
  const auto h_lo = static_cast<std::size_t>(cfg.h_range.lo);
  const std::size_t num_h = static_cast<std::size_t>(cfg.h_range.hi - cfg.h_range.lo) + 1;
  const std::size_t num_c = cfg.criteria.size();
  const bool score_jagged = cfg.include_jagged && h_lo == 0 && num_h >= 2;
  // Jagged values, when scored, occupy the slot after the last h.
  const std::size_t slots = num_h + (score_jagged ? 1 : 0);

  const auto alphabet = free_throw_alphabet();
  const auto prior = DirichletPrior::symmetric(2, cfg.prior_alpha);
  const auto jagged = jagged_free_throw_map(*alphabet, cfg.boundary_mode);

  std::vector<ReplicateValues> results(cfg.replicates);
  std::vector<std::size_t> shot_totals(cfg.replicates, 0);
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t rep) {
    Rng rng = derive_stream(cfg.seed, {kFreeThrowTag, rep});
    auto games = sample_free_throw_games(cfg, rng);
    while (games.empty()) games = sample_free_throw_games(cfg, rng);
    for (const auto& g : games) shot_totals[rep] += g.steps.size();

    ReplicateValues out;
    out.values.assign(slots * num_c, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t hi = 0; hi < num_h; ++hi) {
      const int h = static_cast<int>(h_lo + hi);
      const auto tc = count_transitions(games, alphabet, h, cfg.boundary_mode);
      const auto report = evaluate(tc, prior);
      for (std::size_t ci = 0; ci < num_c; ++ci) {
        out.values[hi * num_c + ci] = report.value(cfg.criteria[ci]);
      }
      if (score_jagged && h == 1) {
        const auto tied = evaluate(tie_counts(tc, jagged), prior, {}, "jagged(h=1)");
        for (std::size_t ci = 0; ci < num_c; ++ci) {
          out.values[num_h * num_c + ci] = tied.value(cfg.criteria[ci]);
        }
      }
    }
    results[rep] = std::move(out);
  });

  FreeThrowStudy study;
  study.selection.replicates = cfg.replicates;
  double shots = 0.0;
  for (auto s : shot_totals) shots += static_cast<double>(s);
  study.mean_shots = shots / static_cast<double>(cfg.replicates);

  for (std::size_t ci = 0; ci < num_c; ++ci) {
    std::vector<std::size_t> counts(num_h, 0);
    std::size_t jagged_wins = 0;
    for (const auto& r : results) {
      const auto best = argmin_values(r.values, ci, num_c, num_h);
      if (best != std::string::npos) ++counts[best];
      if (score_jagged) {
        const double vj = r.values[num_h * num_c + ci];
        const double v0 = r.values[ci];
        const double v1 = r.values[num_c + ci];
        if (vj < v0 && vj < v1) ++jagged_wins;
      }
    }
    for (std::size_t hi = 0; hi < num_h; ++hi) {
      SelectionRow row;
      row.truth = cfg.truth.name;
      row.j = cfg.games;
      row.criterion = cfg.criteria[ci];
      row.h_chosen = h_lo + hi;
      row.chosen = h_label(row.h_chosen);
      row.count = counts[hi];
      row.frequency = static_cast<double>(counts[hi]) / static_cast<double>(cfg.replicates);
      study.selection.rows.push_back(std::move(row));
    }
    if (score_jagged) {
      study.jagged_beats_both[cfg.criteria[ci]] =
          static_cast<double>(jagged_wins) / static_cast<double>(cfg.replicates);
    }
  }
  return study;
}

}  // namespace memsel
