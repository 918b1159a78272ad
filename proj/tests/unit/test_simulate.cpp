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


#include <cmath>
#include <map>
#include <stdexcept>

#include "doctest.h"
#include "memsel/rng.hpp"
#include "memsel/simulate.hpp"

using doctest::Approx;
using namespace memsel;

namespace {

RandomNetwork three_state(std::vector<double> r0, std::vector<double> r1, std::vector<double> r2) {
  std::map<Context, std::vector<double>> rows{{Context::history({0}), std::move(r0)},
                                              {Context::history({1}), std::move(r1)},
                                              {Context::history({2}), std::move(r2)}};
  return RandomNetwork(3, 1, 0, 2, std::move(rows));
}

SimConfig small_config() {
  SimConfig c;
  c.h_range = {1, 3};
  c.j_values = {4, 8};
  c.replicates = 40;
  c.seed = 9;
  return c;
}

}  // namespace

TEST_CASE("rng streams") {
  auto a = derive_stream(5, {1, 2});
  auto b = derive_stream(5, {1, 2});
  auto c = derive_stream(5, {2, 1});
  CHECK(a() == b());
  CHECK(a() != c());

  Rng rng = derive_stream(1, {});
  const std::vector<double> alpha{1.0, 2.0, 3.0};
  std::vector<double> p(3), mean(3, 0.0);
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    sample_dirichlet(rng, alpha, p);
    CHECK(p[0] + p[1] + p[2] == Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) mean[k] += p[k] / n;
  }
  // Dirichlet(1,2,3) means 1/6, 1/3, 1/2; sd of each mean < 0.0015.
  CHECK(mean[0] == Approx(1.0 / 6).epsilon(0.03));
  CHECK(mean[1] == Approx(1.0 / 3).epsilon(0.015));
  CHECK(mean[2] == Approx(0.5).epsilon(0.01));
}

TEST_CASE("network generation") {
  const auto a = generate_network(2, 1, 17);
  const auto b = generate_network(2, 1, 17);
  const auto c = generate_network(2, 1, 18);
  CHECK(a.rows() == b.rows());
  CHECK(a.rows() != c.rows());
  CHECK(a.start_state() == 0);
  CHECK(a.absorbing_state() == 1);

  const auto net = generate_network(8, 2, 3);
  for (const auto& [ctx, row] : net.rows()) {
    CHECK(row.size() == 8);
    double s = 0;
    for (double x : row) s += x;
    CHECK(s == Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(generate_network(64, 5, 1), std::length_error);
}

TEST_CASE("network validation") {
  CHECK_THROWS(three_state({0.5, 0.5, 0.1}, {0, 0, 1}, {0, 0, 1}));
  CHECK_THROWS(three_state({0.5, 0.5}, {0, 0, 1}, {0, 0, 1}));
  CHECK_THROWS(three_state({1.5, -0.5, 0}, {0, 0, 1}, {0, 0, 1}));
}

TEST_CASE("trajectory sampling edge cases") {
  Rng rng = derive_stream(2, {});
  const auto absorb = three_state({0, 0, 1}, {0, 0, 1}, {0, 0, 1});
  for (int i = 0; i < 10; ++i) {
    const auto s = sample_trajectory(absorb, 100, rng);
    CHECK(s.trajectory.steps == std::vector<StateId>{2});
    CHECK_FALSE(s.truncated);
  }
  const auto cycle = three_state({0, 1, 0}, {1, 0, 0}, {0, 0, 1});
  const auto s = sample_trajectory(cycle, 25, rng);
  CHECK(s.trajectory.steps.size() == 25);
  CHECK(s.truncated);
  CHECK(s.trajectory.steps[0] == 1);
  CHECK(s.trajectory.steps[1] == 0);
  CHECK_THROWS(sample_trajectory(cycle, 0, rng));
}

TEST_CASE("empirical transition frequencies match the rows") {
  const auto net = three_state({0.3, 0.69, 0.01}, {0.6, 0.39, 0.01}, {0, 0, 1});
  Rng rng = derive_stream(4, {});
  std::map<StateId, std::vector<double>> counts{{0, {0, 0, 0}}, {1, {0, 0, 0}}};
  std::size_t steps = 0;
  while (steps < 100000) {
    const auto s = sample_trajectory(net, 100000, rng);
    StateId prev = 0;
    for (StateId x : s.trajectory.steps) {
      counts[prev][static_cast<std::size_t>(x)] += 1;
      prev = x;
      ++steps;
    }
  }
  for (const auto& [from, row] : counts) {
    const double n = row[0] + row[1] + row[2];
    const auto& p = net.row(Context::history({from}));
    for (std::size_t k = 0; k < 3; ++k) {
      const double sigma = std::sqrt(n * p[k] * (1 - p[k]));
      CHECK(std::abs(row[k] - n * p[k]) <= 3 * sigma + 1e-9);
    }
  }
}

TEST_CASE("power study bookkeeping") {
  auto cfg = small_config();
  const auto study = run_power_study(cfg);
  CHECK(study.selection.replicates == 40);
  for (std::size_t j : cfg.j_values) {
    for (Criterion c : cfg.criteria) {
      double sum = 0;
      for (std::size_t h = 1; h <= 3; ++h) sum += study.selection.frequency(j, c, h);
      CHECK(sum == Approx(1.0).epsilon(1e-12));
      const auto* self = study.deltas.find(j, c, 1);
      REQUIRE(self != nullptr);
      CHECK(self->min == 0.0);
      CHECK(self->max == 0.0);
      CHECK(self->below_zero == 0);
    }
  }

  SUBCASE("deterministic across worker counts and protocols") {
    auto one = cfg;
    one.threads = 1;
    auto three = cfg;
    three.threads = 3;
    const auto a = run_power_study(one);
    const auto b = run_power_study(three);
    REQUIRE(a.selection.rows.size() == b.selection.rows.size());
    for (std::size_t i = 0; i < a.selection.rows.size(); ++i) {
      CHECK(a.selection.rows[i].count == b.selection.rows[i].count);
    }
    for (std::size_t i = 0; i < a.deltas.rows.size(); ++i) {
      CHECK(a.deltas.rows[i].mean == b.deltas.rows[i].mean);
    }
    auto per_rep = one;
    per_rep.network_per_replicate = true;
    auto per_rep3 = per_rep;
    per_rep3.threads = 3;
    const auto c = run_power_study(per_rep);
    const auto d = run_power_study(per_rep3);
    for (std::size_t i = 0; i < c.selection.rows.size(); ++i) {
      CHECK(c.selection.rows[i].count == d.selection.rows[i].count);
    }
  }
}

TEST_CASE("config validation") {
  auto bad = small_config();
  bad.h_true = 5;
  CHECK_THROWS_AS(delta_distributions(bad), std::invalid_argument);
  bad = small_config();
  bad.num_states = 1;
  CHECK_THROWS(validate(bad));
  bad = small_config();
  bad.j_values.clear();
  CHECK_THROWS(validate(bad));
  bad = small_config();
  bad.replicates = 0;
  CHECK_THROWS(validate(bad));

  FreeThrowSimConfig ft;
  ft.shots_per_game = 0;
  CHECK_THROWS(validate(ft));
  ft = {};
  ft.truth.p_hit_after_miss = 1.5;
  CHECK_THROWS(validate(ft));
}

TEST_CASE("LOO recovers h=1 at J=256") {
  SimConfig cfg;
  cfg.h_true = 1;
  cfg.j_values = {256};
  cfg.replicates = 60;
  cfg.criteria = {Criterion::kLoo};
  const auto sel = power_analysis(cfg);
  CHECK(sel.frequency(256, Criterion::kLoo, std::size_t{1}) > 0.9);
}

TEST_CASE("free-throw games") {
  FreeThrowSimConfig cfg;
  cfg.truth = FreeThrowModel::independent(0.68);
  Rng rng = derive_stream(8, {});
  double shots = 0, hits = 0;
  std::size_t games = 0;
  for (int rep = 0; rep < 200; ++rep) {
    for (const auto& g : sample_free_throw_games(cfg, rng)) {
      ++games;
      CHECK_FALSE(g.steps.empty());
      for (StateId s : g.steps) {
        shots += 1;
        hits += s;
      }
    }
  }
  CHECK(hits / shots == Approx(0.68).epsilon(0.01));
  // Zero-shot games are dropped, so the mean is lambda / (1 - e^-lambda).
  const double lambda = cfg.shots_per_game;
  CHECK(shots / games == Approx(lambda / (1 - std::exp(-lambda))).epsilon(0.01));
}

TEST_CASE("free-throw model fit") {
  const std::vector<Trajectory> games{{"a", {1, 0, 1, 1}}, {"b", {0, 0, 1}}, {"c", {1}}};
  const auto m = fit_free_throw_model(games);
  CHECK(m.p_hit_first == Approx(2.0 / 3));
  CHECK(m.p_hit_after_miss == Approx(2.0 / 3));
  CHECK(m.p_hit_after_hit == Approx(1.0 / 2));

  const auto j = FreeThrowModel::jagged(0.8, 0.6);
  CHECK(j.p_hit_after_miss == 0.8);
  CHECK(j.p_hit_after_hit == 0.6);
  CHECK(j.p_hit_first == 0.6);
}

TEST_CASE("free-throw power: memoryless truth") {
  FreeThrowSimConfig cfg;
  cfg.truth = FreeThrowModel::independent(0.68);
  cfg.replicates = 200;
  cfg.criteria = {Criterion::kLoo, Criterion::kAic};
  const auto study = free_throw_power(cfg);
  CHECK(study.selection.frequency(cfg.games, Criterion::kLoo, std::size_t{0}) > 0.5);
  CHECK(study.jagged_beats_both.count(Criterion::kLoo) == 1);
  CHECK(study.mean_shots == Approx(693.0).epsilon(0.05));
}

TEST_CASE("free-throw power: fitted one-step truth") {
  FreeThrowSimConfig cfg;
  cfg.truth = FreeThrowModel{"fitted", 0.6587, 0.6587, 0.7354};
  cfg.replicates = 400;
  cfg.criteria = {Criterion::kLoo};
  const auto study = free_throw_power(cfg);
  const double f = study.selection.frequency(cfg.games, Criterion::kLoo, std::size_t{1});
  CHECK(f >= 0.30);
  CHECK(f <= 0.55);
}
