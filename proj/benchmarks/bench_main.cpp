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


#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "memsel/chain.hpp"
#include "memsel/criteria.hpp"
#include "memsel/oracle.hpp"
#include "memsel/rng.hpp"
#include "memsel/simulate.hpp"

namespace {

using namespace memsel;

std::vector<Trajectory> sample(std::size_t j, std::uint64_t seed) {
  const auto net = generate_network(8, 2, seed);
  Rng rng = derive_stream(seed, {7});
  std::vector<Trajectory> out;
  for (std::size_t i = 0; i < j; ++i) out.push_back(sample_trajectory(net, 10000, rng).trajectory);
  return out;
}

void BM_CountTransitions(benchmark::State& state) {
  const auto data = sample(static_cast<std::size_t>(state.range(0)), 1);
  const auto al = std::make_shared<const StateAlphabet>(StateAlphabet::indexed(8));
  std::int64_t steps = 0;
  for (const auto& t : data) steps += static_cast<std::int64_t>(t.steps.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_transitions(data, al, 3, BoundaryMode::kPadded));
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_CountTransitions)->Arg(16)->Arg(256);

void BM_EvaluateAll(benchmark::State& state) {
  const auto data = sample(static_cast<std::size_t>(state.range(0)), 2);
  const auto al = std::make_shared<const StateAlphabet>(StateAlphabet::indexed(8));
  const auto tc = count_transitions(data, al, static_cast<int>(state.range(1)),
                                    BoundaryMode::kPadded);
  const auto prior = DirichletPrior::symmetric(8);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(tc, prior));
}
BENCHMARK(BM_EvaluateAll)->Args({16, 1})->Args({16, 3})->Args({256, 1})->Args({256, 3});

void BM_SelectOrder(benchmark::State& state) {
  const auto data = sample(64, 3);
  const auto al = std::make_shared<const StateAlphabet>(StateAlphabet::indexed(8));
  const auto prior = DirichletPrior::symmetric(8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        select_order(data, al, {1, 5}, prior, BoundaryMode::kPadded, Criterion::kLoo));
  }
}
BENCHMARK(BM_SelectOrder);

void BM_OracleLppd(benchmark::State& state) {
  const auto data = sample(4, 4);
  const auto al = std::make_shared<const StateAlphabet>(StateAlphabet::indexed(8));
  const auto tc = count_transitions(data, al, 1, BoundaryMode::kPadded);
  const auto prior = DirichletPrior::symmetric(8);
  for (auto _ : state) benchmark::DoNotOptimize(mc_lppd(tc, prior, 10000, 1));
}
BENCHMARK(BM_OracleLppd);

}  // namespace

BENCHMARK_MAIN();
