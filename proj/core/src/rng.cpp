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

#include "memsel/rng.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace memsel {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng derive_stream(std::uint64_t root, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t state = mix64(root);
  for (auto k : keys) state = mix64(state ^ mix64(k + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(state), static_cast<std::uint32_t>(state >> 32),
                    static_cast<std::uint32_t>(mix64(state)),
                    static_cast<std::uint32_t>(mix64(state) >> 32)};
  return Rng(seq);
}

void sample_dirichlet(Rng& rng, std::span<const double> alpha, std::span<double> out) {
  double sum = 0.0;
  for (std::size_t m = 0; m < alpha.size(); ++m) {
    std::gamma_distribution<double> gamma(alpha[m], 1.0);
    out[m] = gamma(rng);
    sum += out[m];
  }
  if (sum <= 0.0) {
    // All draws underflowed (tiny alpha): fall back to a uniform vertex pick.
    std::uniform_int_distribution<std::size_t> pick(0, alpha.size() - 1);
    const std::size_t hit = pick(rng);
    for (std::size_t m = 0; m < alpha.size(); ++m) out[m] = (m == hit) ? 1.0 : 0.0;
    return;
  }
  for (std::size_t m = 0; m < alpha.size(); ++m) out[m] /= sum;
}

unsigned worker_count() {
  if (const char* env = std::getenv("MEMSEL_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace memsel
