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

// Random-number streams with deterministic derivation from a root seed.

#ifndef MEMSEL_RNG_HPP_
#define MEMSEL_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace memsel {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Independent stream for (root, keys...). The same keys always give the
// same stream, so work keyed by replicate index is reproducible no matter
// which worker runs it.
Rng derive_stream(std::uint64_t root, std::initializer_list<std::uint64_t> keys);

// Symmetric or general Dirichlet draw by normalized unit-scale Gamma
// variates. `out` receives one component per alpha.
void sample_dirichlet(Rng& rng, std::span<const double> alpha, std::span<double> out);

// Worker count from MEMSEL_THREADS (default: hardware concurrency, min 1).
unsigned worker_count();

}  // namespace memsel

#endif  // MEMSEL_RNG_HPP_
