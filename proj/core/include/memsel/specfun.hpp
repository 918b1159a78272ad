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

// Log-domain special functions used by the closed-form criteria.

#ifndef MEMSEL_SPECFUN_HPP_
#define MEMSEL_SPECFUN_HPP_

#include <span>

namespace memsel {

// ln Gamma(z) for z > 0. Throws std::domain_error otherwise.
double log_gamma(double z);

// psi(z) = d/dz ln Gamma(z), z > 0.
double digamma(double z);

// psi'(z), z > 0.
double trigamma(double z);

// ln B(v) = sum_m ln Gamma(v_m) - ln Gamma(sum_m v_m). Requires at least two
// strictly positive components.
double log_multivariate_beta(std::span<const double> v);

}  // namespace memsel

#endif  // MEMSEL_SPECFUN_HPP_
