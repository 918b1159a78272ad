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

#include "memsel/specfun.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace memsel {
namespace {

void require_positive(double z, const char* fn) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw std::domain_error(std::string(fn) + ": argument must be finite and > 0, got " +
                            std::to_string(z));
  }
}

// Below this the asymptotic series is not used; arguments are shifted up by
// the unit recurrence first.
constexpr double kAsymptoticMin = 10.0;

}  // namespace

double log_gamma(double z) {
  require_positive(z, "log_gamma");
  // glibc lgamma is accurate to a few ulp over the positive axis.
  return std::lgamma(z);
}

double digamma(double z) {
  require_positive(z, "digamma");
  double shift = 0.0;
  while (z < kAsymptoticMin) {
    shift += 1.0 / z;
    z += 1.0;
  }
  // psi(z) ~ ln z - 1/(2z) - sum_k B_{2k} / (2k z^{2k})
  const double r = 1.0 / (z * z);
  const double series =
      r * (1.0 / 12 -
           r * (1.0 / 120 -
                r * (1.0 / 252 -
                     r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12))))));
  return std::log(z) - 0.5 / z - series - shift;
}

double trigamma(double z) {
  require_positive(z, "trigamma");
  // Recurrence terms 1/x^2 are added smallest first so the dominant 1/z^2
  // lands last; near z = 0 that keeps the result within an ulp or two.
  double terms[16];
  int n = 0;
  double x = z;
  while (x < kAsymptoticMin) {
    terms[n++] = 1.0 / (x * x);
    x += 1.0;
  }
  // psi'(x) ~ 1/x + 1/(2x^2) + sum_k B_{2k} / x^{2k+1}
  const double r = 1.0 / (x * x);
  double result =
      1.0 / x + 0.5 * r +
      (r / x) * (1.0 / 6 -
                 r * (1.0 / 30 -
                      r * (1.0 / 42 - r * (1.0 / 30 - r * (5.0 / 66 - r * (691.0 / 2730 -
                                                                          r * 7.0 / 6))))));
  while (n > 0) result += terms[--n];
  return result;
}

double log_multivariate_beta(std::span<const double> v) {
  if (v.size() < 2) {
    throw std::invalid_argument("log_multivariate_beta needs at least two components");
  }
  double sum = 0.0;
  double acc = 0.0;
  for (double x : v) {
    require_positive(x, "log_multivariate_beta");
    acc += log_gamma(x);
    sum += x;
  }
  return acc - log_gamma(sum);
}

}  // namespace memsel
