// Copyright 2026 the hsmmattn authors
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

#ifndef HSMMATTN_GAUSSIAN_HPP
#define HSMMATTN_GAUSSIAN_HPP

#include <cmath>

#include "error.hpp"
#include "numerics.hpp"

namespace hsmmattn {

// Univariate Gaussian parameterized by mean and log variance, so that
// unconstrained optimization keeps the variance positive. The effective
// variance is max(exp(log_var), floor).
template <class S>
struct Gaussian {
  S mean;
  S log_var;
};

// log N(x | mean, max(exp(log_var), floor)). Diagonal multivariate callers
// sum the per-dimension results. On the floored branch the variance is a
// constant, so no gradient reaches log_var there (the max() subgradient).
template <class S>
S gaussian_log_density(double x, const Gaussian<S>& g, double variance_floor) {
  require(std::isfinite(x), ErrorCode::kInvalidArgument,
          "gaussian_log_density: non-finite input");
  using std::exp;
  const double raw_variance = std::exp(value_of(g.log_var));
  if (raw_variance > variance_floor) {
    S diff = x - g.mean;
    S variance = exp(g.log_var);
    return -0.5 * (kLogTwoPi + g.log_var) - diff * diff / (2.0 * variance);
  }
  S diff = x - g.mean;
  const double log_floor = std::log(variance_floor);
  return -0.5 * (kLogTwoPi + log_floor) - diff * diff / (2.0 * variance_floor);
}

}  // namespace hsmmattn

#endif  // HSMMATTN_GAUSSIAN_HPP
