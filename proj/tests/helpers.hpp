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

#ifndef HSMMATTN_TESTS_HELPERS_HPP
#define HSMMATTN_TESTS_HELPERS_HPP

#include <random>
#include <vector>

#include "hsmm.hpp"
#include "matrix.hpp"

namespace hsmmattn::testing {

inline std::vector<double> random_vector(std::mt19937_64& rng, size_t n, double low, double high) {
  std::uniform_real_distribution<double> dist(low, high);
  std::vector<double> out(n);
  for (double& x : out) x = dist(rng);
  return out;
}

// Random HSMM instance with parameters spread enough to give non-trivial
// posteriors but no degenerate densities.
inline HsmmParams<double> random_hsmm_params(std::mt19937_64& rng, int num_states, int dim,
                                             int duration_cap) {
  std::uniform_real_distribution<double> mean_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> log_var_dist(-0.5, 0.5);
  std::uniform_real_distribution<double> dur_mean_dist(1.0, 4.0);
  HsmmParams<double> params;
  params.num_states = num_states;
  params.duration_cap = duration_cap;
  params.emission.resize(num_states);
  params.duration.resize(num_states);
  for (int k = 0; k < num_states; ++k) {
    params.emission[k].resize(dim);
    for (int j = 0; j < dim; ++j) {
      params.emission[k][j] = {mean_dist(rng), log_var_dist(rng)};
    }
    params.duration[k] = {dur_mean_dist(rng), log_var_dist(rng)};
  }
  return params;
}

inline Matrix<double> random_observations(std::mt19937_64& rng, int num_frames, int dim) {
  std::normal_distribution<double> dist(0.0, 1.5);
  Matrix<double> obs(num_frames, dim);
  for (int t = 0; t < num_frames; ++t) {
    for (int j = 0; j < dim; ++j) obs.at(t, j) = dist(rng);
  }
  return obs;
}

}  // namespace hsmmattn::testing

#endif  // HSMMATTN_TESTS_HELPERS_HPP
