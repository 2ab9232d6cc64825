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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "error.hpp"
#include "fdcheck.hpp"
#include "gaussian.hpp"
#include "helpers.hpp"
#include "hsmm.hpp"

using namespace hsmmattn;

namespace {

// Flatten the trainable entries of an HsmmParams so the log evidence can be
// finite-difference checked as a function of a parameter vector.
std::vector<double> flatten(const HsmmParams<double>& p) {
  std::vector<double> flat;
  for (const auto& state : p.emission) {
    for (const auto& g : state) {
      flat.push_back(g.mean);
      flat.push_back(g.log_var);
    }
  }
  for (const auto& g : p.duration) {
    flat.push_back(g.mean);
    flat.push_back(g.log_var);
  }
  return flat;
}

template <class S>
HsmmParams<S> unflatten(const HsmmParams<double>& shape, std::span<const S> flat) {
  HsmmParams<S> p;
  p.num_states = shape.num_states;
  p.duration_cap = shape.duration_cap;
  p.variance_floor = shape.variance_floor;
  size_t i = 0;
  p.emission.resize(shape.num_states);
  for (int k = 0; k < shape.num_states; ++k) {
    for (size_t j = 0; j < shape.emission[k].size(); ++j) {
      S mean = flat[i++];
      S log_var = flat[i++];
      p.emission[k].push_back({mean, log_var});
    }
  }
  for (int k = 0; k < shape.num_states; ++k) {
    S mean = flat[i++];
    S log_var = flat[i++];
    p.duration.push_back({mean, log_var});
  }
  return p;
}

double emission_lp(const HsmmParams<double>& p, int state, std::span<const double> frame) {
  double total = 0.0;
  for (size_t j = 0; j < frame.size(); ++j) {
    total += gaussian_log_density(frame[j], p.emission[state][j], p.variance_floor);
  }
  return total;
}

double duration_lp(const HsmmParams<double>& p, int state, int d) {
  return gaussian_log_density(static_cast<double>(d), p.duration[state], p.variance_floor);
}

}  // namespace

TEST_CASE("log_likelihood with a single state") {
  std::mt19937_64 rng(1);
  auto params = testing::random_hsmm_params(rng, 1, 2, 8);
  auto obs = testing::random_observations(rng, 5, 2);

  double expected = duration_lp(params, 0, 5);
  for (int t = 0; t < 5; ++t) expected += emission_lp(params, 0, obs.row(t));
  CHECK(std::abs(hsmm_log_likelihood(params, obs) - expected) < 1e-12);
}

TEST_CASE("log_likelihood with unit durations forced") {
  std::mt19937_64 rng(2);
  const int k = 4;
  auto params = testing::random_hsmm_params(rng, k, 3, 5);
  auto obs = testing::random_observations(rng, k, 3);

  double expected = 0.0;
  for (int s = 0; s < k; ++s) {
    expected += emission_lp(params, s, obs.row(s)) + duration_lp(params, s, 1);
  }
  CHECK(std::abs(hsmm_log_likelihood(params, obs) - expected) < 1e-12);
}

TEST_CASE("log_likelihood matches two-segmentation enumeration") {
  std::mt19937_64 rng(3);
  auto params = testing::random_hsmm_params(rng, 2, 2, 3);
  auto obs = testing::random_observations(rng, 3, 2);

  // Segmentations of 3 frames into 2 segments: (1,2) and (2,1).
  const double w12 = duration_lp(params, 0, 1) + duration_lp(params, 1, 2) +
                     emission_lp(params, 0, obs.row(0)) + emission_lp(params, 1, obs.row(1)) +
                     emission_lp(params, 1, obs.row(2));
  const double w21 = duration_lp(params, 0, 2) + duration_lp(params, 1, 1) +
                     emission_lp(params, 0, obs.row(0)) + emission_lp(params, 0, obs.row(1)) +
                     emission_lp(params, 1, obs.row(2));
  std::vector<double> weights{w12, w21};
  CHECK(std::abs(hsmm_log_likelihood(params, obs) - log_sum_exp(weights)) < 1e-10);
  CHECK(std::abs(hsmm_log_likelihood(params, obs) - enumerate_posterior(params, obs).log_evidence) <
        1e-10);
}

TEST_CASE("infeasible lengths are rejected") {
  std::mt19937_64 rng(4);
  auto params = testing::random_hsmm_params(rng, 3, 2, 2);
  auto too_short = testing::random_observations(rng, 2, 2);   // T < K
  auto too_long = testing::random_observations(rng, 7, 2);    // T > K * d_max
  CHECK_THROWS_AS((void)hsmm_log_likelihood(params, too_short), Error);
  CHECK_THROWS_AS((void)hsmm_log_likelihood(params, too_long), Error);
  CHECK_THROWS_AS((void)forward_backward(params, too_long), Error);
}

TEST_CASE("forward_backward with a single state") {
  std::mt19937_64 rng(5);
  auto params = testing::random_hsmm_params(rng, 1, 2, 10);
  auto obs = testing::random_observations(rng, 6, 2);
  auto post = forward_backward(params, obs);

  for (int t = 0; t < 6; ++t) CHECK(post.gamma.at(0, t) == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(post.gamma_d.size() == 1);
  CHECK(post.gamma_d[0].end_frame == 6);
  CHECK(post.gamma_d[0].duration == 6);
  CHECK(post.gamma_d[0].prob == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("forward_backward with unit durations forced") {
  std::mt19937_64 rng(6);
  const int k = 5;
  auto params = testing::random_hsmm_params(rng, k, 2, 4);
  auto obs = testing::random_observations(rng, k, 2);
  auto post = forward_backward(params, obs);

  for (int s = 0; s < k; ++s) {
    for (int t = 0; t < k; ++t) {
      CHECK(post.gamma.at(s, t) == ((s == t) ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("forward_backward matches brute force on a small instance") {
  std::mt19937_64 rng(7);
  auto params = testing::random_hsmm_params(rng, 2, 2, 3);
  auto obs = testing::random_observations(rng, 4, 2);
  auto fb = forward_backward(params, obs);
  auto brute = enumerate_posterior(params, obs);

  CHECK(std::abs(fb.log_evidence - brute.log_evidence) < 1e-10);
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 4; ++t) {
      CHECK(std::abs(fb.gamma.at(s, t) - brute.gamma.at(s, t)) < 1e-9);
    }
  }
  for (const auto& cell : brute.gamma_d) {
    const double* fb_prob = fb.find_gamma_d(cell.state, cell.end_frame, cell.duration);
    REQUIRE(fb_prob != nullptr);
    CHECK(std::abs(*fb_prob - cell.prob) < 1e-9);
  }
}

TEST_CASE("segmentation count example") {
  CHECK(count_segmentations(3, 6, 4) == 10);
  CHECK(count_segmentations(1, 5, 5) == 1);
  CHECK(count_segmentations(2, 3, 3) == 2);
}

TEST_CASE("enumerate_posterior rejects oversized instances") {
  std::mt19937_64 rng(8);
  auto params = testing::random_hsmm_params(rng, 2, 1, 3);
  auto obs = testing::random_observations(rng, 4, 1);
  CHECK_THROWS_AS((void)enumerate_posterior(params, obs, 2), Error);
}

TEST_CASE("oracle equivalence, normalization and monotonicity over random instances") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> k_dist(2, 4);
  for (int trial = 0; trial < 60; ++trial) {
    const int num_states = k_dist(rng);
    std::uniform_int_distribution<int> t_dist(num_states, 12);
    const int num_frames = t_dist(rng);
    const int min_cap = (num_frames + num_states - 1) / num_states;
    std::uniform_int_distribution<int> cap_dist(min_cap, std::max(min_cap, 6));
    auto params = testing::random_hsmm_params(rng, num_states, 2, cap_dist(rng));
    auto obs = testing::random_observations(rng, num_frames, 2);

    auto fb = forward_backward(params, obs);
    auto brute = enumerate_posterior(params, obs);
    CAPTURE(trial);

    CHECK(std::abs(fb.log_evidence - brute.log_evidence) < 1e-8);
    CHECK(std::abs(fb.log_evidence - fb.log_evidence_backward) < 1e-8);

    double previous_mean_state = 0.0;
    for (int t = 0; t < num_frames; ++t) {
      double column = 0.0;
      double mean_state = 0.0;
      for (int s = 0; s < num_states; ++s) {
        const double g = fb.gamma.at(s, t);
        CHECK(g >= 0.0);
        CHECK(g <= 1.0 + 1e-12);
        CHECK(std::abs(g - brute.gamma.at(s, t)) < 1e-9);
        column += g;
        mean_state += (s + 1) * g;
        // Reachability: state s+1 cannot own frame t+1 outside its window.
        if (t + 1 < s + 1 || t + 1 > num_frames - (num_states - (s + 1))) {
          CHECK(g == 0.0);
        }
      }
      CHECK(std::abs(column - 1.0) < 1e-9);
      CHECK(mean_state >= previous_mean_state - 1e-9);
      previous_mean_state = mean_state;
    }

    // Segment posteriors: each state ends exactly one segment, and occupancy
    // is consistent with the segments covering each frame.
    std::vector<double> per_state(num_states, 0.0);
    Matrix<double> cover(num_states, num_frames, 0.0);
    for (const auto& cell : fb.gamma_d) {
      per_state[cell.state - 1] += cell.prob;
      for (int t = cell.end_frame - cell.duration + 1; t <= cell.end_frame; ++t) {
        cover.at(cell.state - 1, t - 1) += cell.prob;
      }
      const double* brute_prob = brute.find_gamma_d(cell.state, cell.end_frame, cell.duration);
      if (brute_prob != nullptr) {
        CHECK(std::abs(cell.prob - *brute_prob) < 1e-9);
      } else {
        CHECK(cell.prob < 1e-12);
      }
    }
    for (int s = 0; s < num_states; ++s) {
      CHECK(std::abs(per_state[s] - 1.0) < 1e-9);
      for (int t = 0; t < num_frames; ++t) {
        CHECK(std::abs(cover.at(s, t) - fb.gamma.at(s, t)) < 1e-9);
      }
    }
  }
}

TEST_CASE("log evidence gradient matches finite differences") {
  std::mt19937_64 rng(10);
  auto shape = testing::random_hsmm_params(rng, 3, 2, 3);
  auto obs = testing::random_observations(rng, 7, 2);
  auto point = flatten(shape);

  GraphBuilder build = [&](Tape& tape, std::span<const Var> flat) {
    ScalarContext<Var> ctx{&tape};
    auto params = unflatten<Var>(shape, flat);
    return hsmm_log_likelihood(ctx, params, obs);
  };
  ValueFunction value = [&](std::span<const double> flat) {
    auto params = unflatten<double>(shape, flat);
    return hsmm_log_likelihood(params, obs);
  };
  auto report = finite_difference_check_report(build, value, point, 1e-5);
  CHECK(report.max_rel_error < 1e-4);
}

TEST_CASE("map_durations rounds, clamps and breaks ties down") {
  auto seq = map_durations({{3.2, 0.0}, {0.2, 0.0}, {2.5, 0.0}, {9.7, 0.0}}, 10);
  CHECK(seq.durations == std::vector<int>{3, 1, 2, 10});
  CHECK(seq.total_frames() == 16);

  // Matches an explicit argmax of the density with the same tie rule.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mean_dist(-2.0, 14.0);
  for (int trial = 0; trial < 300; ++trial) {
    Gaussian<double> g{mean_dist(rng), 0.3};
    const int cap = 8;
    int best = 1;
    double best_lp = gaussian_log_density(1.0, g, 1e-4);
    for (int d = 2; d <= cap; ++d) {
      const double lp = gaussian_log_density(static_cast<double>(d), g, 1e-4);
      if (lp > best_lp) {
        best_lp = lp;
        best = d;
      }
    }
    auto mapped = map_durations({g}, cap);
    CAPTURE(g.mean);
    CHECK(mapped.durations[0] == best);
  }
}

TEST_CASE("forward_backward in the tape domain matches the double domain") {
  std::mt19937_64 rng(12);
  auto shape = testing::random_hsmm_params(rng, 3, 2, 4);
  auto obs = testing::random_observations(rng, 8, 2);
  auto fb_double = forward_backward(shape, obs);

  Tape tape;
  ScalarContext<Var> ctx{&tape};
  auto flat = flatten(shape);
  std::vector<Var> leaves;
  for (double x : flat) leaves.push_back(tape.leaf(x));
  auto params = unflatten<Var>(shape, std::span<const Var>(leaves));
  auto fb_var = forward_backward(ctx, params, obs);

  CHECK(fb_var.log_evidence.value() == doctest::Approx(fb_double.log_evidence).epsilon(1e-14));
  for (int s = 0; s < 3; ++s) {
    for (int t = 0; t < 8; ++t) {
      CHECK(fb_var.gamma.at(s, t).value() ==
            doctest::Approx(fb_double.gamma.at(s, t)).epsilon(1e-14));
    }
  }

  // Gradient of a posterior entry also flows back to the parameters.
  tape.zero_grad();
  tape.backward(fb_var.gamma.at(1, 3));
  double grad_norm = 0.0;
  for (const Var& leaf : leaves) grad_norm += std::abs(leaf.grad());
  CHECK(grad_norm > 0.0);
}
