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

#include "hsmm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace hsmmattn {

long count_segmentations(int num_states, int num_frames, int duration_cap) {
  // counts[t] = compositions of t into the states handled so far.
  std::vector<long> counts(num_frames + 1, 0);
  counts[0] = 1;
  for (int k = 0; k < num_states; ++k) {
    std::vector<long> next(num_frames + 1, 0);
    for (int t = 0; t <= num_frames; ++t) {
      if (counts[t] == 0) continue;
      for (int d = 1; d <= duration_cap && t + d <= num_frames; ++d) {
        next[t + d] += counts[t];
      }
    }
    counts.swap(next);
  }
  return counts[num_frames];
}

Posterior<double> enumerate_posterior(const HsmmParams<double>& params, const Matrix<double>& obs,
                                      long max_sequences) {
  detail::validate_hsmm_inputs(params, obs);
  const int num_states = params.num_states;
  const int num_frames = obs.rows();
  const long total = count_segmentations(num_states, num_frames, params.duration_cap);
  require(total <= max_sequences, ErrorCode::kInvalidArgument,
          "enumerate_posterior: " + std::to_string(total) +
              " segmentations exceed the budget of " + std::to_string(max_sequences));

  ScalarContext<double> ctx;
  auto dur_lp = detail::duration_log_probs(params);
  auto cum = detail::emission_cumulative(ctx, params, obs);

  // Enumerate all duration vectors and their joint log weights.
  std::vector<std::vector<int>> sequences;
  std::vector<double> log_weights;
  sequences.reserve(total);
  log_weights.reserve(total);
  std::vector<int> durations(num_states, 0);
  auto recurse = [&](auto&& self, int state, int frames_used, double log_weight) -> void {
    if (state == num_states) {
      if (frames_used == num_frames) {
        sequences.push_back(durations);
        log_weights.push_back(log_weight);
      }
      return;
    }
    const int remaining_states = num_states - state - 1;
    for (int d = 1; d <= params.duration_cap; ++d) {
      const int end = frames_used + d;
      if (end + remaining_states > num_frames) break;
      durations[state] = d;
      self(self, state + 1, end,
           log_weight + dur_lp[state][d - 1] + (cum[state][end] - cum[state][frames_used]));
    }
  };
  recurse(recurse, 0, 0, 0.0);

  Posterior<double> post;
  post.num_states = num_states;
  post.num_frames = num_frames;
  post.log_evidence = log_sum_exp(log_weights);
  post.log_evidence_backward = post.log_evidence;

  post.gamma = Matrix<double>(num_states, num_frames, 0.0);
  std::map<std::tuple<int, int, int>, double> segment_probs;
  for (size_t i = 0; i < sequences.size(); ++i) {
    const double prob = std::exp(log_weights[i] - post.log_evidence);
    int end = 0;
    for (int k = 0; k < num_states; ++k) {
      const int d = sequences[i][k];
      for (int t = end + 1; t <= end + d; ++t) post.gamma.at(k, t - 1) += prob;
      end += d;
      segment_probs[{k + 1, end, d}] += prob;
    }
  }

  for (const auto& [key, prob] : segment_probs) {
    SegmentPosterior<double> cell;
    cell.state = std::get<0>(key);
    cell.end_frame = std::get<1>(key);
    cell.duration = std::get<2>(key);
    cell.prob = prob;
    cell.log_prob = std::log(prob);
    post.gamma_d.push_back(cell);
  }
  for (int t = 1; t <= num_frames; ++t) {
    for (int k = 1; k <= num_states; ++k) {
      const double prob = post.gamma.at(k - 1, t - 1);
      if (prob <= 0.0) continue;
      OccupancyCell<double> cell;
      cell.state = k;
      cell.frame = t;
      cell.prob = prob;
      cell.log_prob = std::log(prob);
      post.gamma_cells.push_back(cell);
    }
  }
  return post;
}

StateSequence map_durations(const std::vector<Gaussian<double>>& duration, int duration_cap) {
  require(!duration.empty(), ErrorCode::kInvalidArgument, "map_durations: no states");
  require(duration_cap >= 1, ErrorCode::kInvalidArgument, "map_durations: duration_cap must be >= 1");
  StateSequence sequence;
  sequence.durations.reserve(duration.size());
  for (const auto& g : duration) {
    require(std::isfinite(g.mean), ErrorCode::kInvalidArgument,
            "map_durations: non-finite duration mean");
    // Nearest integer to the mean maximizes the unimodal density; exact
    // half-integer ties go to the smaller duration.
    const int nearest = static_cast<int>(std::ceil(g.mean - 0.5));
    sequence.durations.push_back(std::clamp(nearest, 1, duration_cap));
  }
  return sequence;
}

}  // namespace hsmmattn
