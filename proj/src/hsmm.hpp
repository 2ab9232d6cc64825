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
//
// Left-to-right, no-skip hidden semi-Markov model. Each of the K states is
// visited exactly once in order; a length-T observation is carved into K
// segments with durations in [1, duration_cap]. The dynamic programs run
// over segment endpoints in the log domain and are generic over the scalar
// type, so posteriors stay differentiable when evaluated on a tape.

#ifndef HSMMATTN_HSMM_HPP
#define HSMMATTN_HSMM_HPP

#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"
#include "gaussian.hpp"
#include "matrix.hpp"
#include "numerics.hpp"
#include "tape.hpp"

namespace hsmmattn {

// Per-state Gaussian emission and duration parameters for the no-skip chain.
// emission[k][dim] models output dimension dim of state k; duration[k]
// models the integer segment length of state k.
template <class S>
struct HsmmParams {
  int num_states = 0;
  int duration_cap = 0;  // maximum segment duration admitted by the DP
  double variance_floor = 1e-4;
  std::vector<std::vector<Gaussian<S>>> emission;  // [K][F_o]
  std::vector<Gaussian<S>> duration;               // [K]
};

// A monotone segmentation: durations d_1..d_K, all positive, summing to the
// number of frames they label.
struct StateSequence {
  std::vector<int> durations;

  int total_frames() const {
    int total = 0;
    for (int d : durations) total += d;
    return total;
  }
};

// Posterior probability that state `state` occupies exactly the segment of
// length `duration` ending at `end_frame` (frames are 1-based).
template <class S>
struct SegmentPosterior {
  int state = 0;      // 1..K
  int end_frame = 0;  // 1..T
  int duration = 0;   // 1..duration_cap
  S log_prob;
  S prob;
};

// One reachable occupancy cell: log gamma_k(t) after per-frame
// renormalization (so each frame's probabilities sum to one exactly).
template <class S>
struct OccupancyCell {
  int state = 0;  // 1..K
  int frame = 0;  // 1..T
  S log_prob;
  S prob;
};

template <class S>
struct Posterior {
  int num_states = 0;
  int num_frames = 0;
  Matrix<S> gamma;                           // [K][T] occupancy, zero where unreachable
  std::vector<OccupancyCell<S>> gamma_cells;  // reachable cells only
  std::vector<SegmentPosterior<S>> gamma_d;   // sparse segment-end posteriors
  S log_evidence;
  S log_evidence_backward;  // same quantity from the backward recursion

  const S* find_gamma_d(int state, int end_frame, int duration) const {
    for (const auto& cell : gamma_d) {
      if (cell.state == state && cell.end_frame == end_frame && cell.duration == duration)
        return &cell.prob;
    }
    return nullptr;
  }
};

namespace detail {

// Reachable end-frame range of state k (1-based): frames before it need at
// least k-1 slots, frames after it at least K-k.
inline int state_end_low(int k) { return k; }
inline int state_end_high(int k, int num_states, int num_frames) {
  return num_frames - (num_states - k);
}

template <class S>
void validate_hsmm_inputs(const HsmmParams<S>& params, const Matrix<double>& obs) {
  require(params.num_states >= 1, ErrorCode::kInvalidArgument, "hsmm: need at least one state");
  require(params.duration_cap >= 1, ErrorCode::kInvalidArgument, "hsmm: duration_cap must be >= 1");
  require(static_cast<int>(params.emission.size()) == params.num_states &&
              static_cast<int>(params.duration.size()) == params.num_states,
          ErrorCode::kInvalidArgument, "hsmm: parameter table sizes do not match num_states");
  const int num_frames = obs.rows();
  require(num_frames >= params.num_states,
          ErrorCode::kInfeasible,
          "hsmm: observation has " + std::to_string(num_frames) + " frames but needs at least " +
              std::to_string(params.num_states));
  require(static_cast<long>(num_frames) <=
              static_cast<long>(params.num_states) * params.duration_cap,
          ErrorCode::kInfeasible,
          "hsmm: observation has " + std::to_string(num_frames) + " frames but at most " +
              std::to_string(static_cast<long>(params.num_states) * params.duration_cap) +
              " are explainable with duration_cap " + std::to_string(params.duration_cap));
  for (const auto& state_emission : params.emission) {
    require(static_cast<int>(state_emission.size()) == obs.cols(), ErrorCode::kInvalidArgument,
            "hsmm: emission dimension does not match observation dimension");
  }
}

// log duration probabilities, dur_lp[k][d-1] = log N(d | duration[k]).
template <class S>
std::vector<std::vector<S>> duration_log_probs(const HsmmParams<S>& params) {
  std::vector<std::vector<S>> dur_lp(params.num_states);
  for (int k = 0; k < params.num_states; ++k) {
    dur_lp[k].reserve(params.duration_cap);
    for (int d = 1; d <= params.duration_cap; ++d) {
      dur_lp[k].push_back(gaussian_log_density(static_cast<double>(d), params.duration[k],
                                               params.variance_floor));
    }
  }
  return dur_lp;
}

// Cumulative emission scores, cum[k][t] = sum_{tau<=t} log p(o_tau | k),
// cum[k][0] = 0, so a segment score is one subtraction.
template <class S>
std::vector<std::vector<S>> emission_cumulative(const ScalarContext<S>& ctx,
                                                const HsmmParams<S>& params,
                                                const Matrix<double>& obs) {
  const int num_frames = obs.rows();
  const int dim = obs.cols();
  std::vector<std::vector<S>> cum(params.num_states);
  std::vector<S> frame_terms(dim, ctx.make(0.0));
  for (int k = 0; k < params.num_states; ++k) {
    cum[k].reserve(num_frames + 1);
    cum[k].push_back(ctx.make(0.0));
    for (int t = 1; t <= num_frames; ++t) {
      for (int j = 0; j < dim; ++j) {
        frame_terms[j] =
            gaussian_log_density(obs.at(t - 1, j), params.emission[k][j], params.variance_floor);
      }
      S frame_lp = hsmmattn::sum(std::span<const S>(frame_terms));
      cum[k].push_back(cum[k][t - 1] + frame_lp);
    }
  }
  return cum;
}

// Forward scores over segment endpoints: alpha[k][t] = log p(frames 1..t,
// states 1..k done, state k ends at t). alpha[0][0] = 0.
template <class S>
Matrix<S> forward_scores(const ScalarContext<S>& ctx, const HsmmParams<S>& params,
                         const std::vector<std::vector<S>>& dur_lp,
                         const std::vector<std::vector<S>>& cum, int num_frames) {
  const int num_states = params.num_states;
  const S neg_inf = ctx.make(kNegativeInfinity);
  Matrix<S> alpha(num_states + 1, num_frames + 1, neg_inf);
  alpha.at(0, 0) = ctx.make(0.0);
  std::vector<S> candidates;
  for (int k = 1; k <= num_states; ++k) {
    const int prev_low = (k == 1) ? 0 : state_end_low(k - 1);
    const int prev_high = (k == 1) ? 0 : state_end_high(k - 1, num_states, num_frames);
    for (int t = state_end_low(k); t <= state_end_high(k, num_states, num_frames); ++t) {
      candidates.clear();
      const int d_low = std::max(1, t - prev_high);
      const int d_high = std::min(params.duration_cap, t - prev_low);
      for (int d = d_low; d <= d_high; ++d) {
        const S& prev = alpha.at(k - 1, t - d);
        if (value_of(prev) == kNegativeInfinity) continue;
        candidates.push_back(prev + dur_lp[k - 1][d - 1] + (cum[k - 1][t] - cum[k - 1][t - d]));
      }
      if (!candidates.empty()) {
        alpha.at(k, t) = hsmmattn::log_sum_exp(std::span<const S>(candidates));
      }
    }
  }
  return alpha;
}

// Backward scores: beta[k][t] = log p(frames t+1..T | state k ended at t).
// beta[K][T] = 0; beta[0][0] reproduces the evidence.
template <class S>
Matrix<S> backward_scores(const ScalarContext<S>& ctx, const HsmmParams<S>& params,
                          const std::vector<std::vector<S>>& dur_lp,
                          const std::vector<std::vector<S>>& cum, int num_frames) {
  const int num_states = params.num_states;
  const S neg_inf = ctx.make(kNegativeInfinity);
  Matrix<S> beta(num_states + 1, num_frames + 1, neg_inf);
  beta.at(num_states, num_frames) = ctx.make(0.0);
  std::vector<S> candidates;
  for (int k = num_states - 1; k >= 0; --k) {
    const int next = k + 1;
    const int next_low = state_end_low(next);
    const int next_high = state_end_high(next, num_states, num_frames);
    const int t_low = (k == 0) ? 0 : state_end_low(k);
    const int t_high = (k == 0) ? 0 : state_end_high(k, num_states, num_frames);
    for (int t = t_low; t <= t_high; ++t) {
      candidates.clear();
      const int d_low = std::max(1, next_low - t);
      const int d_high = std::min(params.duration_cap, next_high - t);
      for (int d = d_low; d <= d_high; ++d) {
        const S& rest = beta.at(next, t + d);
        if (value_of(rest) == kNegativeInfinity) continue;
        candidates.push_back(dur_lp[next - 1][d - 1] + (cum[next - 1][t + d] - cum[next - 1][t]) +
                             rest);
      }
      if (!candidates.empty()) {
        beta.at(k, t) = hsmmattn::log_sum_exp(std::span<const S>(candidates));
      }
    }
  }
  return beta;
}

}  // namespace detail

// log p(o | params): log-domain sum over all monotone segmentations of the
// emission and duration terms, via the forward recursion in
// O(K * T * duration_cap). Duration terms use the continuous Gaussian
// density at integer durations (an unnormalized score, as is conventional).
template <class S>
S hsmm_log_likelihood(const ScalarContext<S>& ctx, const HsmmParams<S>& params,
                      const Matrix<double>& obs) {
  detail::validate_hsmm_inputs(params, obs);
  const int num_frames = obs.rows();
  auto dur_lp = detail::duration_log_probs(params);
  auto cum = detail::emission_cumulative(ctx, params, obs);
  Matrix<S> alpha = detail::forward_scores(ctx, params, dur_lp, cum, num_frames);
  return alpha.at(params.num_states, num_frames);
}

inline double hsmm_log_likelihood(const HsmmParams<double>& params, const Matrix<double>& obs) {
  return hsmm_log_likelihood(ScalarContext<double>{}, params, obs);
}

// Generalized forward-backward: occupancy posteriors gamma_k(t), segment-end
// posteriors gamma_k^(d)(t) and the evidence. Occupancy rows are
// renormalized per frame in the log domain, which keeps every
// -gamma*log(gamma) entropy term non-negative in floating point.
template <class S>
Posterior<S> forward_backward(const ScalarContext<S>& ctx, const HsmmParams<S>& params,
                              const Matrix<double>& obs) {
  using std::exp;
  detail::validate_hsmm_inputs(params, obs);
  const int num_states = params.num_states;
  const int num_frames = obs.rows();

  auto dur_lp = detail::duration_log_probs(params);
  auto cum = detail::emission_cumulative(ctx, params, obs);
  Matrix<S> alpha = detail::forward_scores(ctx, params, dur_lp, cum, num_frames);
  Matrix<S> beta = detail::backward_scores(ctx, params, dur_lp, cum, num_frames);

  Posterior<S> post;
  post.num_states = num_states;
  post.num_frames = num_frames;
  post.log_evidence = alpha.at(num_states, num_frames);
  post.log_evidence_backward = beta.at(0, 0);
  require(value_of(post.log_evidence) != kNegativeInfinity, ErrorCode::kInfeasible,
          "forward_backward: no segmentation has positive probability");

  // Unnormalized segment scores; log gamma_d = score - log_evidence.
  post.gamma_d.reserve(static_cast<size_t>(num_states) * params.duration_cap);
  std::vector<std::vector<std::vector<S>>> occupancy_terms(
      num_states, std::vector<std::vector<S>>(num_frames + 1));
  for (int k = 1; k <= num_states; ++k) {
    const int prev_low = (k == 1) ? 0 : detail::state_end_low(k - 1);
    const int prev_high = (k == 1) ? 0 : detail::state_end_high(k - 1, num_states, num_frames);
    for (int t = detail::state_end_low(k); t <= detail::state_end_high(k, num_states, num_frames);
         ++t) {
      if (value_of(beta.at(k, t)) == kNegativeInfinity) continue;
      const int d_low = std::max(1, t - prev_high);
      const int d_high = std::min(params.duration_cap, t - prev_low);
      for (int d = d_low; d <= d_high; ++d) {
        const S& prev = alpha.at(k - 1, t - d);
        if (value_of(prev) == kNegativeInfinity) continue;
        S score =
            prev + dur_lp[k - 1][d - 1] + (cum[k - 1][t] - cum[k - 1][t - d]) + beta.at(k, t);
        SegmentPosterior<S> cell;
        cell.state = k;
        cell.end_frame = t;
        cell.duration = d;
        cell.log_prob = score - post.log_evidence;
        cell.prob = exp(cell.log_prob);
        for (int frame = t - d + 1; frame <= t; ++frame) {
          occupancy_terms[k - 1][frame].push_back(score);
        }
        post.gamma_d.push_back(std::move(cell));
      }
    }
  }

  // Occupancy: log-sum over the segments covering each frame, then a
  // per-frame renormalization across states.
  const S zero = ctx.make(0.0);
  post.gamma = Matrix<S>(num_states, num_frames, zero);
  post.gamma_cells.reserve(static_cast<size_t>(num_states) * num_frames);
  std::vector<S> row_raw(num_states, zero);
  std::vector<int> row_states;
  for (int t = 1; t <= num_frames; ++t) {
    row_states.clear();
    for (int k = 1; k <= num_states; ++k) {
      auto& terms = occupancy_terms[k - 1][t];
      if (terms.empty()) continue;
      row_raw[k - 1] = hsmmattn::log_sum_exp(std::span<const S>(terms));
      row_states.push_back(k);
    }
    require(!row_states.empty(), ErrorCode::kInternal,
            "forward_backward: frame with no occupying state");
    std::vector<S> row_terms;
    row_terms.reserve(row_states.size());
    for (int k : row_states) row_terms.push_back(row_raw[k - 1]);
    S row_total = hsmmattn::log_sum_exp(std::span<const S>(row_terms));
    for (int k : row_states) {
      OccupancyCell<S> cell;
      cell.state = k;
      cell.frame = t;
      cell.log_prob = row_raw[k - 1] - row_total;
      cell.prob = exp(cell.log_prob);
      post.gamma.at(k - 1, t - 1) = cell.prob;
      post.gamma_cells.push_back(std::move(cell));
    }
  }
  return post;
}

inline Posterior<double> forward_backward(const HsmmParams<double>& params,
                                          const Matrix<double>& obs) {
  return forward_backward(ScalarContext<double>{}, params, obs);
}

// Exact posterior by explicit enumeration of all monotone segmentations.
// Test oracle: same output contract as forward_backward, O(#segmentations).
Posterior<double> enumerate_posterior(const HsmmParams<double>& params, const Matrix<double>& obs,
                                      long max_sequences = 1000000);

// Number of compositions of num_frames into num_states parts in
// [1, duration_cap].
long count_segmentations(int num_states, int num_frames, int duration_cap);

// Most likely duration per state under its Gaussian: the integer nearest to
// the mean, ties broken toward the smaller duration, clamped to
// [1, duration_cap].
StateSequence map_durations(const std::vector<Gaussian<double>>& duration, int duration_cap);

}  // namespace hsmmattn

#endif  // HSMMATTN_HSMM_HPP
