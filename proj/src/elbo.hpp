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
// Evidence lower bound of the latent-segmentation model: reconstruction
// term under gamma-weighted contexts, duration prior term under the
// segment-end posteriors, and the per-frame occupancy entropy. Everything
// is built from tape scalars when gradients are needed, so the bound is
// differentiable end to end through the posteriors.

#ifndef HSMMATTN_ELBO_HPP
#define HSMMATTN_ELBO_HPP

#include <cmath>
#include <vector>

#include "hsmm.hpp"
#include "networks.hpp"
#include "numerics.hpp"

namespace hsmmattn {

struct ElboBreakdown {
  double q_dec = 0.0;    // log p(o | contexts), teacher forced
  double q_prior = 0.0;  // expected duration log prior under gamma_d
  double entropy = 0.0;  // sum of per-frame occupancy entropies
  double total = 0.0;    // q_dec + q_prior + entropy
  double corpus_ll = 0.0;  // HSMM log evidence of the same utterance
};

template <class S>
struct ElboTerms {
  S q_dec;
  S q_prior;
  S entropy;
  S total;
  S log_evidence;

  ElboBreakdown values() const {
    return {value_of(q_dec), value_of(q_prior), value_of(entropy), value_of(total),
            value_of(log_evidence)};
  }
};

// Duration cap used by the DP for one utterance: wide enough to cover the
// bulk of every state's duration Gaussian (mean + 5 sigma) but never below
// ceil(T/K), which keeps the utterance explainable, and never above T.
// The cap is resolved from current parameter values and is not itself
// differentiated. cap_override > 0 pins the policy value.
template <class S>
int resolve_duration_cap(const HsmmParams<S>& params, int num_frames, int cap_override) {
  const int num_states = params.num_states;
  const int feasible_min = (num_frames + num_states - 1) / num_states;
  int cap;
  if (cap_override > 0) {
    cap = cap_override;
  } else {
    double widest = 1.0;
    for (const auto& g : params.duration) {
      const double sigma =
          std::sqrt(std::max(std::exp(value_of(g.log_var)), params.variance_floor));
      widest = std::max(widest, value_of(g.mean) + 5.0 * sigma);
    }
    cap = static_cast<int>(std::ceil(widest));
  }
  return std::min(num_frames, std::max(feasible_min, cap));
}

// -sum gamma log gamma over the reachable cells. Rows are renormalized in
// the log domain inside forward_backward, so every term is non-negative and
// the total is 0 exactly when the posterior is deterministic.
template <class S>
S occupancy_entropy(const ScalarContext<S>& ctx, const Posterior<S>& posterior) {
  std::vector<S> terms;
  terms.reserve(posterior.gamma_cells.size());
  for (const auto& cell : posterior.gamma_cells) {
    terms.push_back(cell.prob * cell.log_prob);
  }
  if (terms.empty()) return ctx.make(0.0);
  return -hsmmattn::sum(std::span<const S>(terms));
}

// Entropy of an explicit occupancy matrix (0 log 0 := 0); used by tests and
// reports that do not hold a Posterior.
inline double occupancy_entropy(const Matrix<double>& gamma) {
  double entropy = 0.0;
  for (double g : gamma.data()) {
    if (g > 0.0) entropy -= g * std::log(g);
  }
  return entropy;
}

// Expected duration log prior: sum over segment-end posteriors of
// gamma_d * log N(d | prior duration Gaussian of the owning state).
template <class S>
S duration_prior_term(const Posterior<S>& posterior,
                      const std::vector<Gaussian<S>>& prior, double variance_floor) {
  require(static_cast<int>(prior.size()) == posterior.num_states, ErrorCode::kInvalidArgument,
          "duration_prior_term: prior size mismatch");
  // Densities once per (state, duration) pair actually present.
  std::vector<S> terms;
  terms.reserve(posterior.gamma_d.size());
  std::vector<std::vector<S>> density(prior.size());
  for (const auto& cell : posterior.gamma_d) {
    auto& per_state = density[cell.state - 1];
    while (static_cast<int>(per_state.size()) < cell.duration) {
      const int d = static_cast<int>(per_state.size()) + 1;
      per_state.push_back(gaussian_log_density(static_cast<double>(d), prior[cell.state - 1],
                                               variance_floor));
    }
    terms.push_back(cell.prob * per_state[cell.duration - 1]);
  }
  return hsmmattn::sum(std::span<const S>(terms));
}

// Full lower bound for one utterance: encode, run forward-backward, form
// contexts from gamma, teacher-force the decoder, and add the prior and
// entropy terms. The returned total is q_dec + q_prior + entropy in that
// accumulation order.
template <class S>
ElboTerms<S> compute_elbo(const ScalarContext<S>& ctx, const ModelShapes& shapes,
                          const ParamSet<S>& ps, const Matrix<double>& units,
                          const Matrix<double>& frames, int cap_override = 0) {
  HsmmParams<S> hsmm_params = encode(shapes, ps, units);
  hsmm_params.duration_cap = resolve_duration_cap(hsmm_params, frames.rows(), cap_override);
  Posterior<S> posterior = forward_backward(ctx, hsmm_params, frames);

  Matrix<S> encodings = unit_encodings(shapes, ps, units);
  Matrix<S> contexts = context_vectors(posterior.gamma, encodings);
  DecodeResult<S> decoded = decode_teacher_forced(shapes, ps, contexts, frames);

  std::vector<Gaussian<S>> prior = prior_durations(shapes, ps, units, hsmm_params);

  ElboTerms<S> terms;
  terms.q_dec = decoded.log_prob;
  terms.q_prior = duration_prior_term(posterior, prior, shapes.config.variance_floor);
  terms.entropy = occupancy_entropy(ctx, posterior);
  terms.total = terms.q_dec + terms.q_prior + terms.entropy;
  terms.log_evidence = posterior.log_evidence;
  return terms;
}

}  // namespace hsmmattn

#endif  // HSMMATTN_ELBO_HPP
