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
// The three trainable networks: an encoder that maps per-unit features to
// HSMM emission and duration Gaussians, an autoregressive decoder with unit
// and frame PreNets, and a duration prior that either owns its own network
// or aliases the encoder's duration path.

#ifndef HSMMATTN_NETWORKS_HPP
#define HSMMATTN_NETWORKS_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "hsmm.hpp"
#include "matrix.hpp"
#include "mlp.hpp"

namespace hsmmattn {

struct NetworkConfig {
  int unit_dim = 0;       // F_l, per-unit feature dimension
  int frame_dim = 0;      // F_o, per-frame output dimension
  int context_dim = 32;   // F_h, width of the attention context
  std::vector<int> encoder_hidden{64, 64};
  std::vector<int> prenet_hidden{64, 64};
  std::vector<int> core_hidden{64, 64};
  std::vector<int> prior_hidden{64, 64};
  bool share_prior = true;  // prior aliases the encoder duration path
  double variance_floor = 1e-4;
};

// Canonical parameter heads. Checkpoints, the optimizer and gradient
// reporting all iterate heads in this order.
enum class Head : int {
  kEncoderTrunk = 0,
  kEncoderEmission = 1,
  kEncoderDuration = 2,
  kDecoderUnitPrenet = 3,
  kDecoderFramePrenet = 4,
  kDecoderCore = 5,
  kPriorNet = 6,
};

inline const char* head_name(Head head) {
  switch (head) {
    case Head::kEncoderTrunk: return "encoder.trunk";
    case Head::kEncoderEmission: return "encoder.emission_head";
    case Head::kEncoderDuration: return "encoder.duration_head";
    case Head::kDecoderUnitPrenet: return "decoder.unit_prenet";
    case Head::kDecoderFramePrenet: return "decoder.frame_prenet";
    case Head::kDecoderCore: return "decoder.core";
    case Head::kPriorNet: return "prior.net";
  }
  return "?";
}

// Network shapes derived from a NetworkConfig. Parameters are stored
// elsewhere (ModelBundle) as one flat vector per head.
struct ModelShapes {
  NetworkConfig config;
  Mlp trunk;           // unit features -> hidden representation (tanh output)
  Mlp emission_head;   // hidden -> [means, log variances] (2 * frame_dim)
  Mlp duration_head;   // hidden -> [duration mean, duration log variance]
  Mlp unit_prenet;     // unit features -> context_dim
  Mlp frame_prenet;    // previous frame -> context_dim
  Mlp core;            // [context, frame prenet] -> [means, log variances]
  Mlp prior_net;       // unit features -> duration Gaussian (when not shared)

  static ModelShapes build(const NetworkConfig& config);

  int num_heads() const { return config.share_prior ? 6 : 7; }
  const Mlp& head_shape(Head head) const;
};

// Trainable parameters per head, as spans so the same network code runs on
// master double storage and on tape leaves.
template <class S>
struct ParamSet {
  std::span<const S> trunk;
  std::span<const S> emission_head;
  std::span<const S> duration_head;
  std::span<const S> unit_prenet;
  std::span<const S> frame_prenet;
  std::span<const S> core;
  std::span<const S> prior_net;  // empty when the prior is shared
};

// Encoder and weights plus training state travel together.
struct ModelBundle {
  NetworkConfig config;
  ModelShapes shapes;
  std::vector<std::vector<double>> params;  // one flat vector per head

  static ModelBundle init(const NetworkConfig& config, uint64_t seed);

  ParamSet<double> view() const {
    ParamSet<double> ps;
    ps.trunk = params[0];
    ps.emission_head = params[1];
    ps.duration_head = params[2];
    ps.unit_prenet = params[3];
    ps.frame_prenet = params[4];
    ps.core = params[5];
    if (!config.share_prior) ps.prior_net = params[6];
    return ps;
  }
};

// Maps a K x F_l unit-feature matrix to per-state HSMM Gaussians. The map is
// pointwise over rows, so permuting units permutes states. duration_cap is
// left at 0; callers resolve it against the observation length.
template <class S>
HsmmParams<S> encode(const ModelShapes& shapes, const ParamSet<S>& ps,
                     const Matrix<double>& units) {
  const int num_states = units.rows();
  require(num_states >= 1, ErrorCode::kInvalidArgument, "encode: need at least one unit");
  require(units.cols() == shapes.config.unit_dim, ErrorCode::kInvalidArgument,
          "encode: unit feature dimension mismatch");
  const int frame_dim = shapes.config.frame_dim;

  HsmmParams<S> out;
  out.num_states = num_states;
  out.duration_cap = 0;
  out.variance_floor = shapes.config.variance_floor;
  out.emission.resize(num_states);
  out.duration.reserve(num_states);
  for (int k = 0; k < num_states; ++k) {
    std::vector<S> hidden = shapes.trunk.forward<S, double>(ps.trunk, units.row(k));
    std::vector<S> em =
        shapes.emission_head.forward<S, S>(ps.emission_head, std::span<const S>(hidden));
    out.emission[k].reserve(frame_dim);
    for (int j = 0; j < frame_dim; ++j) {
      out.emission[k].push_back({em[j], em[frame_dim + j]});
    }
    std::vector<S> du =
        shapes.duration_head.forward<S, S>(ps.duration_head, std::span<const S>(hidden));
    out.duration.push_back({du[0], du[1]});
  }
  return out;
}

// f(l_k) for every unit row, K x context_dim.
template <class S>
Matrix<S> unit_encodings(const ModelShapes& shapes, const ParamSet<S>& ps,
                         const Matrix<double>& units) {
  Matrix<S> out(units.rows(), shapes.config.context_dim);
  for (int k = 0; k < units.rows(); ++k) {
    std::vector<S> enc = shapes.unit_prenet.forward<S, double>(ps.unit_prenet, units.row(k));
    for (int j = 0; j < shapes.config.context_dim; ++j) out.at(k, j) = enc[j];
  }
  return out;
}

// Context vectors: the gamma-weighted average of unit encodings per frame.
// gamma is K x T with columns summing to one; encodings is K x F_h; the
// result is T x F_h and linear in both arguments.
template <class S>
Matrix<S> context_vectors(const Matrix<S>& gamma, const Matrix<S>& encodings) {
  const int num_states = gamma.rows();
  const int num_frames = gamma.cols();
  require(encodings.rows() == num_states, ErrorCode::kInvalidArgument,
          "context_vectors: gamma and encodings disagree on the number of units");
  const int width = encodings.cols();

  // Transposed copy so each feature column is contiguous for the dot op.
  Matrix<S> enc_t(width, num_states);
  for (int k = 0; k < num_states; ++k) {
    for (int j = 0; j < width; ++j) enc_t.at(j, k) = encodings.at(k, j);
  }

  Matrix<S> contexts(num_frames, width);
  std::vector<S> column;
  for (int t = 0; t < num_frames; ++t) {
    column.clear();
    double total = 0.0;
    for (int k = 0; k < num_states; ++k) {
      column.push_back(gamma.at(k, t));
      total += value_of(gamma.at(k, t));
    }
    require(std::abs(total - 1.0) <= 1e-6, ErrorCode::kInvalidArgument,
            "context_vectors: occupancy column " + std::to_string(t + 1) +
                " sums to " + std::to_string(total));
    for (int j = 0; j < width; ++j) {
      contexts.at(t, j) = hsmmattn::dot(std::span<const S>(column), enc_t.row(j));
    }
  }
  return contexts;
}

template <class S>
struct DecodeResult {
  S log_prob;                                       // teacher-forced log p(o | contexts)
  std::vector<std::vector<Gaussian<S>>> per_frame;  // [T][F_o] output Gaussians
};

// Teacher-forced decoding: the frame PreNet always sees the ground-truth
// previous frame (an all-zero go-frame at t=1); log_prob sums the per-frame,
// per-dimension Gaussian log densities of the targets.
template <class S>
DecodeResult<S> decode_teacher_forced(const ModelShapes& shapes, const ParamSet<S>& ps,
                                      const Matrix<S>& contexts, const Matrix<double>& targets) {
  const int num_frames = targets.rows();
  const int frame_dim = shapes.config.frame_dim;
  require(contexts.rows() == num_frames, ErrorCode::kInvalidArgument,
          "decode_teacher_forced: contexts and targets disagree on length");
  require(targets.cols() == frame_dim, ErrorCode::kInvalidArgument,
          "decode_teacher_forced: target dimension mismatch");
  for (double x : targets.data()) {
    require(std::isfinite(x), ErrorCode::kInvalidArgument,
            "decode_teacher_forced: non-finite target frame");
  }

  DecodeResult<S> result;
  result.per_frame.resize(num_frames);
  std::vector<double> go_frame(frame_dim, 0.0);
  std::vector<S> core_input;
  std::vector<S> density_terms;
  for (int t = 0; t < num_frames; ++t) {
    std::span<const double> prev =
        (t == 0) ? std::span<const double>(go_frame) : targets.row(t - 1);
    std::vector<S> prenet_out = shapes.frame_prenet.forward<S, double>(ps.frame_prenet, prev);
    core_input.assign(contexts.row(t).begin(), contexts.row(t).end());
    core_input.insert(core_input.end(), prenet_out.begin(), prenet_out.end());
    std::vector<S> out = shapes.core.forward<S, S>(ps.core, std::span<const S>(core_input));
    result.per_frame[t].reserve(frame_dim);
    for (int j = 0; j < frame_dim; ++j) {
      Gaussian<S> g{out[j], out[frame_dim + j]};
      density_terms.push_back(
          gaussian_log_density(targets.at(t, j), g, shapes.config.variance_floor));
      result.per_frame[t].push_back(std::move(g));
    }
  }
  result.log_prob = hsmmattn::sum(std::span<const S>(density_terms));
  return result;
}

// Free-running synthesis: each frame is the decoder's mean output, and the
// frame PreNet is fed the previous generated mean (deterministic, no
// sampling).
Matrix<double> decode_free_running(const ModelShapes& shapes, const ParamSet<double>& ps,
                                   const Matrix<double>& contexts);

// Duration Gaussians used by the prior term. When the prior is shared they
// are exactly the encoder's duration Gaussians (same tape nodes, so both
// objective terms accumulate into the same parameters).
template <class S>
std::vector<Gaussian<S>> prior_durations(const ModelShapes& shapes, const ParamSet<S>& ps,
                                         const Matrix<double>& units,
                                         const HsmmParams<S>& encoded) {
  if (shapes.config.share_prior) return encoded.duration;
  std::vector<Gaussian<S>> out;
  out.reserve(units.rows());
  for (int k = 0; k < units.rows(); ++k) {
    std::vector<S> p = shapes.prior_net.forward<S, double>(ps.prior_net, units.row(k));
    out.push_back({p[0], p[1]});
  }
  return out;
}

}  // namespace hsmmattn

#endif  // HSMMATTN_NETWORKS_HPP
