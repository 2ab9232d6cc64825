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

#include "networks.hpp"

namespace hsmmattn {

namespace {

Mlp make_mlp(int input, const std::vector<int>& hidden, int output, bool activate_output) {
  Mlp mlp;
  mlp.widths.push_back(input);
  mlp.widths.insert(mlp.widths.end(), hidden.begin(), hidden.end());
  mlp.widths.push_back(output);
  mlp.activate_output = activate_output;
  return mlp;
}

}  // namespace

ModelShapes ModelShapes::build(const NetworkConfig& config) {
  require(config.unit_dim >= 1 && config.frame_dim >= 1 && config.context_dim >= 1,
          ErrorCode::kConfig, "network config: dimensions must be positive");
  require(!config.encoder_hidden.empty(), ErrorCode::kConfig,
          "network config: encoder_hidden must not be empty");
  require(config.variance_floor > 0.0, ErrorCode::kConfig,
          "network config: variance_floor must be positive");
  for (const auto& widths :
       {config.encoder_hidden, config.prenet_hidden, config.core_hidden, config.prior_hidden}) {
    for (int w : widths) {
      require(w >= 1, ErrorCode::kConfig, "network config: hidden widths must be positive");
    }
  }

  ModelShapes shapes;
  shapes.config = config;
  const int trunk_out = config.encoder_hidden.back();
  std::vector<int> trunk_hidden(config.encoder_hidden.begin(), config.encoder_hidden.end() - 1);
  shapes.trunk = make_mlp(config.unit_dim, trunk_hidden, trunk_out, /*activate_output=*/true);
  shapes.emission_head = make_mlp(trunk_out, {}, 2 * config.frame_dim, false);
  shapes.duration_head = make_mlp(trunk_out, {}, 2, false);
  shapes.unit_prenet = make_mlp(config.unit_dim, config.prenet_hidden, config.context_dim, false);
  shapes.frame_prenet = make_mlp(config.frame_dim, config.prenet_hidden, config.context_dim, false);
  shapes.core = make_mlp(2 * config.context_dim, config.core_hidden, 2 * config.frame_dim, false);
  shapes.prior_net = make_mlp(config.unit_dim, config.prior_hidden, 2, false);
  return shapes;
}

const Mlp& ModelShapes::head_shape(Head head) const {
  switch (head) {
    case Head::kEncoderTrunk: return trunk;
    case Head::kEncoderEmission: return emission_head;
    case Head::kEncoderDuration: return duration_head;
    case Head::kDecoderUnitPrenet: return unit_prenet;
    case Head::kDecoderFramePrenet: return frame_prenet;
    case Head::kDecoderCore: return core;
    case Head::kPriorNet: return prior_net;
  }
  throw_error(ErrorCode::kInternal, "head_shape: unknown head");
}

ModelBundle ModelBundle::init(const NetworkConfig& config, uint64_t seed) {
  ModelBundle bundle;
  bundle.config = config;
  bundle.shapes = ModelShapes::build(config);
  std::mt19937_64 rng(seed);
  for (int h = 0; h < bundle.shapes.num_heads(); ++h) {
    const Mlp& shape = bundle.shapes.head_shape(static_cast<Head>(h));
    std::vector<double> head_params(shape.param_count());
    shape.init_params(head_params, rng);
    bundle.params.push_back(std::move(head_params));
  }
  return bundle;
}

Matrix<double> decode_free_running(const ModelShapes& shapes, const ParamSet<double>& ps,
                                   const Matrix<double>& contexts) {
  const int num_frames = contexts.rows();
  const int frame_dim = shapes.config.frame_dim;
  Matrix<double> out(num_frames, frame_dim);
  std::vector<double> prev(frame_dim, 0.0);
  std::vector<double> core_input;
  for (int t = 0; t < num_frames; ++t) {
    std::vector<double> prenet_out =
        shapes.frame_prenet.forward<double, double>(ps.frame_prenet, prev);
    core_input.assign(contexts.row(t).begin(), contexts.row(t).end());
    core_input.insert(core_input.end(), prenet_out.begin(), prenet_out.end());
    std::vector<double> y =
        shapes.core.forward<double, double>(ps.core, std::span<const double>(core_input));
    for (int j = 0; j < frame_dim; ++j) {
      out.at(t, j) = y[j];
      prev[j] = y[j];
    }
  }
  return out;
}

}  // namespace hsmmattn
