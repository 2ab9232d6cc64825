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

#ifndef HSMMATTN_MLP_HPP
#define HSMMATTN_MLP_HPP

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "error.hpp"
#include "numerics.hpp"
#include "tape.hpp"

namespace hsmmattn {

// Fully connected network shape: tanh on hidden layers, identity on the
// output layer (tanh there too when activate_output is set, for trunk-style
// feature extractors). Parameters live outside the struct as one flat
// vector, laid out per layer as row-major weights followed by biases.
struct Mlp {
  std::vector<int> widths;  // [input, hidden..., output]
  bool activate_output = false;

  int num_layers() const { return static_cast<int>(widths.size()) - 1; }

  int param_count() const {
    int total = 0;
    for (int l = 0; l + 1 < static_cast<int>(widths.size()); ++l) {
      total += widths[l] * widths[l + 1] + widths[l + 1];
    }
    return total;
  }

  // Glorot-uniform weights, zero biases.
  void init_params(std::span<double> params, std::mt19937_64& rng) const {
    require(static_cast<int>(params.size()) == param_count(), ErrorCode::kInvalidArgument,
            "Mlp::init_params: wrong parameter count");
    size_t offset = 0;
    for (int l = 0; l < num_layers(); ++l) {
      const int fan_in = widths[l];
      const int fan_out = widths[l + 1];
      const double radius = std::sqrt(6.0 / (fan_in + fan_out));
      std::uniform_real_distribution<double> dist(-radius, radius);
      for (int i = 0; i < fan_in * fan_out; ++i) params[offset++] = dist(rng);
      for (int i = 0; i < fan_out; ++i) params[offset++] = 0.0;
    }
  }

  // S is the parameter scalar (double or Var); X is the input scalar and may
  // be plain double even when S is Var (data enters the graph as constants).
  template <class S, class X>
  std::vector<S> forward(std::span<const S> params, std::span<const X> input) const {
    using std::tanh;
    require(num_layers() >= 1, ErrorCode::kInvalidArgument, "Mlp::forward: no layers");
    require(static_cast<int>(input.size()) == widths[0], ErrorCode::kInvalidArgument,
            "Mlp::forward: input dimension mismatch");
    require(static_cast<int>(params.size()) == param_count(), ErrorCode::kInvalidArgument,
            "Mlp::forward: wrong parameter count");

    size_t offset = 0;
    std::vector<S> current;
    for (int l = 0; l < num_layers(); ++l) {
      const int fan_in = widths[l];
      const int fan_out = widths[l + 1];
      const bool activate = (l + 1 < num_layers()) || activate_output;
      std::vector<S> next;
      next.reserve(fan_out);
      std::span<const S> weights = params.subspan(offset, static_cast<size_t>(fan_in) * fan_out);
      std::span<const S> biases = params.subspan(offset + static_cast<size_t>(fan_in) * fan_out,
                                                 fan_out);
      for (int j = 0; j < fan_out; ++j) {
        std::span<const S> row = weights.subspan(static_cast<size_t>(j) * fan_in, fan_in);
        S pre = (l == 0) ? affine(row, input, biases[j])
                         : affine(row, std::span<const S>(current), biases[j]);
        next.push_back(activate ? tanh(pre) : pre);
      }
      offset += static_cast<size_t>(fan_in) * fan_out + fan_out;
      current = std::move(next);
    }
    return current;
  }
};

}  // namespace hsmmattn

#endif  // HSMMATTN_MLP_HPP
