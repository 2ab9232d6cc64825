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

#include "adam.hpp"

#include <cmath>

#include "error.hpp"

namespace hsmmattn {

void adam_step(const std::string& head, std::span<double> params, std::span<const double> grads,
               AdamSlot& slot, long timestep, const AdamConfig& config) {
  require(params.size() == grads.size(), ErrorCode::kInvalidArgument,
          "adam_step: parameter/gradient size mismatch for " + head);
  require(timestep >= 1, ErrorCode::kInvalidArgument, "adam_step: timestep must be >= 1");
  if (slot.m.size() != params.size()) {
    slot.m.assign(params.size(), 0.0);
    slot.v.assign(params.size(), 0.0);
  }

  const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(timestep));
  const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(timestep));
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    require(std::isfinite(g), ErrorCode::kDiverged,
            "adam_step: non-finite gradient in " + head);
    slot.m[i] = config.beta1 * slot.m[i] + (1.0 - config.beta1) * g;
    slot.v[i] = config.beta2 * slot.v[i] + (1.0 - config.beta2) * g * g;
    const double m_hat = slot.m[i] / correction1;
    const double v_hat = slot.v[i] / correction2;
    params[i] -= config.step_size * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

}  // namespace hsmmattn
