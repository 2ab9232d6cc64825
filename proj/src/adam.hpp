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

#ifndef HSMMATTN_ADAM_HPP
#define HSMMATTN_ADAM_HPP

#include <span>
#include <string>
#include <vector>

namespace hsmmattn {

struct AdamConfig {
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moment estimates for one parameter head.
struct AdamSlot {
  std::vector<double> m;
  std::vector<double> v;
};

// One bias-corrected Adam descent step on a single head. timestep is
// 1-based. Throws, naming the head, on a non-finite gradient.
void adam_step(const std::string& head, std::span<double> params, std::span<const double> grads,
               AdamSlot& slot, long timestep, const AdamConfig& config);

}  // namespace hsmmattn

#endif  // HSMMATTN_ADAM_HPP
