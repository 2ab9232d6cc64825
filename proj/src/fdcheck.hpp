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

#ifndef HSMMATTN_FDCHECK_HPP
#define HSMMATTN_FDCHECK_HPP

#include <functional>
#include <span>
#include <vector>

#include "tape.hpp"

namespace hsmmattn {

// Builds the scalar under test as a graph over leaves created from the
// parameter vector; used both to read the value and to run backward.
using GraphBuilder = std::function<Var(Tape&, std::span<const Var>)>;

// Optional fast value-only evaluation (no tape). When absent, perturbed
// points are evaluated through the graph builder.
using ValueFunction = std::function<double(std::span<const double>)>;

struct FdCheckReport {
  double max_rel_error = 0.0;
  size_t worst_coordinate = 0;
  std::vector<double> analytic;
  std::vector<double> numeric;
};

// Central-difference gradient check: returns
//   max_i |g_ad_i - g_fd_i| / max(1e-8, |g_fd_i|)
// with g_fd_i = (f(x + eps e_i) - f(x - eps e_i)) / (2 eps). Throws, naming
// the coordinate, if any evaluation is non-finite.
FdCheckReport finite_difference_check_report(const GraphBuilder& build,
                                             const ValueFunction& value_fn,
                                             std::span<const double> point, double epsilon);

double finite_difference_check(const GraphBuilder& build, std::span<const double> point,
                               double epsilon);

}  // namespace hsmmattn

#endif  // HSMMATTN_FDCHECK_HPP
