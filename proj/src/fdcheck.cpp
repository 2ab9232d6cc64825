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

#include "fdcheck.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace hsmmattn {

namespace {

double evaluate_via_tape(const GraphBuilder& build, std::span<const double> point) {
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(point.size());
  for (double x : point) leaves.push_back(tape.leaf(x));
  return build(tape, leaves).value();
}

}  // namespace

FdCheckReport finite_difference_check_report(const GraphBuilder& build,
                                             const ValueFunction& value_fn,
                                             std::span<const double> point, double epsilon) {
  require(epsilon > 0.0, ErrorCode::kInvalidArgument, "finite_difference_check: epsilon must be positive");

  // Analytic gradient via one backward pass.
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(point.size());
  for (double x : point) leaves.push_back(tape.leaf(x));
  Var root = build(tape, leaves);
  require(std::isfinite(root.value()), ErrorCode::kInvalidArgument,
          "finite_difference_check: non-finite value at the base point");
  tape.zero_grad();
  tape.backward(root);

  FdCheckReport report;
  report.analytic.reserve(point.size());
  for (const Var& v : leaves) report.analytic.push_back(v.grad());

  auto evaluate = [&](std::span<const double> x) {
    return value_fn ? value_fn(x) : evaluate_via_tape(build, x);
  };

  std::vector<double> shifted(point.begin(), point.end());
  report.numeric.resize(point.size());
  for (size_t i = 0; i < point.size(); ++i) {
    const double x0 = shifted[i];
    shifted[i] = x0 + epsilon;
    const double f_plus = evaluate(shifted);
    shifted[i] = x0 - epsilon;
    const double f_minus = evaluate(shifted);
    shifted[i] = x0;
    if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
      throw_error(ErrorCode::kInvalidArgument,
                  "finite_difference_check: non-finite evaluation at coordinate " + std::to_string(i));
    }
    report.numeric[i] = (f_plus - f_minus) / (2.0 * epsilon);
    const double denom = std::max(1e-8, std::abs(report.numeric[i]));
    const double rel = std::abs(report.analytic[i] - report.numeric[i]) / denom;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_coordinate = i;
    }
  }
  return report;
}

double finite_difference_check(const GraphBuilder& build, std::span<const double> point,
                               double epsilon) {
  return finite_difference_check_report(build, nullptr, point, epsilon).max_rel_error;
}

}  // namespace hsmmattn
