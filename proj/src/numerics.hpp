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

#ifndef HSMMATTN_NUMERICS_HPP
#define HSMMATTN_NUMERICS_HPP

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "error.hpp"
#include "tape.hpp"

// Plain-double twins of the tape ops, so the HSMM and network code can be
// written once, generic over the scalar type: double for inference and
// oracles, Var for training.

namespace hsmmattn {

inline constexpr double kLogTwoPi = 1.8378770664093454836;
inline constexpr double kNegativeInfinity = -std::numeric_limits<double>::infinity();

inline double value_of(double x) { return x; }
inline double value_of(Var x) { return x.value(); }

// Max-shifted log(sum_i exp(v_i)). -inf entries are absorbed; the result is
// never below max(v) and never above max(v) + log(n). Empty input is a
// contract violation.
inline double log_sum_exp(std::span<const double> values) {
  require(!values.empty(), ErrorCode::kInvalidArgument, "log_sum_exp: empty input");
  double max_value = kNegativeInfinity;
  for (double v : values) max_value = std::max(max_value, v);
  if (max_value == kNegativeInfinity) return kNegativeInfinity;
  double total = 0.0;
  for (double v : values) total += std::exp(v - max_value);
  return max_value + std::log(total);
}

inline double sum(std::span<const double> values) {
  require(!values.empty(), ErrorCode::kInvalidArgument, "sum: empty input");
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (size_t i = 0; i < a.size(); ++i) total += a[i] * b[i];
  return total;
}

inline double affine(std::span<const double> w, std::span<const double> x, double b) {
  return dot(w, x) + b;
}

// Makes scalar constants inside code generic over the scalar type. The Var
// specialization needs to know which tape constants live on.
template <class S>
struct ScalarContext;

template <>
struct ScalarContext<double> {
  double make(double c) const { return c; }
};

template <>
struct ScalarContext<Var> {
  Tape* tape = nullptr;
  Var make(double c) const { return tape->constant(c); }
};

}  // namespace hsmmattn

#endif  // HSMMATTN_NUMERICS_HPP
