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

#include "tape.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace hsmmattn {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Var Tape::raw_node(double value) {
  values_.push_back(value);
  grads_.push_back(0.0);
  edge_start_.push_back(static_cast<int64_t>(edge_parent_.size()));
  return Var(this, static_cast<int32_t>(values_.size()) - 1);
}

Var Tape::node1(double value, Var p, double partial) {
  assert(p.tape() == this);
  edge_parent_.push_back(p.index());
  edge_partial_.push_back(partial);
  return raw_node(value);
}

Var Tape::node2(double value, Var a, double pa, Var b, double pb) {
  assert(a.tape() == this && b.tape() == this);
  edge_parent_.push_back(a.index());
  edge_partial_.push_back(pa);
  edge_parent_.push_back(b.index());
  edge_partial_.push_back(pb);
  return raw_node(value);
}

void Tape::open_node() {
  // Edges stream directly; nothing to do until close_node records the range.
}

void Tape::add_edge(Var parent, double partial) {
  assert(parent.tape() == this);
  edge_parent_.push_back(parent.index());
  edge_partial_.push_back(partial);
}

Var Tape::close_node(double value) { return raw_node(value); }

void Tape::backward(Var root) {
  require(root.tape() == this, ErrorCode::kInvalidArgument, "backward: root is not on this tape");
  const int32_t count = root.index() + 1;
  adjoint_.assign(count, 0.0);
  adjoint_[root.index()] = 1.0;
  for (int32_t i = root.index(); i >= 0; --i) {
    const double g = adjoint_[i];
    if (g == 0.0) continue;
    const int64_t begin = edge_start_[i];
    const int64_t end = edge_start_[i + 1];
    for (int64_t e = begin; e < end; ++e) {
      adjoint_[edge_parent_[e]] += edge_partial_[e] * g;
    }
  }
  for (int32_t i = 0; i < count; ++i) grads_[i] += adjoint_[i];
}

void Tape::zero_grad() { std::fill(grads_.begin(), grads_.end(), 0.0); }

void Tape::reset() {
  values_.clear();
  grads_.clear();
  edge_parent_.clear();
  edge_partial_.clear();
  begin_nodes();
}

Var operator+(Var a, Var b) { return a.tape()->node2(a.value() + b.value(), a, 1.0, b, 1.0); }
Var operator+(Var a, double b) { return a.tape()->node1(a.value() + b, a, 1.0); }
Var operator+(double a, Var b) { return b + a; }

Var operator-(Var a, Var b) { return a.tape()->node2(a.value() - b.value(), a, 1.0, b, -1.0); }
Var operator-(Var a, double b) { return a.tape()->node1(a.value() - b, a, 1.0); }
Var operator-(double a, Var b) { return b.tape()->node1(a - b.value(), b, -1.0); }
Var operator-(Var a) { return a.tape()->node1(-a.value(), a, -1.0); }

Var operator*(Var a, Var b) { return a.tape()->node2(a.value() * b.value(), a, b.value(), b, a.value()); }
Var operator*(Var a, double b) { return a.tape()->node1(a.value() * b, a, b); }
Var operator*(double a, Var b) { return b * a; }

Var operator/(Var a, Var b) {
  const double bv = b.value();
  const double v = a.value() / bv;
  return a.tape()->node2(v, a, 1.0 / bv, b, -v / bv);
}
Var operator/(Var a, double b) { return a.tape()->node1(a.value() / b, a, 1.0 / b); }
Var operator/(double a, Var b) {
  const double bv = b.value();
  return b.tape()->node1(a / bv, b, -a / (bv * bv));
}

Var exp(Var x) {
  const double v = std::exp(x.value());
  return x.tape()->node1(v, x, v);
}

Var log(Var x) { return x.tape()->node1(std::log(x.value()), x, 1.0 / x.value()); }

Var tanh(Var x) {
  const double v = std::tanh(x.value());
  return x.tape()->node1(v, x, 1.0 - v * v);
}

Var sqrt(Var x) {
  const double v = std::sqrt(x.value());
  return x.tape()->node1(v, x, 0.5 / v);
}

Var max(Var x, double floor) {
  const bool above = x.value() > floor;
  return x.tape()->node1(above ? x.value() : floor, x, above ? 1.0 : 0.0);
}

Var log_sum_exp(std::span<const Var> values) {
  require(!values.empty(), ErrorCode::kInvalidArgument, "log_sum_exp: empty input");
  Tape* tape = values[0].tape();
  double max_value = kNegInf;
  for (const Var& v : values) max_value = std::max(max_value, v.value());
  if (max_value == kNegInf) return tape->constant(kNegInf);
  double total = 0.0;
  for (const Var& v : values) total += std::exp(v.value() - max_value);
  const double result = max_value + std::log(total);
  tape->open_node();
  for (const Var& v : values) tape->add_edge(v, std::exp(v.value() - result));
  return tape->close_node(result);
}

Var sum(std::span<const Var> values) {
  require(!values.empty(), ErrorCode::kInvalidArgument, "sum: empty input");
  Tape* tape = values[0].tape();
  double total = 0.0;
  tape->open_node();
  for (const Var& v : values) {
    total += v.value();
    tape->add_edge(v, 1.0);
  }
  return tape->close_node(total);
}

Var dot(std::span<const Var> a, std::span<const Var> b) {
  assert(a.size() == b.size() && !a.empty());
  Tape* tape = a[0].tape();
  double total = 0.0;
  tape->open_node();
  for (size_t i = 0; i < a.size(); ++i) {
    total += a[i].value() * b[i].value();
    tape->add_edge(a[i], b[i].value());
    tape->add_edge(b[i], a[i].value());
  }
  return tape->close_node(total);
}

Var dot(std::span<const Var> a, std::span<const double> b) {
  assert(a.size() == b.size() && !a.empty());
  Tape* tape = a[0].tape();
  double total = 0.0;
  tape->open_node();
  for (size_t i = 0; i < a.size(); ++i) {
    total += a[i].value() * b[i];
    tape->add_edge(a[i], b[i]);
  }
  return tape->close_node(total);
}

Var affine(std::span<const Var> w, std::span<const Var> x, Var b) {
  assert(w.size() == x.size());
  Tape* tape = b.tape();
  double total = b.value();
  tape->open_node();
  for (size_t i = 0; i < w.size(); ++i) {
    total += w[i].value() * x[i].value();
    tape->add_edge(w[i], x[i].value());
    tape->add_edge(x[i], w[i].value());
  }
  tape->add_edge(b, 1.0);
  return tape->close_node(total);
}

Var affine(std::span<const Var> w, std::span<const double> x, Var b) {
  assert(w.size() == x.size());
  Tape* tape = b.tape();
  double total = b.value();
  tape->open_node();
  for (size_t i = 0; i < w.size(); ++i) {
    total += w[i].value() * x[i];
    tape->add_edge(w[i], x[i]);
  }
  tape->add_edge(b, 1.0);
  return tape->close_node(total);
}

}  // namespace hsmmattn
