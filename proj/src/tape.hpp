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

#ifndef HSMMATTN_TAPE_HPP
#define HSMMATTN_TAPE_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace hsmmattn {

class Tape;

// Handle to one scalar node on a Tape. Copyable, 16 bytes. A Var is only
// valid while its Tape is alive and has not been reset.
class Var {
 public:
  Var() : tape_(nullptr), index_(-1) {}
  Var(Tape* tape, int32_t index) : tape_(tape), index_(index) {}

  double value() const;
  double grad() const;
  bool valid() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  int32_t index() const { return index_; }

 private:
  Tape* tape_;
  int32_t index_;
};

// Reverse-mode scalar tape. Nodes are appended in evaluation order, so the
// node array is already a topological order of the computation graph; local
// partial derivatives are recorded at construction time (inputs are
// snapshotted, so partials are plain numbers). Single-threaded per tape.
class Tape {
 public:
  Tape() { begin_nodes(); }

  // Trainable input node (gradient is read back after backward()).
  Var leaf(double value) { return raw_node(value); }
  // Input node whose gradient nobody reads. Same representation as leaf;
  // the distinction is documentation at call sites.
  Var constant(double value) { return raw_node(value); }

  Var node1(double value, Var p, double partial);
  Var node2(double value, Var a, double pa, Var b, double pb);

  // Variadic node builder: call open_node, stream edges, close_node.
  void open_node();
  void add_edge(Var parent, double partial);
  Var close_node(double value);

  // Adds d(root)/d(node) to every node's grad field, traversing the graph
  // once in reverse topological order. Repeated calls without zero_grad()
  // accumulate, so gradients of several roots can be summed; each call
  // propagates through a scratch adjoint buffer and leaves earlier
  // accumulations untouched.
  void backward(Var root);

  void zero_grad();

  // Drops all nodes but keeps allocated capacity, so a tape can be rebuilt
  // cheaply inside a training loop. Outstanding Vars become invalid.
  void reset();

  int32_t size() const { return static_cast<int32_t>(values_.size()); }
  size_t num_edges() const { return edge_parent_.size(); }
  double value(int32_t index) const { return values_[index]; }
  double grad(int32_t index) const { return grads_[index]; }

 private:
  friend class Var;

  Var raw_node(double value);
  void begin_nodes() { edge_start_.assign(1, 0); }

  std::vector<double> values_;
  std::vector<double> grads_;
  std::vector<double> adjoint_;  // scratch for backward()
  // CSR layout: node i owns edges [edge_start_[i], edge_start_[i + 1]).
  std::vector<int64_t> edge_start_;
  std::vector<int32_t> edge_parent_;
  std::vector<double> edge_partial_;
};

inline double Var::value() const { return tape_->value(index_); }
inline double Var::grad() const { return tape_->grad(index_); }

// Arithmetic. Mixed Var/double overloads fold the constant into the node
// instead of materializing it.
Var operator+(Var a, Var b);
Var operator+(Var a, double b);
Var operator+(double a, Var b);
Var operator-(Var a, Var b);
Var operator-(Var a, double b);
Var operator-(double a, Var b);
Var operator-(Var a);
Var operator*(Var a, Var b);
Var operator*(Var a, double b);
Var operator*(double a, Var b);
Var operator/(Var a, Var b);
Var operator/(Var a, double b);
Var operator/(double a, Var b);

Var exp(Var x);
Var log(Var x);
Var tanh(Var x);
Var sqrt(Var x);
// max(x, floor): the floored branch has zero derivative.
Var max(Var x, double floor);

// log(sum_i exp(v_i)), max-shifted. Accepts -inf entries (log of zero); an
// all-(-inf) input yields -inf with no incoming edges. Throws on empty input.
Var log_sum_exp(std::span<const Var> values);

// Single n-ary accumulation node; fixes the reduction order.
Var sum(std::span<const Var> values);

// dot(a, b) = sum_i a_i * b_i as one node with 2n edges.
Var dot(std::span<const Var> a, std::span<const Var> b);
// Variant with a constant right-hand side (e.g. data vectors).
Var dot(std::span<const Var> a, std::span<const double> b);

// affine(w, x, b) = dot(w, x) + b.
Var affine(std::span<const Var> w, std::span<const Var> x, Var b);
Var affine(std::span<const Var> w, std::span<const double> x, Var b);

}  // namespace hsmmattn

#endif  // HSMMATTN_TAPE_HPP
