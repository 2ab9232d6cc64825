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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "error.hpp"
#include "fdcheck.hpp"
#include "gaussian.hpp"
#include "helpers.hpp"
#include "numerics.hpp"
#include "tape.hpp"

using namespace hsmmattn;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("log_sum_exp basic values") {
  std::vector<double> one{0.0};
  CHECK(log_sum_exp(one) == 0.0);

  std::vector<double> two{0.0, 0.0};
  CHECK(std::abs(log_sum_exp(two) - 0.6931471805599453) < 1e-12);

  std::vector<double> with_zero_prob{-kInf, 5.0};
  CHECK(log_sum_exp(with_zero_prob) == 5.0);

  std::vector<double> all_zero_prob{-kInf, -kInf};
  CHECK(log_sum_exp(all_zero_prob) == -kInf);

  // Magnitudes where exp() alone would overflow must not overflow here.
  std::vector<double> large{700.0, 700.0};
  CHECK(std::abs(log_sum_exp(large) - (700.0 + 0.6931471805599453)) < 1e-9);
  std::vector<double> huge{1e300, 1e300};
  CHECK(std::isfinite(log_sum_exp(huge)));
  CHECK(log_sum_exp(huge) >= 1e300);

  std::vector<double> empty;
  CHECK_THROWS_AS((void)log_sum_exp(empty), Error);
}

TEST_CASE("log_sum_exp bounds and permutation invariance") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto values = testing::random_vector(rng, 1 + trial % 9, -50.0, 50.0);
    const double lse = log_sum_exp(values);
    const double max_value = *std::max_element(values.begin(), values.end());
    CHECK(lse >= max_value);
    CHECK(lse <= max_value + std::log(static_cast<double>(values.size())) + 1e-12);

    auto shuffled = values;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(std::abs(log_sum_exp(shuffled) - lse) < 1e-12);
  }
}

TEST_CASE("gaussian_log_density reference values") {
  Gaussian<double> unit{0.0, 0.0};
  CHECK(std::abs(gaussian_log_density(0.0, unit, 1e-4) - (-0.9189385332046727)) < 1e-12);
  CHECK(std::abs(gaussian_log_density(1.0, unit, 1e-4) - (-1.4189385332046727)) < 1e-12);

  Gaussian<double> g{0.7, -0.3};
  for (double delta : {0.1, 0.5, 2.0, 7.3}) {
    CHECK(gaussian_log_density(g.mean + delta, g, 1e-4) ==
          gaussian_log_density(g.mean - delta, g, 1e-4));
  }

  CHECK_THROWS_AS((void)gaussian_log_density(std::nan(""), unit, 1e-4), Error);
  CHECK_THROWS_AS((void)gaussian_log_density(kInf, unit, 1e-4), Error);
}

TEST_CASE("gaussian_log_density variance floor") {
  Gaussian<double> tiny{0.0, -100.0};  // exp(-100) far below the floor
  const double floor = 1e-4;
  const double expected = -0.5 * (kLogTwoPi + std::log(floor));
  CHECK(std::abs(gaussian_log_density(0.0, tiny, floor) - expected) < 1e-12);
}

TEST_CASE("gaussian density integrates to one") {
  // Trapezoidal quadrature over mean +/- 8 sigma.
  for (auto [mean, log_var] : std::vector<std::pair<double, double>>{
           {0.0, 0.0}, {3.0, 1.2}, {-1.5, -2.0}}) {
    Gaussian<double> g{mean, log_var};
    const double sigma = std::sqrt(std::exp(log_var));
    const int n = 4000;
    const double lo = mean - 8 * sigma, hi = mean + 8 * sigma;
    const double h = (hi - lo) / n;
    double integral = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 0.5 : 1.0;
      integral += w * std::exp(gaussian_log_density(lo + i * h, g, 1e-8));
    }
    integral *= h;
    CHECK(std::abs(integral - 1.0) < 1e-3);
  }
}

TEST_CASE("backward on x squared") {
  Tape tape;
  Var x = tape.leaf(3.0);
  Var y = x * x;
  tape.backward(y);
  CHECK(x.grad() == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("backward through log_sum_exp gives softmax") {
  Tape tape;
  std::vector<Var> v{tape.leaf(0.3), tape.leaf(-1.2), tape.leaf(2.0)};
  Var lse = log_sum_exp(std::span<const Var>(v));
  tape.backward(lse);

  double denom = 0.0;
  for (const Var& x : v) denom += std::exp(x.value());
  for (const Var& x : v) {
    CHECK(std::abs(x.grad() - std::exp(x.value()) / denom) < 1e-12);
  }
}

TEST_CASE("repeated backward accumulates gradients") {
  Tape tape;
  Var x = tape.leaf(2.0);
  Var y = x * x;
  tape.backward(y);
  CHECK(x.grad() == doctest::Approx(4.0));
  tape.backward(y);  // no zero_grad in between: accumulates
  CHECK(x.grad() == doctest::Approx(8.0));
  tape.zero_grad();
  tape.backward(y);
  CHECK(x.grad() == doctest::Approx(4.0));
}

TEST_CASE("tape reset reuses storage") {
  Tape tape;
  Var a = tape.leaf(1.0);
  Var b = a + 2.0;
  CHECK(b.value() == 3.0);
  tape.reset();
  CHECK(tape.size() == 0);
  Var c = tape.leaf(5.0);
  Var d = c * c;
  tape.backward(d);
  CHECK(c.grad() == doctest::Approx(10.0));
}

TEST_CASE("mixed operator gradients") {
  Tape tape;
  Var a = tape.leaf(1.4);
  Var b = tape.leaf(-0.6);
  Var y = (2.0 * a - b / 3.0) * tanh(a * b) + exp(b) / (1.0 + a * a) - sqrt(max(a, 0.1));
  tape.backward(y);
  CHECK(std::isfinite(y.value()));
  CHECK(std::isfinite(a.grad()));
  CHECK(std::isfinite(b.grad()));

  // Same expression as a plain function, for a spot finite-difference check.
  auto f = [](std::span<const double> x) {
    const double av = x[0], bv = x[1];
    return (2.0 * av - bv / 3.0) * std::tanh(av * bv) + std::exp(bv) / (1.0 + av * av) -
           std::sqrt(std::max(av, 0.1));
  };
  const double eps = 1e-6;
  std::vector<double> p{1.4, -0.6};
  for (int i = 0; i < 2; ++i) {
    auto plus = p, minus = p;
    plus[i] += eps;
    minus[i] -= eps;
    const double fd = (f(plus) - f(minus)) / (2 * eps);
    const double ad = (i == 0) ? a.grad() : b.grad();
    CHECK(std::abs(ad - fd) < 1e-6);
  }
}

namespace {

// Deterministic random expression graph over smooth ops. The same seed
// rebuilds the same graph, so it can be re-evaluated at shifted points.
GraphBuilder make_random_graph(uint64_t seed, int num_inputs) {
  return [seed, num_inputs](Tape& tape, std::span<const Var> leaves) -> Var {
    (void)tape;
    std::mt19937_64 rng(seed);
    std::vector<Var> pool(leaves.begin(), leaves.end());
    std::uniform_int_distribution<int> op_dist(0, 7);
    const int num_ops = 10 + static_cast<int>(seed % 23);
    for (int i = 0; i < num_ops; ++i) {
      std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
      Var a = pool[pick(rng)];
      Var b = pool[pick(rng)];
      switch (op_dist(rng)) {
        case 0: pool.push_back(a + b); break;
        case 1: pool.push_back(a - b); break;
        case 2: pool.push_back(tanh(a) * tanh(b)); break;
        case 3: pool.push_back(a / (2.5 + tanh(b))); break;
        case 4: pool.push_back(exp(tanh(a))); break;
        case 5: pool.push_back(log(3.0 + tanh(a) + tanh(b))); break;
        case 6: pool.push_back(sqrt(exp(tanh(a)) + 1.0)); break;
        default: {
          std::vector<Var> subset;
          for (int j = 0; j < 3; ++j) subset.push_back(tanh(pool[pick(rng)]));
          pool.push_back(log_sum_exp(std::span<const Var>(subset)));
          break;
        }
      }
    }
    std::vector<Var> tail(pool.end() - std::min<size_t>(pool.size(), 5), pool.end());
    return sum(std::span<const Var>(tail));
  };
}

}  // namespace

TEST_CASE("automatic gradients match finite differences on random graphs") {
  std::mt19937_64 rng(202);
  for (uint64_t seed = 0; seed < 120; ++seed) {
    const int num_inputs = 2 + static_cast<int>(seed % 5);
    auto point = testing::random_vector(rng, num_inputs, -2.0, 2.0);
    const double err = finite_difference_check(make_random_graph(seed, num_inputs), point, 1e-5);
    CAPTURE(seed);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("finite_difference_check on a quadratic") {
  GraphBuilder f = [](Tape&, std::span<const Var> x) {
    std::vector<Var> squares;
    squares.reserve(x.size());
    for (const Var& v : x) squares.push_back(v * v);
    return sum(std::span<const Var>(squares));
  };
  std::vector<double> point{0.5, -1.5, 2.0, 0.25};
  CHECK(finite_difference_check(f, point, 1e-5) < 1e-6);
}

TEST_CASE("finite_difference_check on gaussian_log_density parameters") {
  const double x = 0.8;
  GraphBuilder f = [x](Tape&, std::span<const Var> p) {
    Gaussian<Var> g{p[0], p[1]};
    return gaussian_log_density(x, g, 1e-4);
  };
  std::vector<double> point{0.2, -0.4};  // mean, log variance
  CHECK(finite_difference_check(f, point, 1e-5) < 1e-4);
}

TEST_CASE("finite_difference_check reports non-finite evaluations") {
  GraphBuilder f = [](Tape&, std::span<const Var> x) { return log(x[0]); };
  std::vector<double> point{1e-7};  // x - eps goes negative, log becomes NaN
  CHECK_THROWS_WITH_AS((void)finite_difference_check(f, point, 1e-5),
                       doctest::Contains("coordinate 0"), Error);
}

TEST_CASE("sum and dot as single nodes") {
  Tape tape;
  std::vector<Var> xs{tape.leaf(1.0), tape.leaf(2.0), tape.leaf(3.0)};
  Var s = sum(std::span<const Var>(xs));
  CHECK(s.value() == 6.0);

  std::vector<Var> ws{tape.leaf(0.5), tape.leaf(-1.0), tape.leaf(2.0)};
  Var d = dot(std::span<const Var>(ws), std::span<const Var>(xs));
  CHECK(d.value() == doctest::Approx(0.5 - 2.0 + 6.0));

  std::vector<double> data{1.0, 0.0, -1.0};
  Var b = tape.leaf(0.25);
  Var aff = affine(std::span<const Var>(ws), std::span<const double>(data), b);
  CHECK(aff.value() == doctest::Approx(0.5 - 2.0 + 0.25));

  tape.zero_grad();
  tape.backward(aff);
  CHECK(ws[0].grad() == doctest::Approx(1.0));
  CHECK(ws[1].grad() == doctest::Approx(0.0));
  CHECK(ws[2].grad() == doctest::Approx(-1.0));
  CHECK(b.grad() == doctest::Approx(1.0));
}
