/*
 * Copyright 2026 The mmhash Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mmhash {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library. Messages are single-line.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws Error if any entry of `m` is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

/// Seedable 64-bit generator used for every random draw in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The uniform and normal transforms are implemented here rather
/// than with <random> distributions, which are implementation-defined, so a
/// given seed produces the same numbers on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double low, double high) { return low + (high - low) * uniform(); }

  /// Uniform integer in [0, bound) by rejection, no modulo bias.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// (1/|pairs|) * sum x y^T, accumulated in pair order.
/// With `center` set, the sample means are subtracted first.
Matrix cross_covariance(std::span<const std::pair<Vector, Vector>> pairs, bool center = false);

/// Same as above, with pairs given as column indices into `xs` and `ys`.
Matrix cross_covariance(const Matrix& xs, const Matrix& ys,
                        std::span<const std::pair<std::size_t, std::size_t>> pairs,
                        bool center = false);

struct SvdResult {
  Matrix u;                 // rows x rows
  Vector singular_values;   // min(rows, cols), descending
  Matrix v;                 // cols x cols
};

/// Full SVD. Each pair (u_i, v_i) is sign-normalized so the largest-magnitude
/// entry of u_i (lowest index on ties) is positive. Columns of U and V beyond
/// the rank are sign-normalized on their own with the same rule.
SvdResult svd(const Matrix& m);

/// Right-continuous empirical CDF F(t) = #{samples <= t} / N.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples);

  double operator()(double t) const;
  /// #{samples < t} / N.
  double strictly_below(double t) const;

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

inline EmpiricalCdf empirical_cdf(std::vector<double> samples) {
  return EmpiricalCdf(std::move(samples));
}

struct GridMinimum {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  std::size_t a_index = 0;
  std::size_t b_index = 0;
};

/// Exhaustive minimization over a_grid x b_grid. Ties go to the smallest
/// a index, then the smallest b index.
template <typename Objective>
GridMinimum grid_minimize_2d(Objective&& objective, std::span<const double> a_grid,
                             std::span<const double> b_grid) {
  if (a_grid.empty() || b_grid.empty()) throw Error("grid_minimize_2d: empty grid");
  GridMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  bool first = true;
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    for (std::size_t j = 0; j < b_grid.size(); ++j) {
      const double value = objective(a_grid[i], b_grid[j]);
      if (first || value < best.value) {
        best = {a_grid[i], b_grid[j], value, i, j};
        first = false;
      }
    }
  }
  return best;
}

/// m x n matrix with orthonormal rows, drawn from the Haar measure. Requires m <= n.
Matrix random_row_orthonormal(std::size_t m, std::size_t n, Rng& rng);

}  // namespace mmhash
