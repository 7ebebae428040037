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

#include "mmhash/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace mmhash {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(std::string(what) + ": non-finite entry");
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw Error("Rng::below: zero bound");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % bound;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

Matrix cross_covariance(std::span<const std::pair<Vector, Vector>> pairs, bool center) {
  if (pairs.empty()) throw Error("cross_covariance: empty pair set");
  const auto n = pairs.front().first.size();
  const auto np = pairs.front().second.size();
  Vector mean_x = Vector::Zero(n);
  Vector mean_y = Vector::Zero(np);
  for (const auto& [x, y] : pairs) {
    if (x.size() != n || y.size() != np) throw Error("cross_covariance: dimension mismatch");
    if (center) {
      mean_x += x;
      mean_y += y;
    }
  }
  const double count = static_cast<double>(pairs.size());
  mean_x /= count;
  mean_y /= count;

  Matrix acc = Matrix::Zero(n, np);
  for (const auto& [x, y] : pairs) {
    if (center) {
      acc.noalias() += (x - mean_x) * (y - mean_y).transpose();
    } else {
      acc.noalias() += x * y.transpose();
    }
  }
  acc /= count;
  require_finite(acc, "cross_covariance");
  return acc;
}

Matrix cross_covariance(const Matrix& xs, const Matrix& ys,
                        std::span<const std::pair<std::size_t, std::size_t>> pairs,
                        bool center) {
  if (pairs.empty()) throw Error("cross_covariance: empty pair set");
  const auto n = xs.rows();
  const auto np = ys.rows();
  Vector mean_x = Vector::Zero(n);
  Vector mean_y = Vector::Zero(np);
  for (const auto& [i, j] : pairs) {
    if (i >= static_cast<std::size_t>(xs.cols()) || j >= static_cast<std::size_t>(ys.cols())) {
      throw Error("cross_covariance: pair index out of range");
    }
    if (center) {
      mean_x += xs.col(i);
      mean_y += ys.col(j);
    }
  }
  const double count = static_cast<double>(pairs.size());
  mean_x /= count;
  mean_y /= count;

  Matrix acc = Matrix::Zero(n, np);
  Vector x(n), y(np);
  for (const auto& [i, j] : pairs) {
    x = xs.col(i);
    y = ys.col(j);
    if (center) {
      x -= mean_x;
      y -= mean_y;
    }
    acc.noalias() += x * y.transpose();
  }
  acc /= count;
  require_finite(acc, "cross_covariance");
  return acc;
}

namespace {

// Index of the largest |entry|, first one on ties.
Eigen::Index dominant_index(const Eigen::Ref<const Vector>& v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double a = std::abs(v[k]);
    if (a > best_abs) {
      best_abs = a;
      best = k;
    }
  }
  return best;
}

}  // namespace

SvdResult svd(const Matrix& m) {
  if (m.size() == 0) throw Error("svd: empty matrix");
  require_finite(m, "svd");

  Eigen::BDCSVD<Matrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdResult out{solver.matrixU(), solver.singularValues(), solver.matrixV()};

  const Eigen::Index rank = out.singular_values.size();
  for (Eigen::Index i = 0; i < rank; ++i) {
    if (out.u(dominant_index(out.u.col(i)), i) < 0.0) {
      out.u.col(i) *= -1.0;
      out.v.col(i) *= -1.0;
    }
  }
  for (Eigen::Index i = rank; i < out.u.cols(); ++i) {
    if (out.u(dominant_index(out.u.col(i)), i) < 0.0) out.u.col(i) *= -1.0;
  }
  for (Eigen::Index i = rank; i < out.v.cols(); ++i) {
    if (out.v(dominant_index(out.v.col(i)), i) < 0.0) out.v.col(i) *= -1.0;
  }
  return out;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw Error("empirical_cdf: empty sample list");
  for (double s : sorted_) {
    if (!std::isfinite(s)) throw Error("empirical_cdf: non-finite sample");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double t) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::strictly_below(double t) const {
  const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), t);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

Matrix random_row_orthonormal(std::size_t m, std::size_t n, Rng& rng) {
  if (m > n) throw Error("random_row_orthonormal: m > n");
  Matrix g(n, m);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, m);
  // Fix column signs against R's diagonal so the draw is Haar distributed.
  const Matrix& r = qr.matrixQR();
  for (std::size_t k = 0; k < m; ++k) {
    if (r(k, k) < 0.0) q.col(k) *= -1.0;
  }
  return q.transpose();
}

}  // namespace mmhash
