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

// Multimodal kernel diff-hash. Projections are linear combinations of kernel
// evaluations against a set of basis points per modality:
//
//   p_i(x) = alpha_i^T (k_X(x_1, x), ..., k_X(x_l, x))
//   q_i(y) = beta_i^T  (k_Y(y_1, y), ..., k_Y(y_l', y))
//
// alpha_i, beta_i are singular vectors of the l x l' matrix
//   K = (1/|N|) K_X^N (K_Y^N)^T - (gamma/|P|) K_X^P (K_Y^P)^T.
// Hash length is bounded by min(l, l') instead of min(n, n').

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mmhash/cmdif.hpp"
#include "mmhash/dataset.hpp"
#include "mmhash/numerics.hpp"

namespace mmhash {

/// Gaussian kernel over a diagonal Mahalanobis distance:
///   k(u, v) = exp(-sum_k (u_k - v_k)^2 / (diag_cov_k * bandwidth)).
/// bandwidth = 1 gives exp(-d^2) with d the Mahalanobis distance.
class KernelSpec {
 public:
  KernelSpec() = default;
  explicit KernelSpec(Vector diag_cov, double bandwidth = 1.0);

  const Vector& diag_cov() const { return diag_cov_; }
  double bandwidth() const { return bandwidth_; }
  std::size_t dim() const { return static_cast<std::size_t>(diag_cov_.size()); }

  double operator()(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v) const;

 private:
  Vector diag_cov_;
  Vector weights_;  // 1 / (diag_cov * bandwidth)
  double bandwidth_ = 1.0;
};

double gaussian_kernel(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v,
                       const KernelSpec& spec);
double gaussian_kernel(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v,
                       const Vector& diag_cov);

struct BasisSelection {
  std::vector<std::size_t> indices_x;
  std::vector<std::size_t> indices_y;
  Matrix bases_x;  // n x l
  Matrix bases_y;  // n' x l'
};

/// Uniform sampling without replacement of l X-points and l' Y-points.
BasisSelection select_bases(const MultimodalDataset& dataset, std::size_t l, std::size_t l_prime,
                            std::uint64_t seed);

/// (i, j) = k(bases.col(i), points.col(j)).
Matrix kernel_matrix(const Matrix& bases, const Matrix& points, const KernelSpec& spec);

/// (1/|N|) KNX KNY^T - (gamma/|P|) KPX KPY^T, with |P| and |N| read off the
/// column counts.
Matrix kernel_difference(const Matrix& kpx, const Matrix& kpy, const Matrix& knx,
                         const Matrix& kny, double gamma);

/// The same matrix computed from per-point kernel columns and index pairs,
/// without materializing the per-pair kernel matrices. kx is l x |X|, ky is
/// l' x |Y|. Pairs are accumulated in order.
Matrix kernel_difference_from_pairs(const Matrix& kx, const Matrix& ky, const PairSample& pairs,
                                    double gamma);

struct KernelHashModel {
  Matrix bases_x;  // n x l
  Matrix bases_y;  // n' x l'
  Matrix a_coef;   // m x l, rows alpha_i
  Matrix b_coef;   // m x l', rows beta_i
  Vector a;        // thresholds, m
  Vector b;
  double gamma = 10.0;
  ProjectionMode mode = ProjectionMode::kMinTrace;
  KernelSpec kernel_x;
  KernelSpec kernel_y;

  std::size_t length() const { return static_cast<std::size_t>(a_coef.rows()); }
  std::size_t dim_x() const { return static_cast<std::size_t>(bases_x.rows()); }
  std::size_t dim_y() const { return static_cast<std::size_t>(bases_y.rows()); }
};

struct MmkdifOptions {
  std::size_t m = 25;
  double gamma = 10.0;
  ThresholdGrid grid;
  ProjectionMode mode = ProjectionMode::kMinTrace;
  RateEstimator estimator = RateEstimator::kMarginalProduct;
};

/// Full training pipeline. Pair indices refer to columns of dataset.x / dataset.y.
KernelHashModel train_mmkdif(const MultimodalDataset& dataset, const PairSample& pairs,
                             const Matrix& bases_x, const Matrix& bases_y,
                             const KernelSpec& kernel_x, const KernelSpec& kernel_y,
                             const MmkdifOptions& options);

}  // namespace mmhash
