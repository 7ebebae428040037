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

#include "mmhash/mmkdif.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmhash {

KernelSpec::KernelSpec(Vector diag_cov, double bandwidth)
    : diag_cov_(std::move(diag_cov)), bandwidth_(bandwidth) {
  if (diag_cov_.size() == 0) throw Error("kernel: empty covariance vector");
  if (!diag_cov_.allFinite() || (diag_cov_.array() <= 0.0).any()) {
    throw Error("kernel: covariance entries must be finite and > 0");
  }
  if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) throw Error("kernel: bandwidth must be > 0");
  weights_ = (diag_cov_.array() * bandwidth_).inverse().matrix();
}

double KernelSpec::operator()(const Eigen::Ref<const Vector>& u,
                              const Eigen::Ref<const Vector>& v) const {
  if (u.size() != diag_cov_.size() || v.size() != diag_cov_.size()) {
    throw Error("kernel: dimension mismatch (" + std::to_string(u.size()) + ", " +
                std::to_string(v.size()) + ") vs covariance " + std::to_string(diag_cov_.size()));
  }
  double d2 = 0.0;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double diff = u[k] - v[k];
    d2 += diff * diff * weights_[k];
  }
  return std::exp(-d2);
}

double gaussian_kernel(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v,
                       const KernelSpec& spec) {
  return spec(u, v);
}

double gaussian_kernel(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v,
                       const Vector& diag_cov) {
  return KernelSpec(diag_cov)(u, v);
}

namespace {

std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count,
                                                    Rng& rng) {
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(population - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

Matrix gather_columns(const Matrix& points, const std::vector<std::size_t>& idx) {
  Matrix out(points.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = points.col(static_cast<Eigen::Index>(idx[k]));
  }
  return out;
}

}  // namespace

BasisSelection select_bases(const MultimodalDataset& dataset, std::size_t l, std::size_t l_prime,
                            std::uint64_t seed) {
  if (l == 0 || l_prime == 0) throw Error("select_bases: basis sizes must be >= 1");
  if (l > dataset.size_x()) {
    throw Error("select_bases: l = " + std::to_string(l) + " exceeds the " +
                std::to_string(dataset.size_x()) + " available X points");
  }
  if (l_prime > dataset.size_y()) {
    throw Error("select_bases: l' = " + std::to_string(l_prime) + " exceeds the " +
                std::to_string(dataset.size_y()) + " available Y points");
  }
  Rng rng(seed);
  BasisSelection out;
  out.indices_x = sample_without_replacement(dataset.size_x(), l, rng);
  out.indices_y = sample_without_replacement(dataset.size_y(), l_prime, rng);
  out.bases_x = gather_columns(dataset.x, out.indices_x);
  out.bases_y = gather_columns(dataset.y, out.indices_y);
  return out;
}

Matrix kernel_matrix(const Matrix& bases, const Matrix& points, const KernelSpec& spec) {
  if (static_cast<std::size_t>(bases.rows()) != spec.dim() ||
      static_cast<std::size_t>(points.rows()) != spec.dim()) {
    throw Error("kernel_matrix: dimension mismatch");
  }
  Matrix k(bases.cols(), points.cols());
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    for (Eigen::Index i = 0; i < bases.cols(); ++i) k(i, j) = spec(bases.col(i), points.col(j));
  }
  return k;
}

Matrix kernel_difference(const Matrix& kpx, const Matrix& kpy, const Matrix& knx,
                         const Matrix& kny, double gamma) {
  if (kpx.cols() != kpy.cols() || knx.cols() != kny.cols()) {
    throw Error("kernel_difference: pair counts differ between modalities");
  }
  if (kpx.rows() != knx.rows() || kpy.rows() != kny.rows()) {
    throw Error("kernel_difference: basis counts differ between pair sets");
  }
  if (kpx.cols() == 0 || knx.cols() == 0) throw Error("kernel_difference: empty pair set");
  const double wn = 1.0 / static_cast<double>(knx.cols());
  const double wp = gamma / static_cast<double>(kpx.cols());
  Matrix out = wn * (knx * kny.transpose());
  out.noalias() -= wp * (kpx * kpy.transpose());
  return out;
}

Matrix kernel_difference_from_pairs(const Matrix& kx, const Matrix& ky, const PairSample& pairs,
                                    double gamma) {
  if (pairs.positives.empty() || pairs.negatives.empty()) {
    throw Error("kernel_difference: empty pair set");
  }
  // sum over pairs of kx(:, i) ky(:, j)^T = (sum over pairs of kx(:, i) e_j^T) ky^T
  const double wn = 1.0 / static_cast<double>(pairs.negatives.size());
  const double wp = gamma / static_cast<double>(pairs.positives.size());
  Matrix zn = Matrix::Zero(kx.rows(), ky.cols());
  Matrix zp = Matrix::Zero(kx.rows(), ky.cols());
  const auto check = [&](const IndexPair& pr) {
    if (pr.first >= static_cast<std::size_t>(kx.cols()) ||
        pr.second >= static_cast<std::size_t>(ky.cols())) {
      throw Error("kernel_difference: pair index out of range");
    }
  };
  for (const auto& pr : pairs.negatives) {
    check(pr);
    zn.col(static_cast<Eigen::Index>(pr.second)) += kx.col(static_cast<Eigen::Index>(pr.first));
  }
  for (const auto& pr : pairs.positives) {
    check(pr);
    zp.col(static_cast<Eigen::Index>(pr.second)) += kx.col(static_cast<Eigen::Index>(pr.first));
  }
  const Matrix z = wn * zn - wp * zp;
  return z * ky.transpose();
}

KernelHashModel train_mmkdif(const MultimodalDataset& dataset, const PairSample& pairs,
                             const Matrix& bases_x, const Matrix& bases_y,
                             const KernelSpec& kernel_x, const KernelSpec& kernel_y,
                             const MmkdifOptions& options) {
  const auto l = static_cast<std::size_t>(bases_x.cols());
  const auto lp = static_cast<std::size_t>(bases_y.cols());
  if (options.m == 0) throw Error("hash length m must be >= 1");
  if (options.m > std::min(l, lp)) {
    throw Error("hash length m = " + std::to_string(options.m) +
                " exceeds the number of the basis vectors min(l, l') = " +
                std::to_string(std::min(l, lp)));
  }
  if (!(options.gamma > 0.0)) throw Error("train_mmkdif: gamma must be > 0");
  if (pairs.positives.empty() || pairs.negatives.empty()) throw Error("train_mmkdif: empty pair set");

  const Matrix kx = kernel_matrix(bases_x, dataset.x, kernel_x);
  const Matrix ky = kernel_matrix(bases_y, dataset.y, kernel_y);
  const Matrix kdiff = kernel_difference_from_pairs(kx, ky, pairs, options.gamma);

  // Same singular-pair selection as the linear trainer, in coefficient space.
  auto [a_coef, b_coef] = train_projections(kdiff, options.m, options.mode);

  KernelHashModel model;
  model.gamma = options.gamma;
  model.mode = options.mode;
  model.kernel_x = kernel_x;
  model.kernel_y = kernel_y;
  model.a.resize(static_cast<Eigen::Index>(options.m));
  model.b.resize(static_cast<Eigen::Index>(options.m));

  Matrix proj_x(a_coef.rows(), kx.cols());
  Matrix proj_y(b_coef.rows(), ky.cols());
  for (Eigen::Index i = 0; i < a_coef.rows(); ++i) {
    proj_x.row(i).noalias() = a_coef.row(i) * kx;
    proj_y.row(i).noalias() = b_coef.row(i) * ky;
  }
  const auto counts = count_pair_endpoints(pairs, dataset.size_x(), dataset.size_y());
  for (Eigen::Index i = 0; i < a_coef.rows(); ++i) {
    const auto choice =
        options.estimator == RateEstimator::kMarginalProduct
            ? select_thresholds_counted(proj_x, proj_y, counts, i, options.gamma, options.grid)
            : select_thresholds(gather_projection_samples(proj_x, proj_y, pairs, i), options.gamma,
                                options.grid, options.estimator);
    model.a[i] = choice.a;
    model.b[i] = choice.b;
  }
  model.bases_x = bases_x;
  model.bases_y = bases_y;
  model.a_coef = std::move(a_coef);
  model.b_coef = std::move(b_coef);
  return model;
}

}  // namespace mmhash
