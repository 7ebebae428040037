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

// Cross-modality diff-hash: linear projections from the SVD of the
// negative-minus-weighted-positive cross-covariance, followed by
// per-dimension threshold search.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mmhash/dataset.hpp"
#include "mmhash/numerics.hpp"

namespace mmhash {

/// Which singular pairs become hash projections.
///
/// kPaperLiteral takes the m smallest pairs (p_i = u_{n-i+1}, q_i = v_{n'-i+1}).
/// kMinTrace takes the m largest pairs with q_i = -v_i, which attains the
/// minimum of tr(P S Q^T) over row-orthonormal P, Q: -(s_1 + ... + s_m).
enum class ProjectionMode { kPaperLiteral, kMinTrace };

std::string_view to_string(ProjectionMode mode);
ProjectionMode parse_projection_mode(std::string_view text);

/// Candidate thresholds are the negated empirical quantiles of the pooled
/// (positive and negative) projections, at probabilities k / (levels - 1).
struct ThresholdGrid {
  std::size_t levels = 64;

  /// Strictly increasing candidate list; a single entry when all samples coincide.
  std::vector<double> candidates(std::vector<double> pooled) const;

  /// Position in a sorted list of `count` samples of the k-th quantile.
  std::size_t quantile_index(std::size_t k, std::size_t count) const;
};

/// One hash dimension's projections on the training pairs.
struct ProjectionSamples {
  std::vector<double> x_pos;
  std::vector<double> y_pos;
  std::vector<double> x_neg;
  std::vector<double> y_neg;
};

struct ProjectionCdfs {
  EmpiricalCdf x_pos;
  EmpiricalCdf y_pos;
  EmpiricalCdf x_neg;
  EmpiricalCdf y_neg;

  explicit ProjectionCdfs(const ProjectionSamples& s);
};

struct FalseRates {
  double fn = 0.0;
  double fp = 0.0;
};

/// Product-of-marginals estimates of one dimension's false negative and false
/// positive rates at thresholds (a, b). A bit is -1 iff projection + threshold < 0.
FalseRates false_rates(const ProjectionCdfs& cdfs, double a, double b);

/// How FN / FP are estimated during threshold search.
///
/// kMarginalProduct multiplies per-modality marginal rates (the factorized
/// form above). kJointCounts counts sign disagreements over positive pairs
/// and sign agreements over negative pairs directly.
enum class RateEstimator { kMarginalProduct, kJointCounts };

std::string_view to_string(RateEstimator estimator);
RateEstimator parse_rate_estimator(std::string_view text);

/// Exact joint rates at one threshold pair, by direct counting.
FalseRates joint_false_rates(const ProjectionSamples& samples, double a, double b);

struct ThresholdChoice {
  double a = 0.0;
  double b = 0.0;
  double objective = 0.0;  // gamma * FN + FP at (a, b)
  FalseRates rates;
};

/// Exhaustive minimization of gamma * FN + FP over the candidate grids.
ThresholdChoice select_thresholds(const ProjectionSamples& samples, double gamma,
                                  const ThresholdGrid& grid,
                                  RateEstimator estimator = RateEstimator::kMarginalProduct);

/// Same, with explicit strictly increasing candidate lists.
ThresholdChoice select_thresholds(const ProjectionSamples& samples, double gamma,
                                  std::span<const double> a_candidates,
                                  std::span<const double> b_candidates,
                                  RateEstimator estimator = RateEstimator::kMarginalProduct);

/// Sigma_N - gamma * Sigma_P over the given pairs of columns of xs, ys.
Matrix covariance_difference(const Matrix& xs, const Matrix& ys,
                             std::span<const IndexPair> positives,
                             std::span<const IndexPair> negatives, double gamma,
                             bool center = false);

/// Explicit-vector overload.
Matrix covariance_difference(std::span<const std::pair<Vector, Vector>> positives,
                             std::span<const std::pair<Vector, Vector>> negatives, double gamma);

/// Row-orthonormal (P, Q) of m rows each from the SVD of `sigma_d`.
std::pair<Matrix, Matrix> train_projections(const Matrix& sigma_d, std::size_t m,
                                            ProjectionMode mode);

struct LinearHashModel {
  Matrix p;   // m x n
  Matrix q;   // m x n'
  Vector a;   // m
  Vector b;   // m
  double gamma = 10.0;
  ProjectionMode mode = ProjectionMode::kMinTrace;

  std::size_t length() const { return static_cast<std::size_t>(p.rows()); }
  std::size_t dim_x() const { return static_cast<std::size_t>(p.cols()); }
  std::size_t dim_y() const { return static_cast<std::size_t>(q.cols()); }
};

struct CmdifOptions {
  std::size_t m = 25;
  double gamma = 10.0;
  ThresholdGrid grid;
  ProjectionMode mode = ProjectionMode::kMinTrace;
  RateEstimator estimator = RateEstimator::kMarginalProduct;
  bool center = false;
};

/// Full training pipeline. Pair indices refer to columns of dataset.x / dataset.y.
LinearHashModel train_cmdif(const MultimodalDataset& dataset, const PairSample& pairs,
                            const CmdifOptions& options);

/// Collects per-dimension projection samples from projected point matrices
/// (rows = hash dimensions, columns = points). Shared with the kernel trainer.
ProjectionSamples gather_projection_samples(const Matrix& proj_x, const Matrix& proj_y,
                                            const PairSample& pairs, Eigen::Index dim);

/// How often each point occurs as an endpoint of a positive / negative pair.
struct PairMultiplicity {
  std::vector<std::size_t> x_pos, x_neg;  // one entry per X point
  std::vector<std::size_t> y_pos, y_neg;  // one entry per Y point
  std::size_t num_pos = 0;
  std::size_t num_neg = 0;
};

PairMultiplicity count_pair_endpoints(const PairSample& pairs, std::size_t size_x,
                                      std::size_t size_y);

/// Marginal-estimator threshold search for hash dimension `dim`, computed from
/// the per-point projections and endpoint multiplicities. Returns exactly what
/// select_thresholds(gather_projection_samples(...), gamma, grid) returns, but
/// sorts |X| + |Y| values instead of the 2 (|P| + |N|) pair samples.
ThresholdChoice select_thresholds_counted(const Matrix& proj_x, const Matrix& proj_y,
                                          const PairMultiplicity& counts, Eigen::Index dim,
                                          double gamma, const ThresholdGrid& grid);

}  // namespace mmhash
