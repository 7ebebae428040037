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

#include "mmhash/cmdif.hpp"

#include <algorithm>
#include <cmath>

namespace mmhash {

std::string_view to_string(ProjectionMode mode) {
  return mode == ProjectionMode::kPaperLiteral ? "paper-literal" : "min-trace";
}

ProjectionMode parse_projection_mode(std::string_view text) {
  if (text == "paper-literal") return ProjectionMode::kPaperLiteral;
  if (text == "min-trace") return ProjectionMode::kMinTrace;
  throw Error("unknown projection mode '" + std::string(text) + "'");
}

std::vector<double> ThresholdGrid::candidates(std::vector<double> pooled) const {
  if (levels < 2) throw Error("threshold grid: levels must be >= 2");
  if (pooled.empty()) throw Error("threshold grid: no samples");
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> out;
  out.reserve(levels);
  for (std::size_t k = 0; k < levels; ++k) out.push_back(-pooled[quantile_index(k, pooled.size())]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t ThresholdGrid::quantile_index(std::size_t k, std::size_t count) const {
  // round(k * (count - 1) / (levels - 1)) in integer arithmetic
  return (2 * k * (count - 1) + (levels - 1)) / (2 * (levels - 1));
}

namespace {

FalseRates combine_marginals(double fx_p, double fy_p, double fx_n, double fy_n) {
  return {fx_p * (1.0 - fy_p) + fy_p * (1.0 - fx_p), fx_n * fy_n + (1.0 - fx_n) * (1.0 - fy_n)};
}

}  // namespace

ProjectionCdfs::ProjectionCdfs(const ProjectionSamples& s)
    : x_pos(s.x_pos), y_pos(s.y_pos), x_neg(s.x_neg), y_neg(s.y_neg) {}

FalseRates false_rates(const ProjectionCdfs& cdfs, double a, double b) {
  const double fx_p = cdfs.x_pos.strictly_below(-a);
  const double fy_p = cdfs.y_pos.strictly_below(-b);
  const double fx_n = cdfs.x_neg.strictly_below(-a);
  const double fy_n = cdfs.y_neg.strictly_below(-b);
  return combine_marginals(fx_p, fy_p, fx_n, fy_n);
}

std::string_view to_string(RateEstimator estimator) {
  return estimator == RateEstimator::kMarginalProduct ? "marginal" : "joint";
}

RateEstimator parse_rate_estimator(std::string_view text) {
  if (text == "marginal") return RateEstimator::kMarginalProduct;
  if (text == "joint") return RateEstimator::kJointCounts;
  throw Error("unknown rate estimator '" + std::string(text) + "' (expected marginal or joint)");
}

FalseRates joint_false_rates(const ProjectionSamples& s, double a, double b) {
  if (s.x_pos.size() != s.y_pos.size() || s.x_neg.size() != s.y_neg.size()) {
    throw Error("joint_false_rates: unpaired samples");
  }
  if (s.x_pos.empty() || s.x_neg.empty()) throw Error("joint_false_rates: empty sample set");
  std::size_t disagree = 0, agree = 0;
  for (std::size_t k = 0; k < s.x_pos.size(); ++k) {
    disagree += (s.x_pos[k] + a < 0.0) != (s.y_pos[k] + b < 0.0);
  }
  for (std::size_t k = 0; k < s.x_neg.size(); ++k) {
    agree += (s.x_neg[k] + a < 0.0) == (s.y_neg[k] + b < 0.0);
  }
  return {static_cast<double>(disagree) / static_cast<double>(s.x_pos.size()),
          static_cast<double>(agree) / static_cast<double>(s.x_neg.size())};
}

namespace {

void require_increasing(std::span<const double> grid) {
  if (grid.empty()) throw Error("select_thresholds: empty candidate list");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k - 1] < grid[k])) throw Error("select_thresholds: candidates must be strictly increasing");
  }
}

// Agreement counts of sign(x + a_i) and sign(y + b_j) over paired samples, for
// every grid cell, from a 2-D histogram of ranks. With candidates ascending,
// the bit for x is -1 at a_i iff i < rank(x) = #{k : a_k < -x}.
class AgreementTable {
 public:
  AgreementTable(std::span<const double> xs, std::span<const double> ys,
                 std::span<const double> a_grid, std::span<const double> b_grid)
      : na_(a_grid.size()), nb_(b_grid.size()), total_(xs.size()),
        below_(((na_ + 1) * (nb_ + 1)), 0), row_(na_ + 1, 0), col_(nb_ + 1, 0) {
    std::vector<std::size_t> hist((na_ + 1) * (nb_ + 1), 0);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const auto rx = rank(a_grid, xs[k]);
      const auto ry = rank(b_grid, ys[k]);
      ++hist[rx * (nb_ + 1) + ry];
      ++row_[rx];
      ++col_[ry];
    }
    // below_(i, j) = #{rx <= i, ry <= j}
    for (std::size_t i = 0; i <= na_; ++i) {
      std::size_t run = 0;
      for (std::size_t j = 0; j <= nb_; ++j) {
        run += hist[i * (nb_ + 1) + j];
        below_[i * (nb_ + 1) + j] = run + (i ? below_[(i - 1) * (nb_ + 1) + j] : 0);
      }
    }
    for (std::size_t i = 1; i <= na_; ++i) row_[i] += row_[i - 1];
    for (std::size_t j = 1; j <= nb_; ++j) col_[j] += col_[j - 1];
  }

  // Number of pairs whose two bits agree at (a_i, b_j).
  std::size_t agree(std::size_t i, std::size_t j) const {
    const std::size_t both_pos = below_[i * (nb_ + 1) + j];  // rx <= i and ry <= j
    const std::size_t both_neg = total_ - row_[i] - col_[j] + both_pos;
    return both_pos + both_neg;
  }

  std::size_t total() const { return total_; }

 private:
  static std::size_t rank(std::span<const double> grid, double v) {
    return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), -v) - grid.begin());
  }

  std::size_t na_, nb_, total_;
  std::vector<std::size_t> below_;
  std::vector<std::size_t> row_, col_;
};

}  // namespace

ThresholdChoice select_thresholds(const ProjectionSamples& samples, double gamma,
                                  std::span<const double> a_candidates,
                                  std::span<const double> b_candidates, RateEstimator estimator) {
  require_increasing(a_candidates);
  require_increasing(b_candidates);
  if (estimator == RateEstimator::kMarginalProduct) {
    const ProjectionCdfs cdfs(samples);
    const auto best = grid_minimize_2d(
        [&](double a, double b) {
          const auto r = false_rates(cdfs, a, b);
          return gamma * r.fn + r.fp;
        },
        a_candidates, b_candidates);
    return {best.a, best.b, best.value, false_rates(cdfs, best.a, best.b)};
  }

  if (samples.x_pos.size() != samples.y_pos.size() || samples.x_neg.size() != samples.y_neg.size()) {
    throw Error("select_thresholds: joint estimator needs paired samples");
  }
  if (samples.x_pos.empty() || samples.x_neg.empty()) throw Error("select_thresholds: empty sample set");
  const AgreementTable pos(samples.x_pos, samples.y_pos, a_candidates, b_candidates);
  const AgreementTable neg(samples.x_neg, samples.y_neg, a_candidates, b_candidates);
  const auto np = static_cast<double>(pos.total());
  const auto nn = static_cast<double>(neg.total());
  // grid_minimize_2d hands back values; map them to indices for the table.
  const auto index_of = [](std::span<const double> grid, double v) {
    return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), v) - grid.begin());
  };
  const auto rates_at = [&](std::size_t i, std::size_t j) {
    return FalseRates{static_cast<double>(pos.total() - pos.agree(i, j)) / np,
                      static_cast<double>(neg.agree(i, j)) / nn};
  };
  const auto best = grid_minimize_2d(
      [&](double a, double b) {
        const auto r = rates_at(index_of(a_candidates, a), index_of(b_candidates, b));
        return gamma * r.fn + r.fp;
      },
      a_candidates, b_candidates);
  return {best.a, best.b, best.value, rates_at(best.a_index, best.b_index)};
}

ThresholdChoice select_thresholds(const ProjectionSamples& samples, double gamma,
                                  const ThresholdGrid& grid, RateEstimator estimator) {
  std::vector<double> pooled_x = samples.x_pos;
  pooled_x.insert(pooled_x.end(), samples.x_neg.begin(), samples.x_neg.end());
  std::vector<double> pooled_y = samples.y_pos;
  pooled_y.insert(pooled_y.end(), samples.y_neg.begin(), samples.y_neg.end());
  const auto a_grid = grid.candidates(std::move(pooled_x));
  const auto b_grid = grid.candidates(std::move(pooled_y));
  return select_thresholds(samples, gamma, a_grid, b_grid, estimator);
}

Matrix covariance_difference(const Matrix& xs, const Matrix& ys,
                             std::span<const IndexPair> positives,
                             std::span<const IndexPair> negatives, double gamma, bool center) {
  if (!(gamma > 0.0)) throw Error("covariance_difference: gamma must be > 0");
  if (positives.empty() || negatives.empty()) throw Error("covariance_difference: empty pair set");
  return cross_covariance(xs, ys, negatives, center) - gamma * cross_covariance(xs, ys, positives, center);
}

Matrix covariance_difference(std::span<const std::pair<Vector, Vector>> positives,
                             std::span<const std::pair<Vector, Vector>> negatives, double gamma) {
  if (!(gamma > 0.0)) throw Error("covariance_difference: gamma must be > 0");
  if (positives.empty() || negatives.empty()) throw Error("covariance_difference: empty pair set");
  return cross_covariance(negatives) - gamma * cross_covariance(positives);
}

std::pair<Matrix, Matrix> train_projections(const Matrix& sigma_d, std::size_t m,
                                            ProjectionMode mode) {
  const auto n = static_cast<std::size_t>(sigma_d.rows());
  const auto np = static_cast<std::size_t>(sigma_d.cols());
  if (m == 0) throw Error("hash length m must be >= 1");
  if (m > std::min(n, np)) {
    throw Error("hash length m = " + std::to_string(m) + " exceeds min(n, n') = " +
                std::to_string(std::min(n, np)) + "; linear projections must satisfy m <= min(n, n')");
  }
  const SvdResult s = svd(sigma_d);
  Matrix p(m, n), q(m, np);
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    if (mode == ProjectionMode::kPaperLiteral) {
      p.row(r) = s.u.col(static_cast<Eigen::Index>(n - 1 - i)).transpose();
      q.row(r) = s.v.col(static_cast<Eigen::Index>(np - 1 - i)).transpose();
    } else {
      p.row(r) = s.u.col(r).transpose();
      q.row(r) = -s.v.col(r).transpose();
    }
  }
  return {std::move(p), std::move(q)};
}

ProjectionSamples gather_projection_samples(const Matrix& proj_x, const Matrix& proj_y,
                                            const PairSample& pairs, Eigen::Index dim) {
  ProjectionSamples s;
  s.x_pos.reserve(pairs.positives.size());
  s.y_pos.reserve(pairs.positives.size());
  s.x_neg.reserve(pairs.negatives.size());
  s.y_neg.reserve(pairs.negatives.size());
  for (const auto& [i, j] : pairs.positives) {
    s.x_pos.push_back(proj_x(dim, static_cast<Eigen::Index>(i)));
    s.y_pos.push_back(proj_y(dim, static_cast<Eigen::Index>(j)));
  }
  for (const auto& [i, j] : pairs.negatives) {
    s.x_neg.push_back(proj_x(dim, static_cast<Eigen::Index>(i)));
    s.y_neg.push_back(proj_y(dim, static_cast<Eigen::Index>(j)));
  }
  return s;
}

PairMultiplicity count_pair_endpoints(const PairSample& pairs, std::size_t size_x,
                                      std::size_t size_y) {
  PairMultiplicity c;
  c.x_pos.assign(size_x, 0);
  c.x_neg.assign(size_x, 0);
  c.y_pos.assign(size_y, 0);
  c.y_neg.assign(size_y, 0);
  const auto add = [&](const std::vector<IndexPair>& list, std::vector<std::size_t>& cx,
                       std::vector<std::size_t>& cy) {
    for (const auto& [i, j] : list) {
      if (i >= size_x || j >= size_y) throw Error("count_pair_endpoints: pair index out of range");
      ++cx[i];
      ++cy[j];
    }
  };
  add(pairs.positives, c.x_pos, c.y_pos);
  add(pairs.negatives, c.x_neg, c.y_neg);
  c.num_pos = pairs.positives.size();
  c.num_neg = pairs.negatives.size();
  return c;
}

namespace {

// Empirical CDF of a multiset stored as distinct ascending values with counts.
struct CountedCdf {
  std::vector<double> values;
  std::vector<std::size_t> below;  // number of entries < values[k]
  std::size_t total = 0;

  // `order` sorts `points` ascending; entries with zero weight are skipped.
  CountedCdf(const std::vector<double>& points, const std::vector<std::size_t>& order,
             const std::vector<std::size_t>& w1, const std::vector<std::size_t>* w2 = nullptr) {
    for (std::size_t k : order) {
      const std::size_t w = w1[k] + (w2 ? (*w2)[k] : 0);
      if (w == 0) continue;
      if (!std::isfinite(points[k])) throw Error("empirical_cdf: non-finite sample");
      if (values.empty() || values.back() != points[k]) {
        values.push_back(points[k]);
        below.push_back(total);
      }
      total += w;
    }
    if (total == 0) throw Error("empirical_cdf: empty sample list");
  }

  double strictly_below(double t) const {
    const auto k = static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), t) - values.begin());
    return static_cast<double>(k == values.size() ? total : below[k]) / static_cast<double>(total);
  }

  // Entry at position idx of the sorted multiset.
  double at(std::size_t idx) const {
    const auto it = std::upper_bound(below.begin(), below.end(), idx);
    return values[static_cast<std::size_t>(it - below.begin()) - 1];
  }
};

std::vector<double> counted_candidates(const CountedCdf& pooled, const ThresholdGrid& grid) {
  if (grid.levels < 2) throw Error("threshold grid: levels must be >= 2");
  std::vector<double> out;
  out.reserve(grid.levels);
  for (std::size_t k = 0; k < grid.levels; ++k) {
    out.push_back(-pooled.at(grid.quantile_index(k, pooled.total)));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> row_values(const Matrix& proj, Eigen::Index dim) {
  std::vector<double> v(static_cast<std::size_t>(proj.cols()));
  for (Eigen::Index j = 0; j < proj.cols(); ++j) v[static_cast<std::size_t>(j)] = proj(dim, j);
  return v;
}

std::vector<std::size_t> ascending_order(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  return order;
}

}  // namespace

ThresholdChoice select_thresholds_counted(const Matrix& proj_x, const Matrix& proj_y,
                                          const PairMultiplicity& counts, Eigen::Index dim,
                                          double gamma, const ThresholdGrid& grid) {
  if (counts.x_pos.size() != static_cast<std::size_t>(proj_x.cols()) ||
      counts.y_pos.size() != static_cast<std::size_t>(proj_y.cols())) {
    throw Error("select_thresholds: multiplicities do not match the projected point counts");
  }
  const auto vx = row_values(proj_x, dim);
  const auto vy = row_values(proj_y, dim);
  const auto ox = ascending_order(vx);
  const auto oy = ascending_order(vy);
  const CountedCdf x_pos(vx, ox, counts.x_pos), x_neg(vx, ox, counts.x_neg);
  const CountedCdf y_pos(vy, oy, counts.y_pos), y_neg(vy, oy, counts.y_neg);
  const auto a_grid = counted_candidates(CountedCdf(vx, ox, counts.x_pos, &counts.x_neg), grid);
  const auto b_grid = counted_candidates(CountedCdf(vy, oy, counts.y_pos, &counts.y_neg), grid);
  const auto rates = [&](double a, double b) {
    return combine_marginals(x_pos.strictly_below(-a), y_pos.strictly_below(-b),
                             x_neg.strictly_below(-a), y_neg.strictly_below(-b));
  };
  const auto best = grid_minimize_2d(
      [&](double a, double b) {
        const auto r = rates(a, b);
        return gamma * r.fn + r.fp;
      },
      a_grid, b_grid);
  return {best.a, best.b, best.value, rates(best.a, best.b)};
}

LinearHashModel train_cmdif(const MultimodalDataset& dataset, const PairSample& pairs,
                            const CmdifOptions& options) {
  if (pairs.positives.empty() || pairs.negatives.empty()) {
    throw Error("train_cmdif: empty pair set");
  }
  const Matrix sigma_d = covariance_difference(dataset.x, dataset.y, pairs.positives,
                                               pairs.negatives, options.gamma, options.center);
  auto [p, q] = train_projections(sigma_d, options.m, options.mode);

  LinearHashModel model;
  model.gamma = options.gamma;
  model.mode = options.mode;
  model.a.resize(static_cast<Eigen::Index>(options.m));
  model.b.resize(static_cast<Eigen::Index>(options.m));

  // Row by row so each dimension's projections do not depend on m.
  Matrix proj_x(p.rows(), dataset.x.cols());
  Matrix proj_y(q.rows(), dataset.y.cols());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    proj_x.row(i).noalias() = p.row(i) * dataset.x;
    proj_y.row(i).noalias() = q.row(i) * dataset.y;
  }
  const auto counts = count_pair_endpoints(pairs, dataset.size_x(), dataset.size_y());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const auto choice =
        options.estimator == RateEstimator::kMarginalProduct
            ? select_thresholds_counted(proj_x, proj_y, counts, i, options.gamma, options.grid)
            : select_thresholds(gather_projection_samples(proj_x, proj_y, pairs, i), options.gamma,
                                options.grid, options.estimator);
    model.a[i] = choice.a;
    model.b[i] = choice.b;
  }
  model.p = std::move(p);
  model.q = std::move(q);
  return model;
}

}  // namespace mmhash
