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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mmhash/cmdif.hpp"
#include "test_util.hpp"

namespace mmhash {
namespace {

using testing::random_matrix;

// Marginal-product rates straight from the defining formula, counting samples
// with projection + threshold < 0.
FalseRates oracle_rates(const ProjectionSamples& s, double a, double b) {
  const auto frac_below = [](const std::vector<double>& v, double t) {
    double c = 0;
    for (double x : v) c += (x < t) ? 1.0 : 0.0;
    return c / static_cast<double>(v.size());
  };
  const double fxp = frac_below(s.x_pos, -a), fyp = frac_below(s.y_pos, -b);
  const double fxn = frac_below(s.x_neg, -a), fyn = frac_below(s.y_neg, -b);
  return {fxp * (1 - fyp) + fyp * (1 - fxp), fxn * fyn + (1 - fxn) * (1 - fyn)};
}

ProjectionSamples random_samples(Rng& rng, std::size_t np, std::size_t nn, bool integer_valued) {
  ProjectionSamples s;
  const auto draw = [&] { return integer_valued ? std::round(rng.normal() * 2.0) : rng.normal(); };
  for (std::size_t k = 0; k < np; ++k) {
    s.x_pos.push_back(draw());
    s.y_pos.push_back(draw() + 0.5 * s.x_pos.back());
  }
  for (std::size_t k = 0; k < nn; ++k) {
    s.x_neg.push_back(draw());
    s.y_neg.push_back(draw());
  }
  return s;
}

std::vector<double> random_grid(Rng& rng, std::size_t size) {
  std::set<double> g;
  while (g.size() < size) g.insert(std::round(rng.normal() * 8.0) / 4.0);
  return {g.begin(), g.end()};
}

TEST(ThresholdGrid, CandidatesAreNegatedQuantiles) {
  std::vector<double> pooled;
  for (int i = 0; i < 101; ++i) pooled.push_back(static_cast<double>(i));
  ThresholdGrid grid{11};
  const auto c = grid.candidates(pooled);
  ASSERT_EQ(c.size(), 11u);
  for (int k = 0; k < 11; ++k) EXPECT_EQ(c[static_cast<std::size_t>(k)], -100.0 + 10.0 * k);
}

TEST(ThresholdGrid, StrictlyIncreasingAndContainsExtremes) {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> pooled(1 + rng.below(300));
    for (auto& v : pooled) v = std::round(rng.normal() * 3.0);
    ThresholdGrid grid{2 + rng.below(70)};
    const auto c = grid.candidates(pooled);
    ASSERT_FALSE(c.empty());
    ASSERT_LE(c.size(), grid.levels);
    for (std::size_t k = 1; k < c.size(); ++k) ASSERT_LT(c[k - 1], c[k]);
    const auto [lo, hi] = std::minmax_element(pooled.begin(), pooled.end());
    EXPECT_EQ(c.front(), -*hi);
    EXPECT_EQ(c.back(), -*lo);
    for (double v : c) EXPECT_NE(std::find(pooled.begin(), pooled.end(), -v), pooled.end());
  }
}

TEST(ThresholdGrid, DegenerateSamplesGiveSingleCandidate) {
  const auto c = ThresholdGrid{64}.candidates(std::vector<double>(10, 2.5));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], -2.5);
}

TEST(ThresholdGrid, Errors) {
  EXPECT_THROW((void)ThresholdGrid{1}.candidates({1.0, 2.0}), Error);
  EXPECT_THROW((void)ThresholdGrid{8}.candidates({}), Error);
}

TEST(FalseRates, PerfectlyThresholdedPositives) {
  ProjectionSamples s{{1, 2, 3}, {0.5, 4}, {-1, 1}, {-2, 2}};
  const ProjectionCdfs cdfs(s);
  // -a = 1 and -b = 0.5 put no positive strictly below.
  const auto r = false_rates(cdfs, -1.0, -0.5);
  EXPECT_EQ(r.fn, 0.0);
}

TEST(FalseRates, HalfNegativesGiveHalfFp) {
  ProjectionSamples s{{1}, {1}, {-1, 1}, {-2, 2}};
  const auto r = false_rates(ProjectionCdfs(s), 0.0, 0.0);
  EXPECT_EQ(r.fp, 0.5);
}

TEST(FalseRates, MatchesFormulaOracleOnSmallSamples) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const auto s = random_samples(rng, 1 + rng.below(8), 1 + rng.below(8), true);
    const ProjectionCdfs cdfs(s);
    for (int q = 0; q < 10; ++q) {
      const double a = std::round(rng.normal() * 4.0) / 2.0, b = std::round(rng.normal() * 4.0) / 2.0;
      const auto got = false_rates(cdfs, a, b);
      const auto want = oracle_rates(s, a, b);
      ASSERT_DOUBLE_EQ(got.fn, want.fn);
      ASSERT_DOUBLE_EQ(got.fp, want.fp);
      ASSERT_GE(got.fn, 0.0);
      ASSERT_LE(got.fn, 1.0);
      ASSERT_GE(got.fp, 0.0);
      ASSERT_LE(got.fp, 1.0);
    }
  }
}

TEST(FalseRates, BalancedMarginalsMakeFpTheComplementOfFn) {
  // Same marginals on both pair sets: FP = 1 - FN at every threshold pair,
  // which is why the marginal estimator prefers constant bits when gamma > 1.
  ProjectionSamples s{{-1, 0, 2, 3}, {1, -2, 0, 5}, {-1, 0, 2, 3}, {1, -2, 0, 5}};
  const ProjectionCdfs cdfs(s);
  for (double a : {-3.0, -1.0, 0.5, 2.0}) {
    for (double b : {-6.0, 0.0, 1.5}) {
      const auto r = false_rates(cdfs, a, b);
      EXPECT_DOUBLE_EQ(r.fn + r.fp, 1.0);
    }
  }
}

ThresholdChoice oracle_select(const ProjectionSamples& s, double gamma, const std::vector<double>& ag,
                              const std::vector<double>& bg, bool joint) {
  ThresholdChoice best;
  best.objective = std::numeric_limits<double>::infinity();
  for (double a : ag) {
    for (double b : bg) {
      const auto r = joint ? joint_false_rates(s, a, b) : oracle_rates(s, a, b);
      const double v = gamma * r.fn + r.fp;
      if (v < best.objective) best = {a, b, v, r};
    }
  }
  return best;
}

TEST(SelectThresholds, EqualsBruteForceOn16By16Grids) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto s = random_samples(rng, 1 + rng.below(30), 1 + rng.below(30), t % 2 == 0);
    const auto ag = random_grid(rng, 1 + rng.below(16));
    const auto bg = random_grid(rng, 1 + rng.below(16));
    const double gamma = t % 3 == 0 ? 10.0 : 0.1 + rng.uniform() * 3.0;
    const auto got = select_thresholds(s, gamma, ag, bg);
    const auto want = oracle_select(s, gamma, ag, bg, false);
    ASSERT_EQ(got.a, want.a);
    ASSERT_EQ(got.b, want.b);
    ASSERT_DOUBLE_EQ(got.objective, want.objective);
  }
}

TEST(SelectThresholds, JointEstimatorEqualsDirectCounting) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const auto s = random_samples(rng, 1 + rng.below(40), 1 + rng.below(40), t % 2 == 0);
    const auto ag = random_grid(rng, 1 + rng.below(16));
    const auto bg = random_grid(rng, 1 + rng.below(16));
    const double gamma = 0.5 + rng.uniform() * 10.0;
    const auto got = select_thresholds(s, gamma, ag, bg, RateEstimator::kJointCounts);
    const auto want = oracle_select(s, gamma, ag, bg, true);
    ASSERT_EQ(got.a, want.a);
    ASSERT_EQ(got.b, want.b);
    ASSERT_DOUBLE_EQ(got.objective, want.objective);
    ASSERT_DOUBLE_EQ(got.rates.fn, want.rates.fn);
    ASSERT_DOUBLE_EQ(got.rates.fp, want.rates.fp);
  }
}

TEST(SelectThresholds, ResultLiesOnGridAndIsMinimal) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto s = random_samples(rng, 50, 200, false);
    ThresholdGrid grid{2 + rng.below(20)};
    const auto choice = select_thresholds(s, 10.0, grid);
    std::vector<double> px = s.x_pos, py = s.y_pos;
    px.insert(px.end(), s.x_neg.begin(), s.x_neg.end());
    py.insert(py.end(), s.y_neg.begin(), s.y_neg.end());
    const auto ag = grid.candidates(px), bg = grid.candidates(py);
    ASSERT_NE(std::find(ag.begin(), ag.end(), choice.a), ag.end());
    ASSERT_NE(std::find(bg.begin(), bg.end(), choice.b), bg.end());
    for (double a : ag) {
      for (double b : bg) {
        const auto r = oracle_rates(s, a, b);
        ASSERT_LE(choice.objective, 10.0 * r.fn + r.fp + 1e-15);
      }
    }
  }
}

TEST(SelectThresholds, SeparablePositivesGetZeroFn) {
  ProjectionSamples s{{1, 2, 3, 4}, {0.5, 1.5, 2.5, 3.5}, {-2, -1, 1, 2}, {2, -1, 1, -2}};
  const auto choice = select_thresholds(s, 10.0, ThresholdGrid{64});
  std::size_t disagree = 0;
  for (std::size_t k = 0; k < s.x_pos.size(); ++k) {
    disagree += (s.x_pos[k] + choice.a < 0) != (s.y_pos[k] + choice.b < 0);
  }
  EXPECT_EQ(disagree, 0u);
  EXPECT_EQ(choice.rates.fn, 0.0);
}

TEST(SelectThresholds, HugeGammaMinimizesFnThenFp) {
  Rng rng(6);
  for (int t = 0; t < 30; ++t) {
    const auto s = random_samples(rng, 20, 20, true);
    const auto ag = random_grid(rng, 12), bg = random_grid(rng, 12);
    const auto got = select_thresholds(s, 1e6, ag, bg);
    double min_fn = 2.0;
    for (double a : ag) {
      for (double b : bg) min_fn = std::min(min_fn, oracle_rates(s, a, b).fn);
    }
    double min_fp = 2.0;
    for (double a : ag) {
      for (double b : bg) {
        const auto r = oracle_rates(s, a, b);
        if (r.fn <= min_fn + 1e-12) min_fp = std::min(min_fp, r.fp);
      }
    }
    EXPECT_NEAR(got.rates.fn, min_fn, 1e-12);
    EXPECT_DOUBLE_EQ(got.rates.fp, min_fp);
  }
}

TEST(SelectThresholds, DegenerateGridReturnsItsOnlyPoint) {
  ProjectionSamples s{{1, 1}, {1, 1}, {1}, {1}};
  const auto c = select_thresholds(s, 10.0, ThresholdGrid{64});
  EXPECT_EQ(c.a, -1.0);
  EXPECT_EQ(c.b, -1.0);
}

TEST(SelectThresholds, Errors) {
  ProjectionSamples s{{1}, {1}, {1}, {1}};
  const std::vector<double> bad{1.0, 1.0}, good{0.0}, none;
  EXPECT_THROW((void)select_thresholds(s, 10.0, bad, good), Error);
  EXPECT_THROW((void)select_thresholds(s, 10.0, none, good), Error);
  ProjectionSamples unpaired{{1, 2}, {1}, {1}, {1}};
  EXPECT_THROW((void)select_thresholds(unpaired, 10.0, good, good, RateEstimator::kJointCounts), Error);
  EXPECT_EQ(parse_rate_estimator("joint"), RateEstimator::kJointCounts);
  EXPECT_EQ(to_string(RateEstimator::kMarginalProduct), "marginal");
  EXPECT_THROW((void)parse_rate_estimator("histogram"), Error);
}

TEST(CovarianceDifference, ScalarCase) {
  const std::vector<std::pair<Vector, Vector>> one{{Vector::Ones(1), Vector::Ones(1)}};
  const Matrix d = covariance_difference(one, one, 10.0);
  EXPECT_EQ(d(0, 0), -9.0);
}

TEST(CovarianceDifference, CancelsAtUnitGamma) {
  Rng rng(7);
  const Matrix xs = random_matrix(3, 6, rng), ys = random_matrix(2, 6, rng);
  std::vector<IndexPair> pairs{{0, 1}, {2, 3}, {5, 5}};
  const Matrix d = covariance_difference(xs, ys, pairs, pairs, 1.0);
  EXPECT_EQ(d.cwiseAbs().maxCoeff(), 0.0);
}

TEST(CovarianceDifference, MatchesEntrywiseOracle) {
  Rng rng(8);
  const Matrix xs = random_matrix(6, 20, rng), ys = random_matrix(4, 20, rng);
  std::vector<IndexPair> pos, neg;
  for (int k = 0; k < 15; ++k) pos.emplace_back(rng.below(20), rng.below(20));
  for (int k = 0; k < 25; ++k) neg.emplace_back(rng.below(20), rng.below(20));
  const Matrix d = covariance_difference(xs, ys, pos, neg, 10.0);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 4; ++j) {
      double en = 0, ep = 0;
      for (const auto& [a, b] : neg) en += xs(i, static_cast<Eigen::Index>(a)) * ys(j, static_cast<Eigen::Index>(b));
      for (const auto& [a, b] : pos) ep += xs(i, static_cast<Eigen::Index>(a)) * ys(j, static_cast<Eigen::Index>(b));
      EXPECT_NEAR(d(i, j), en / 25.0 - 10.0 * ep / 15.0, 1e-12);
    }
  }
}

TEST(CovarianceDifference, Errors) {
  const std::vector<std::pair<Vector, Vector>> one{{Vector::Ones(1), Vector::Ones(1)}}, none;
  EXPECT_THROW((void)covariance_difference(none, one, 10.0), Error);
  EXPECT_THROW((void)covariance_difference(one, none, 10.0), Error);
  EXPECT_THROW((void)covariance_difference(one, one, 0.0), Error);
}

TEST(TrainProjections, PaperLiteralTakesSmallestPair) {
  Matrix d(2, 2);
  d << 3, 0, 0, 1;
  const auto [p, q] = train_projections(d, 1, ProjectionMode::kPaperLiteral);
  EXPECT_NEAR(std::abs(p(0, 1)), 1.0, 1e-15);
  EXPECT_NEAR(p(0, 0), 0.0, 1e-15);
  // Joint sign: p and q point the same way.
  EXPECT_NEAR(p(0, 1) * q(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(q(0, 0), 0.0, 1e-15);
}

TEST(TrainProjections, MinTraceTakesLargestPairWithFlip) {
  Matrix d(2, 2);
  d << 3, 0, 0, 1;
  const auto [p, q] = train_projections(d, 1, ProjectionMode::kMinTrace);
  EXPECT_NEAR(p(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(q(0, 0), -1.0, 1e-15);
  EXPECT_NEAR((p * d * q.transpose()).trace(), -3.0, 1e-15);
}

TEST(TrainProjections, MinTraceBeatsRandomSearch) {
  Rng rng(9);
  const Matrix d = random_matrix(8, 5, rng);
  const auto [p, q] = train_projections(d, 3, ProjectionMode::kMinTrace);
  const double best = (p * d * q.transpose()).trace();
  const auto s = svd(d).singular_values;
  EXPECT_NEAR(best, -(s[0] + s[1] + s[2]), 1e-10);
  for (int t = 0; t < 10000; ++t) {
    const Matrix rp = random_row_orthonormal(3, 8, rng);
    const Matrix rq = random_row_orthonormal(3, 5, rng);
    ASSERT_LE(best, (rp * d * rq.transpose()).trace() + 1e-12);
  }
}

TEST(TrainProjections, RowsOrthonormalInBothModes) {
  Rng rng(10);
  const Matrix d = random_matrix(9, 6, rng);
  for (auto mode : {ProjectionMode::kPaperLiteral, ProjectionMode::kMinTrace}) {
    const auto [p, q] = train_projections(d, 6, mode);
    EXPECT_LE((p * p.transpose() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((q * q.transpose() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(TrainProjections, CapEnforced) {
  Rng rng(11);
  const Matrix d = random_matrix(5, 3, rng);
  try {
    (void)train_projections(d, 4, ProjectionMode::kMinTrace);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("min(n, n')"), std::string::npos);
  }
  EXPECT_THROW((void)train_projections(d, 0, ProjectionMode::kMinTrace), Error);
  EXPECT_EQ(parse_projection_mode("paper-literal"), ProjectionMode::kPaperLiteral);
  EXPECT_THROW((void)parse_projection_mode("largest"), Error);
}

MultimodalDataset small_dataset(std::uint64_t seed, std::size_t n = 6, std::size_t np = 4) {
  SynthConfig c;
  c.n = n;
  c.n_prime = np;
  c.num_classes = 4;
  c.points_per_class_x = c.points_per_class_y = 15;
  c.center_std = 5.0;
  c.seed = seed;
  return generate_synthetic(c);
}

TEST(TrainCmdif, LossIdentityAndMinTraceValue) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto d = small_dataset(rng.next_u64());
    const auto pairs = sample_pairs(d, 200, 400, rng.next_u64());
    CmdifOptions opt;
    opt.m = 3;
    const auto model = train_cmdif(d, pairs, opt);
    const Matrix sd = covariance_difference(d.x, d.y, pairs.positives, pairs.negatives, 10.0);
    // Empirical loss from the pairs, accumulated independently.
    double en = 0, ep = 0;
    for (const auto& [i, j] : pairs.negatives) {
      en += (model.p * d.x.col(static_cast<Eigen::Index>(i))).dot(model.q * d.y.col(static_cast<Eigen::Index>(j)));
    }
    for (const auto& [i, j] : pairs.positives) {
      ep += (model.p * d.x.col(static_cast<Eigen::Index>(i))).dot(model.q * d.y.col(static_cast<Eigen::Index>(j)));
    }
    const double tr = (model.p * sd * model.q.transpose()).trace();
    EXPECT_NEAR(en / 400.0 - 10.0 * ep / 200.0, tr, 1e-8 * std::max(1.0, std::abs(tr)));
    const auto s = svd(sd).singular_values;
    EXPECT_NEAR(tr, -s.head(3).sum(), 1e-8 * std::max(1.0, std::abs(tr)));
  }
}

TEST(TrainCmdif, PrefixProperty) {
  Rng rng(13);
  for (int t = 0; t < 10; ++t) {
    const auto d = small_dataset(rng.next_u64());
    const auto pairs = sample_pairs(d, 150, 300, rng.next_u64());
    for (auto mode : {ProjectionMode::kMinTrace, ProjectionMode::kPaperLiteral}) {
      CmdifOptions small, big;
      small.m = 2;
      big.m = 3;
      small.mode = big.mode = mode;
      small.estimator = big.estimator = t % 2 ? RateEstimator::kJointCounts : RateEstimator::kMarginalProduct;
      const auto ms = train_cmdif(d, pairs, small);
      const auto mb = train_cmdif(d, pairs, big);
      EXPECT_EQ(ms.p, mb.p.topRows(2));
      EXPECT_EQ(ms.q, mb.q.topRows(2));
      EXPECT_EQ(ms.a, mb.a.head(2));
      EXPECT_EQ(ms.b, mb.b.head(2));
    }
  }
}

TEST(TrainCmdif, CapAndEmptyPairErrors) {
  const auto d = small_dataset(1);
  const auto pairs = sample_pairs(d, 50, 50, 2);
  CmdifOptions opt;
  opt.m = 5;  // min(6, 4) + 1
  EXPECT_THROW((void)train_cmdif(d, pairs, opt), Error);
  opt.m = 2;
  EXPECT_THROW((void)train_cmdif(d, PairSample{}, opt), Error);
}

// Two tight, well-separated classes in 2-D with every cross-modal pair enumerated.
struct Toy {
  MultimodalDataset data;
  PairSample pairs;
};

Toy two_class_toy() {
  Toy t;
  Rng rng(14);
  const int per_class = 10;
  t.data.x.resize(2, 2 * per_class);
  t.data.y.resize(2, 2 * per_class);
  for (int k = 0; k < 2 * per_class; ++k) {
    const int label = k / per_class;
    const double c = label == 0 ? -5.0 : 5.0;
    t.data.x.col(k) << c + 0.1 * rng.normal(), 1.0 + 0.1 * rng.normal();
    t.data.y.col(k) << 2.0 + 0.1 * rng.normal(), c + 0.1 * rng.normal();
    t.data.labels_x.push_back(label);
    t.data.labels_y.push_back(label);
  }
  t.data.diag_cov_x = t.data.diag_cov_y = Vector::Constant(2, 0.01);
  t.data.num_classes = 2;
  for (std::size_t i = 0; i < 2u * per_class; ++i) {
    for (std::size_t j = 0; j < 2u * per_class; ++j) {
      (t.data.labels_x[i] == t.data.labels_y[j] ? t.pairs.positives : t.pairs.negatives).emplace_back(i, j);
    }
  }
  return t;
}

FalseRates training_rates(const Toy& t, const LinearHashModel& m) {
  const auto bit = [&](const Matrix& pts, std::size_t idx, bool is_x) {
    const auto col = pts.col(static_cast<Eigen::Index>(idx));
    const double v = is_x ? m.p.row(0).dot(col) + m.a[0] : m.q.row(0).dot(col) + m.b[0];
    return v >= 0.0;
  };
  double fn = 0, fp = 0;
  for (const auto& [i, j] : t.pairs.positives) fn += bit(t.data.x, i, true) != bit(t.data.y, j, false);
  for (const auto& [i, j] : t.pairs.negatives) fp += bit(t.data.x, i, true) == bit(t.data.y, j, false);
  return {fn / static_cast<double>(t.pairs.positives.size()), fp / static_cast<double>(t.pairs.negatives.size())};
}

TEST(TrainCmdif, ToyTwoClassJointEstimatorSeparatesPerfectly) {
  const auto t = two_class_toy();
  CmdifOptions opt;
  opt.m = 1;
  opt.estimator = RateEstimator::kJointCounts;
  const auto r = training_rates(t, train_cmdif(t.data, t.pairs, opt));
  EXPECT_EQ(r.fn, 0.0);
  EXPECT_EQ(r.fp, 0.0);
}

TEST(TrainCmdif, ToyTwoClassMarginalEstimatorCollapsesToConstantBit) {
  // Balanced classes give identical positive and negative marginals, so the
  // factorized objective equals 1 + (gamma - 1) FN and is minimized by a bit
  // that is the same for every point: FN = 0 and FP = 1 on the training pairs.
  const auto t = two_class_toy();
  CmdifOptions opt;
  opt.m = 1;
  const auto r = training_rates(t, train_cmdif(t.data, t.pairs, opt));
  EXPECT_EQ(r.fn, 0.0);
  EXPECT_EQ(r.fp, 1.0);
}

TEST(SelectThresholdsCounted, MatchesSamplePathExactly) {
  Rng rng(41);
  for (int t = 0; t < 100; ++t) {
    const auto nx = static_cast<Eigen::Index>(2 + rng.below(60));
    const auto ny = static_cast<Eigen::Index>(2 + rng.below(60));
    const auto dims = static_cast<Eigen::Index>(1 + rng.below(3));
    Matrix px = random_matrix(dims, nx, rng), py = random_matrix(dims, ny, rng);
    if (t % 2 == 0) {
      // Coarse values force duplicated projections.
      px = (px * 2.0).array().round().matrix();
      py = (py * 2.0).array().round().matrix();
    }
    PairSample pairs;
    const auto draw = [&](std::vector<IndexPair>& list, std::size_t count) {
      for (std::size_t k = 0; k < count; ++k) {
        list.emplace_back(rng.below(static_cast<std::uint64_t>(nx)), rng.below(static_cast<std::uint64_t>(ny)));
      }
    };
    draw(pairs.positives, 1 + rng.below(40));
    draw(pairs.negatives, 1 + rng.below(200));
    const ThresholdGrid grid{2 + rng.below(70)};
    const double gamma = t % 3 == 0 ? 10.0 : rng.uniform(0.1, 30.0);
    const auto counts = count_pair_endpoints(pairs, static_cast<std::size_t>(nx), static_cast<std::size_t>(ny));
    for (Eigen::Index d = 0; d < dims; ++d) {
      const auto want = select_thresholds(gather_projection_samples(px, py, pairs, d), gamma, grid);
      const auto got = select_thresholds_counted(px, py, counts, d, gamma, grid);
      ASSERT_EQ(got.a, want.a) << t;
      ASSERT_EQ(got.b, want.b) << t;
      ASSERT_EQ(got.objective, want.objective) << t;
      ASSERT_EQ(got.rates.fn, want.rates.fn) << t;
      ASSERT_EQ(got.rates.fp, want.rates.fp) << t;
    }
  }
}

TEST(SelectThresholdsCounted, Errors) {
  const Matrix px = Matrix::Zero(1, 3), py = Matrix::Zero(1, 2);
  PairSample pairs{{{0, 0}}, {{2, 1}}};
  const auto counts = count_pair_endpoints(pairs, 3, 2);
  EXPECT_EQ(counts.x_neg[2], 1u);
  EXPECT_EQ(counts.num_pos, 1u);
  EXPECT_THROW(count_pair_endpoints({{{3, 0}}, {{0, 0}}}, 3, 2), Error);
  EXPECT_THROW(select_thresholds_counted(Matrix::Zero(1, 4), py, counts, 0, 10.0, ThresholdGrid{}), Error);
  Matrix bad = px;
  bad(0, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(select_thresholds_counted(bad, py, counts, 0, 10.0, ThresholdGrid{}), Error);
  // A NaN on a point no pair touches is never looked at.
  bad(0, 2) = 0.0;
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_NO_THROW(select_thresholds_counted(bad, py, counts, 0, 10.0, ThresholdGrid{}));
  EXPECT_THROW(select_thresholds_counted(px, py, counts, 0, 10.0, ThresholdGrid{1}), Error);
}

}  // namespace
}  // namespace mmhash
