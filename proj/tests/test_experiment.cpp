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
#include <numeric>
#include <sstream>

#include "mmhash/codec.hpp"
#include "mmhash/experiment.hpp"
#include "test_util.hpp"

namespace mmhash {
namespace {

std::pair<MultimodalDataset, MultimodalDataset> data(std::size_t n = 12, std::size_t np = 8,
                                                     std::uint64_t seed = 1) {
  SynthConfig c;
  c.n = n;
  c.n_prime = np;
  c.num_classes = 5;
  c.points_per_class_x = c.points_per_class_y = 30;
  c.center_std = 6.0;
  c.seed = seed;
  return generate_synthetic_split(c, 10);
}

TrainConfig small_train(Method method) {
  TrainConfig t;
  t.method = method;
  t.m = 6;
  t.num_pos = 300;
  t.num_neg = 1000;
  t.l = t.l_prime = 40;
  return t;
}

EvalConfig small_eval() {
  EvalConfig e;
  e.num_pos = 300;
  e.num_neg = 1000;
  return e;
}

TEST(TrainConfig, ValidationMessages) {
  const auto [train, test] = data();
  auto t = small_train(Method::kCmdif);
  t.m = 9;
  try {
    t.validate(train);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("min(n, n')"), std::string::npos);
  }
  t = small_train(Method::kMmkdif);
  t.m = 41;
  try {
    t.validate(train);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("number of the basis vectors"), std::string::npos);
  }
  t.m = 6;
  t.l = 10000;
  EXPECT_THROW(t.validate(train), Error);
  t = small_train(Method::kCmdif);
  t.gamma = 0;
  EXPECT_THROW(t.validate(train), Error);
  t = small_train(Method::kCmdif);
  t.levels = 1;
  EXPECT_THROW(t.validate(train), Error);
  t = small_train(Method::kCmdif);
  t.num_pos = 0;
  EXPECT_THROW(t.validate(train), Error);
  EXPECT_EQ(parse_method("mmkdif"), Method::kMmkdif);
  EXPECT_THROW((void)parse_method("ssh"), Error);
  EXPECT_EQ(parse_direction("y2x"), Direction::kYtoX);
  EXPECT_THROW((void)parse_direction("x2x"), Error);
}

TEST(RunTraining, KernelLengthBeyondDimensionCap) {
  const auto [train, test] = data();
  auto t = small_train(Method::kMmkdif);
  t.m = 20;  // > min(12, 8)
  const auto out = run_training(train, t);
  EXPECT_EQ(model_length(out.file.model), 20u);
  EXPECT_GE(out.seconds, 0.0);
  EXPECT_EQ(out.file.config["method"], "mmkdif");
}

// mAP recomputed without the index: explicit Hamming distances and a stable
// sort by (distance, database position).
double oracle_map(const HashModel& model, const MultimodalDataset& test) {
  const auto cx = std::visit([&](const auto& m) { return encode_all(m, test.x, Modality::X); }, model);
  const auto cy = std::visit([&](const auto& m) { return encode_all(m, test.y, Modality::Y); }, model);
  double sum = 0;
  int queries = 0;
  for (std::size_t q = 0; q < cx.size(); ++q) {
    std::vector<std::size_t> order(cy.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return hamming(cx[q], cy[a]) < hamming(cx[q], cy[b]);
    });
    double hits = 0, ap = 0;
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (test.labels_y[order[r]] == test.labels_x[q]) {
        ++hits;
        ap += hits / static_cast<double>(r + 1);
      }
    }
    sum += ap / hits;
    ++queries;
  }
  return sum / queries;
}

TEST(EvaluateModel, MapMatchesIndependentRanking) {
  const auto [train, test] = data();
  for (Method method : {Method::kCmdif, Method::kMmkdif}) {
    auto t = small_train(method);
    t.estimator = RateEstimator::kJointCounts;
    t.gamma = 1.0;
    const auto model = run_training(train, t).file.model;
    const auto report = evaluate_model(model, test, small_eval());
    EXPECT_NEAR(report.map, oracle_map(model, test), 1e-12);
    EXPECT_GE(report.eer, 0.0);
    EXPECT_LE(report.eer, 1.0);
    EXPECT_GE(report.map, 0.0);
    EXPECT_LE(report.map, 1.0);
  }
}

TEST(EvaluateModel, DirectionSwapOnSymmetricData) {
  const auto [train, test] = data(8, 8, 4);
  for (auto estimator : {RateEstimator::kMarginalProduct, RateEstimator::kJointCounts}) {
    auto t = small_train(Method::kCmdif);
    t.estimator = estimator;
    t.gamma = estimator == RateEstimator::kJointCounts ? 1.0 : 10.0;
    const auto model = run_training(train, t).file.model;
    auto e = small_eval();
    const auto xy = evaluate_model(model, test, e);
    e.direction = Direction::kYtoX;
    const auto yx = evaluate_model(model, test, e);
    // Same test pairs in both directions: the Hamming distances coincide.
    EXPECT_NEAR(xy.eer, yx.eer, 0.05);
  }
}

TEST(EvaluateModel, DimensionMismatchReported) {
  const auto [train, test] = data();
  const auto model = run_training(train, small_train(Method::kCmdif)).file.model;
  const auto [other, other_test] = data(10, 8);
  EXPECT_THROW((void)evaluate_model(model, other_test, small_eval()), Error);
}

TEST(EvaluateEuclidean, SeparatedClustersArePerfect) {
  SynthConfig c;
  c.n = 4;
  c.n_prime = 3;
  c.num_classes = 3;
  c.points_per_class_x = c.points_per_class_y = 10;
  c.noise_std_low = c.noise_std_high = 0.01;
  c.center_std = 50.0;
  const auto d = generate_synthetic(c);
  const auto r = evaluate_euclidean(d, Modality::X, small_eval());
  EXPECT_EQ(r.map, 1.0);
  EXPECT_EQ(r.eer, 0.0);
  EXPECT_EQ(r.config[0].second, "euclidean");
}

TEST(Sweep, RowsCappingAndPaperFigure) {
  const auto [train, test] = data();
  SweepConfig s;
  s.lengths = {4, 10};
  s.train = small_train(Method::kCmdif);
  s.eval = small_eval();
  const auto rows = run_sweep(train, test, s);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].status, "ok");
  EXPECT_EQ(rows[1].status, "m capped");
  EXPECT_EQ(rows[1].m_used, 0u);
  EXPECT_EQ(rows[3].status, "ok");
  EXPECT_EQ(rows[3].m_used, 10u);
  std::ostringstream out;
  write_sweep_csv(out, rows);
  EXPECT_NE(out.str().find("cmdif,10,0,5,,,m capped\n"), std::string::npos);

  s.paper_figure = true;
  s.methods = {Method::kCmdif};
  const auto fig = run_sweep(train, test, s);
  EXPECT_EQ(fig[1].m_used, 8u);
  EXPECT_EQ(fig[1].status, "ok");

  s.lengths.clear();
  EXPECT_THROW((void)run_sweep(train, test, s), Error);
}

TEST(Sweep, FailuresAreRecordedPerRow) {
  const auto [train, test] = data();
  SweepConfig s;
  s.methods = {Method::kMmkdif};
  s.lengths = {4, 41};  // the second exceeds l = 40
  s.train = small_train(Method::kMmkdif);
  s.eval = small_eval();
  const auto rows = run_sweep(train, test, s);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].status, "ok");
  EXPECT_EQ(rows[1].status.rfind("error: ", 0), 0u);
}

}  // namespace
}  // namespace mmhash
