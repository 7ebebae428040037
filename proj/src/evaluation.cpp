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

#include "mmhash/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mmhash/numerics.hpp"

namespace mmhash {

RocCurve roc_from_distances(std::span<const double> pos_distances,
                            std::span<const double> neg_distances) {
  if (pos_distances.empty() || neg_distances.empty()) {
    throw Error("roc_from_distances: empty distance list");
  }
  std::vector<double> pos(pos_distances.begin(), pos_distances.end());
  std::vector<double> neg(neg_distances.begin(), neg_distances.end());
  for (double d : pos) {
    if (!std::isfinite(d)) throw Error("roc_from_distances: non-finite distance");
  }
  for (double d : neg) {
    if (!std::isfinite(d)) throw Error("roc_from_distances: non-finite distance");
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());

  std::vector<double> thresholds;
  thresholds.reserve(pos.size() + neg.size());
  std::merge(pos.begin(), pos.end(), neg.begin(), neg.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const double np = static_cast<double>(pos.size());
  const double nn = static_cast<double>(neg.size());
  RocCurve roc;
  roc.points.reserve(thresholds.size() + 1);
  roc.points.push_back({std::min(-1.0, thresholds.front() - 1.0), 0.0, 1.0});
  std::size_t ip = 0, in = 0;
  for (double t : thresholds) {
    while (ip < pos.size() && pos[ip] <= t) ++ip;
    while (in < neg.size() && neg[in] <= t) ++in;
    roc.points.push_back({t, static_cast<double>(in) / nn, static_cast<double>(pos.size() - ip) / np});
  }
  return roc;
}

double eer(const RocCurve& roc) {
  if (roc.points.empty()) throw Error("eer: empty ROC curve");
  const auto& pts = roc.points;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double diff = pts[k].fpr - pts[k].fnr;
    if (diff == 0.0) return pts[k].fpr;
    if (diff > 0.0) {
      if (k == 0) return pts[0].fpr;
      const double prev = pts[k - 1].fpr - pts[k - 1].fnr;
      const double t = -prev / (diff - prev);
      return pts[k - 1].fpr + t * (pts[k].fpr - pts[k - 1].fpr);
    }
  }
  return pts.back().fpr;
}

namespace {

// Double-double accumulator: sums of ratios stay correctly rounded for the
// list lengths seen here, so hand-checkable cases come out exact.
class ExactSum {
 public:
  // Adds num / den with the division remainder carried along.
  void add_ratio(double num, double den) {
    const double q = num / den;
    const double rem = std::fma(-q, den, num) / den;
    add(q);
    add(rem);
  }

  double divided_by(double den) const {
    const double q = hi_ / den;
    const double rem = std::fma(-q, den, hi_) + lo_;
    return q + rem / den;
  }

 private:
  void add(double v) {
    const double s = hi_ + v;
    const double bb = s - hi_;
    const double err = (hi_ - (s - bb)) + (v - bb);
    hi_ = s;
    lo_ += err;
  }

  double hi_ = 0.0;
  double lo_ = 0.0;
};

}  // namespace

double average_precision(std::span<const std::uint8_t> relevance) {
  ExactSum sum;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < relevance.size(); ++r) {
    if (relevance[r]) {
      ++hits;
      sum.add_ratio(static_cast<double>(hits), static_cast<double>(r + 1));
    }
  }
  if (hits == 0) throw Error("average_precision: query has no relevant items");
  return sum.divided_by(static_cast<double>(hits));
}

double mean_average_precision(const std::vector<std::vector<std::uint8_t>>& rankings) {
  if (rankings.empty()) throw Error("mean_average_precision: no queries");
  ExactSum sum;
  for (const auto& r : rankings) sum.add_ratio(average_precision(r), 1.0);
  return sum.divided_by(static_cast<double>(rankings.size()));
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_metrics_csv(std::ostream& out, const EvalReport& report) {
  for (const auto& [key, value] : report.config) out << key << ',';
  out << "map,eer\n";
  for (const auto& [key, value] : report.config) out << value << ',';
  out << format_real(report.map) << ',' << format_real(report.eer) << '\n';
}

void write_roc_csv(std::ostream& out, const RocCurve& roc) {
  out << "threshold,fpr,fnr\n";
  for (const auto& p : roc.points) {
    out << format_real(p.threshold) << ',' << format_real(p.fpr) << ',' << format_real(p.fnr) << '\n';
  }
}

}  // namespace mmhash
