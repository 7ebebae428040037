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

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mmhash {

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;  // fraction of negatives with distance <= threshold
  double fnr = 0.0;  // fraction of positives with distance > threshold
};

/// Empirical ROC of the rule "same iff distance <= t", at t below every
/// distance and at every distinct distance, ascending. FPR rises from 0 to 1
/// while FNR falls from 1 to 0.
struct RocCurve {
  std::vector<RocPoint> points;
};

RocCurve roc_from_distances(std::span<const double> pos_distances,
                            std::span<const double> neg_distances);

/// Error rate where FPR = FNR, linearly interpolated between the two curve
/// points that bracket the crossing.
double eer(const RocCurve& roc);

/// Mean over relevant positions r (1-based) of (#relevant in the top r) / r.
/// Throws if nothing is relevant.
double average_precision(std::span<const std::uint8_t> relevance);

double mean_average_precision(const std::vector<std::vector<std::uint8_t>>& rankings);

struct EvalReport {
  double map = 0.0;
  double eer = 0.0;
  RocCurve roc;
  std::vector<std::pair<std::string, std::string>> config;  // echoed run parameters, in order
};

/// Header row of config keys followed by map,eer; one data row.
void write_metrics_csv(std::ostream& out, const EvalReport& report);

/// "threshold,fpr,fnr" rows.
void write_roc_csv(std::ostream& out, const RocCurve& roc);

/// %.17g
std::string format_real(double v);

}  // namespace mmhash
