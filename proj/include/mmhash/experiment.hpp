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

// Train / evaluate / sweep pipelines shared by the command-line tool and the
// acceptance suite.

#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mmhash/dataset.hpp"
#include "mmhash/evaluation.hpp"
#include "mmhash/model_io.hpp"

namespace mmhash {

enum class Method { kCmdif, kMmkdif };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct TrainConfig {
  Method method = Method::kCmdif;
  std::size_t m = 25;
  double gamma = 10.0;
  std::size_t levels = 64;
  ProjectionMode mode = ProjectionMode::kMinTrace;
  RateEstimator estimator = RateEstimator::kMarginalProduct;
  std::size_t num_pos = 10000;
  std::size_t num_neg = 100000;
  std::uint64_t pair_seed = 2;
  // Kernel method only.
  std::size_t l = 1000;
  std::size_t l_prime = 1000;
  std::uint64_t basis_seed = 3;
  /// Kernel bandwidth multiplier; 0 selects the modality dimension.
  double kernel_bandwidth = 0.0;

  /// Checks every constraint against the training set before any work starts.
  void validate(const MultimodalDataset& train) const;
  nlohmann::ordered_json to_json() const;
};

struct TrainOutcome {
  ModelFile file;
  double seconds = 0.0;  // wall clock of the trainer call only
};

TrainOutcome run_training(const MultimodalDataset& train, const TrainConfig& config);

enum class Direction { kXtoY, kYtoX };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

struct EvalConfig {
  Direction direction = Direction::kXtoY;
  std::size_t num_pos = 10000;
  std::size_t num_neg = 100000;
  std::uint64_t pair_seed = 5;
};

/// Cross-modal retrieval: codes of the source modality query an index of the
/// target modality's codes. mAP over all queries with same-class relevance;
/// EER over Hamming distances of sampled positive / negative test pairs.
EvalReport evaluate_model(const HashModel& model, const MultimodalDataset& test,
                          const EvalConfig& config);

/// Unimodal baseline in one modality: Euclidean ranking of the other test
/// points of that modality, and EER over sampled within-modality pairs.
EvalReport evaluate_euclidean(const MultimodalDataset& test, Modality modality,
                              const EvalConfig& config);

struct SweepConfig {
  std::vector<Method> methods{Method::kCmdif, Method::kMmkdif};
  std::vector<std::size_t> lengths{25, 50};
  TrainConfig train;
  EvalConfig eval;
  /// Substitute m = min(n, n') for the linear method when m exceeds it,
  /// instead of emitting a capped row.
  bool paper_figure = false;
};

struct SweepRow {
  Method method = Method::kCmdif;
  std::size_t m_requested = 0;
  std::size_t m_used = 0;
  std::size_t num_classes = 0;
  double map = 0.0;
  double eer = 0.0;
  std::string status;  // "ok", "m capped", or "error: ..."
};

std::vector<SweepRow> run_sweep(const MultimodalDataset& train, const MultimodalDataset& test,
                                const SweepConfig& config);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace mmhash
