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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "mmhash/numerics.hpp"

namespace mmhash {

enum class Modality { X, Y };

/// Parameters of the synthetic two-modality class-mixture generator.
struct SynthConfig {
  std::size_t n = 128;
  std::size_t n_prime = 64;
  std::size_t num_classes = 25;
  std::size_t points_per_class_x = 200;
  std::size_t points_per_class_y = 200;
  double noise_std_low = 3.0;
  double noise_std_high = 6.0;
  double center_std = 10.0;
  std::uint64_t seed = 1;

  /// Throws Error naming the first violated constraint.
  void validate() const;
};

/// Two labeled point sets. Points are stored as columns.
struct MultimodalDataset {
  Matrix x;                        // n x |X|
  Matrix y;                        // n' x |Y|
  std::vector<int> labels_x;
  std::vector<int> labels_y;
  Vector diag_cov_x;               // per-dimension noise variance, modality X
  Vector diag_cov_y;
  std::size_t num_classes = 0;
  std::uint64_t seed = 0;          // generator seed, 0 when loaded from foreign data

  std::size_t dim_x() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t dim_y() const { return static_cast<std::size_t>(y.rows()); }
  std::size_t size_x() const { return static_cast<std::size_t>(x.cols()); }
  std::size_t size_y() const { return static_cast<std::size_t>(y.cols()); }

  const Matrix& points(Modality m) const { return m == Modality::X ? x : y; }
  const std::vector<int>& labels(Modality m) const { return m == Modality::X ? labels_x : labels_y; }
  const Vector& diag_cov(Modality m) const { return m == Modality::X ? diag_cov_x : diag_cov_y; }

  /// Checks shapes, label range and positive variances.
  void validate() const;

  bool operator==(const MultimodalDataset& other) const;
};

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Sampled positive (same-class) and negative (different-class) (x, y) index pairs.
struct PairSample {
  std::vector<IndexPair> positives;
  std::vector<IndexPair> negatives;
};

MultimodalDataset generate_synthetic(const SynthConfig& config);

/// Train and test sets drawn around the same class centers. The train part is
/// identical to generate_synthetic(config); the test part continues the same
/// random stream with `test_points_per_class` points per class and modality.
std::pair<MultimodalDataset, MultimodalDataset> generate_synthetic_split(
    const SynthConfig& config, std::size_t test_points_per_class);

/// Uniform sampling with replacement over all same-class (resp. different-class)
/// cross-modal index pairs.
PairSample sample_pairs(const MultimodalDataset& dataset, std::size_t num_pos,
                        std::size_t num_neg, std::uint64_t seed);

struct DatasetPaths {
  std::filesystem::path x;
  std::filesystem::path y;
  std::filesystem::path labels_x;
  std::filesystem::path labels_y;
  std::optional<std::filesystem::path> manifest;

  /// Standard file names inside a dataset directory.
  static DatasetPaths in_directory(const std::filesystem::path& dir);
};

/// Reads a dataset. Without a manifest, the class count is max label + 1 and
/// the variances are pooled within-class sample variances.
MultimodalDataset load_csv(const DatasetPaths& paths);
MultimodalDataset load_csv(const std::filesystem::path& dir);

/// Writes x.csv, y.csv, labels_x.csv, labels_y.csv and manifest.txt into `dir`.
void save_csv(const MultimodalDataset& dataset, const std::filesystem::path& dir);

/// Reads a whole numeric CSV file, one row per point. Used for the data files.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path);

}  // namespace mmhash
