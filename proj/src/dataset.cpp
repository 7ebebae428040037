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

#include "mmhash/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace mmhash {

void SynthConfig::validate() const {
  if (n < 1) throw Error("synth config: n must be >= 1");
  if (n_prime < 1) throw Error("synth config: n_prime must be >= 1");
  if (num_classes < 1) throw Error("synth config: num_classes must be >= 1");
  if (points_per_class_x < 1 || points_per_class_y < 1) {
    throw Error("synth config: points per class must be >= 1");
  }
  if (!(noise_std_low > 0.0) || !(noise_std_low <= noise_std_high)) {
    throw Error("synth config: noise std range must satisfy 0 < low <= high");
  }
  if (!(center_std > 0.0)) throw Error("synth config: center_std must be > 0");
}

void MultimodalDataset::validate() const {
  if (labels_x.size() != size_x()) throw Error("dataset: X label count does not match points");
  if (labels_y.size() != size_y()) throw Error("dataset: Y label count does not match points");
  if (static_cast<std::size_t>(diag_cov_x.size()) != dim_x() ||
      static_cast<std::size_t>(diag_cov_y.size()) != dim_y()) {
    throw Error("dataset: variance vector has wrong dimension");
  }
  if ((diag_cov_x.array() <= 0.0).any() || (diag_cov_y.array() <= 0.0).any()) {
    throw Error("dataset: variances must be > 0");
  }
  const auto in_range = [this](int l) { return l >= 0 && static_cast<std::size_t>(l) < num_classes; };
  if (!std::all_of(labels_x.begin(), labels_x.end(), in_range) ||
      !std::all_of(labels_y.begin(), labels_y.end(), in_range)) {
    throw Error("dataset: label outside [0, num_classes)");
  }
  require_finite(x, "dataset X");
  require_finite(y, "dataset Y");
}

bool MultimodalDataset::operator==(const MultimodalDataset& o) const {
  return x.rows() == o.x.rows() && x.cols() == o.x.cols() && x == o.x &&
         y.rows() == o.y.rows() && y.cols() == o.y.cols() && y == o.y &&
         labels_x == o.labels_x && labels_y == o.labels_y &&
         diag_cov_x.size() == o.diag_cov_x.size() && diag_cov_x == o.diag_cov_x &&
         diag_cov_y.size() == o.diag_cov_y.size() && diag_cov_y == o.diag_cov_y &&
         num_classes == o.num_classes && seed == o.seed;
}

namespace {

struct Mixture {
  Matrix centers_x;  // n x K
  Matrix centers_y;
  Vector std_x;
  Vector std_y;
};

Mixture draw_mixture(const SynthConfig& c, Rng& rng) {
  Mixture mix;
  mix.centers_x.resize(c.n, c.num_classes);
  mix.centers_y.resize(c.n_prime, c.num_classes);
  for (std::size_t k = 0; k < c.num_classes; ++k) {
    for (std::size_t i = 0; i < c.n; ++i) mix.centers_x(i, k) = c.center_std * rng.normal();
  }
  for (std::size_t k = 0; k < c.num_classes; ++k) {
    for (std::size_t i = 0; i < c.n_prime; ++i) mix.centers_y(i, k) = c.center_std * rng.normal();
  }
  mix.std_x.resize(c.n);
  mix.std_y.resize(c.n_prime);
  for (std::size_t i = 0; i < c.n; ++i) mix.std_x[i] = rng.uniform(c.noise_std_low, c.noise_std_high);
  for (std::size_t i = 0; i < c.n_prime; ++i) mix.std_y[i] = rng.uniform(c.noise_std_low, c.noise_std_high);
  return mix;
}

// Class-major: all points of class 0, then class 1, ...
void draw_points(const Matrix& centers, const Vector& stds, std::size_t per_class, Rng& rng,
                 Matrix& points, std::vector<int>& labels) {
  const auto dim = centers.rows();
  const auto classes = static_cast<std::size_t>(centers.cols());
  points.resize(dim, static_cast<Eigen::Index>(classes * per_class));
  labels.resize(classes * per_class);
  Eigen::Index col = 0;
  for (std::size_t k = 0; k < classes; ++k) {
    for (std::size_t p = 0; p < per_class; ++p, ++col) {
      for (Eigen::Index i = 0; i < dim; ++i) {
        points(i, col) = centers(i, static_cast<Eigen::Index>(k)) + stds[i] * rng.normal();
      }
      labels[static_cast<std::size_t>(col)] = static_cast<int>(k);
    }
  }
}

MultimodalDataset draw_dataset(const SynthConfig& c, const Mixture& mix, std::size_t ppc_x,
                               std::size_t ppc_y, Rng& rng) {
  MultimodalDataset d;
  draw_points(mix.centers_x, mix.std_x, ppc_x, rng, d.x, d.labels_x);
  draw_points(mix.centers_y, mix.std_y, ppc_y, rng, d.y, d.labels_y);
  d.diag_cov_x = mix.std_x.array().square();
  d.diag_cov_y = mix.std_y.array().square();
  d.num_classes = c.num_classes;
  d.seed = c.seed;
  return d;
}

}  // namespace

MultimodalDataset generate_synthetic(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const Mixture mix = draw_mixture(config, rng);
  return draw_dataset(config, mix, config.points_per_class_x, config.points_per_class_y, rng);
}

std::pair<MultimodalDataset, MultimodalDataset> generate_synthetic_split(
    const SynthConfig& config, std::size_t test_points_per_class) {
  config.validate();
  if (test_points_per_class < 1) throw Error("synth config: test points per class must be >= 1");
  Rng rng(config.seed);
  const Mixture mix = draw_mixture(config, rng);
  auto train = draw_dataset(config, mix, config.points_per_class_x, config.points_per_class_y, rng);
  auto test = draw_dataset(config, mix, test_points_per_class, test_points_per_class, rng);
  return {std::move(train), std::move(test)};
}

PairSample sample_pairs(const MultimodalDataset& dataset, std::size_t num_pos,
                        std::size_t num_neg, std::uint64_t seed) {
  PairSample out;
  if (num_pos == 0 && num_neg == 0) return out;
  if (dataset.size_x() == 0 || dataset.size_y() == 0) throw Error("sample_pairs: empty modality");

  std::map<int, std::vector<std::size_t>> by_class_x, by_class_y;
  for (std::size_t i = 0; i < dataset.size_x(); ++i) by_class_x[dataset.labels_x[i]].push_back(i);
  for (std::size_t j = 0; j < dataset.size_y(); ++j) by_class_y[dataset.labels_y[j]].push_back(j);

  // Classes present in both modalities with their positive-pair counts.
  struct Block {
    const std::vector<std::size_t>* xs;
    const std::vector<std::size_t>* ys;
    std::uint64_t count;
  };
  std::vector<Block> blocks;
  std::uint64_t total_pos = 0;
  for (const auto& [label, xs] : by_class_x) {
    const auto it = by_class_y.find(label);
    if (it == by_class_y.end()) continue;
    const std::uint64_t count = xs.size() * it->second.size();
    blocks.push_back({&xs, &it->second, count});
    total_pos += count;
  }
  const std::uint64_t total = static_cast<std::uint64_t>(dataset.size_x()) * dataset.size_y();
  if (num_pos > 0 && total_pos == 0) throw Error("sample_pairs: no positive pairs exist");
  if (num_neg > 0 && total_pos == total) throw Error("sample_pairs: no negative pairs exist");

  Rng rng(seed);
  out.positives.reserve(num_pos);
  for (std::size_t s = 0; s < num_pos; ++s) {
    std::uint64_t r = rng.below(total_pos);
    for (const auto& b : blocks) {
      if (r < b.count) {
        const auto ny = b.ys->size();
        out.positives.emplace_back((*b.xs)[r / ny], (*b.ys)[r % ny]);
        break;
      }
      r -= b.count;
    }
  }
  out.negatives.reserve(num_neg);
  while (out.negatives.size() < num_neg) {
    const auto i = static_cast<std::size_t>(rng.below(dataset.size_x()));
    const auto j = static_cast<std::size_t>(rng.below(dataset.size_y()));
    if (dataset.labels_x[i] != dataset.labels_y[j]) out.negatives.emplace_back(i, j);
  }
  return out;
}

DatasetPaths DatasetPaths::in_directory(const std::filesystem::path& dir) {
  return {dir / "x.csv", dir / "y.csv", dir / "labels_x.csv", dir / "labels_y.csv",
          dir / "manifest.txt"};
}

namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.filename().string() + ":" + std::to_string(line);
}

double parse_double(std::string_view cell, const std::filesystem::path& path, std::size_t line) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
    cell.remove_suffix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(value)) {
    throw Error(where(path, line) + ": not a finite number: '" + std::string(cell) + "'");
  }
  return value;
}

std::vector<double> split_row(const std::string& text, const std::filesystem::path& path,
                              std::size_t line) {
  std::vector<double> row;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string::npos ? text.size() : comma;
    row.push_back(parse_double(std::string_view(text).substr(start, end - start), path, line));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return row;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

Matrix rows_to_columns(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(rows.front().size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i < rows[j].size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[j][i];
  }
  return m;
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<int> labels;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (blank(text)) continue;
    std::string_view cell(text);
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.remove_suffix(1);
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() || value < 0) {
      throw Error(where(path, line) + ": label must be a nonnegative integer: '" + std::string(cell) + "'");
    }
    labels.push_back(value);
  }
  return labels;
}

std::map<std::string, std::string> read_manifest(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::map<std::string, std::string> kv;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (blank(text) || text.front() == '#') continue;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw Error(where(path, line) + ": expected key=value");
    kv[text.substr(0, eq)] = text.substr(eq + 1);
  }
  return kv;
}

Vector pooled_within_class_variance(const Matrix& points, const std::vector<int>& labels) {
  const auto dim = points.rows();
  std::map<int, std::pair<Vector, std::size_t>> sums;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    auto& [s, c] = sums.try_emplace(labels[j], Vector::Zero(dim), 0).first->second;
    s += points.col(static_cast<Eigen::Index>(j));
    ++c;
  }
  Vector var = Vector::Zero(dim);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const auto& [s, c] = sums.at(labels[j]);
    var += (points.col(static_cast<Eigen::Index>(j)) - s / static_cast<double>(c)).array().square().matrix();
  }
  const auto dof = static_cast<double>(labels.size() > sums.size() ? labels.size() - sums.size() : 1);
  var /= dof;
  return var.cwiseMax(1e-12);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_points(const Matrix& points, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (i) out << ',';
      out << format_double(points(i, j));
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

std::string join(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

}  // namespace

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (blank(text)) continue;
    auto row = split_row(text, path, line);
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(where(path, line) + ": expected " + std::to_string(rows.front().size()) +
                  " values, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

MultimodalDataset load_csv(const DatasetPaths& paths) {
  MultimodalDataset d;
  d.x = rows_to_columns(read_numeric_csv(paths.x));
  d.y = rows_to_columns(read_numeric_csv(paths.y));
  d.labels_x = read_labels(paths.labels_x);
  d.labels_y = read_labels(paths.labels_y);
  if (d.labels_x.size() != d.size_x()) {
    throw Error(paths.labels_x.filename().string() + ": " + std::to_string(d.labels_x.size()) +
                " labels for " + std::to_string(d.size_x()) + " points");
  }
  if (d.labels_y.size() != d.size_y()) {
    throw Error(paths.labels_y.filename().string() + ": " + std::to_string(d.labels_y.size()) +
                " labels for " + std::to_string(d.size_y()) + " points");
  }

  if (paths.manifest && std::filesystem::exists(*paths.manifest)) {
    const auto kv = read_manifest(*paths.manifest);
    const auto get = [&](const std::string& key) -> const std::string& {
      const auto it = kv.find(key);
      if (it == kv.end()) throw Error(paths.manifest->filename().string() + ": missing key " + key);
      return it->second;
    };
    const auto vec = [&](const std::string& key) {
      const auto values = split_row(get(key), *paths.manifest, 0);
      return Vector(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
    };
    d.num_classes = std::stoull(get("num_classes"));
    d.seed = std::stoull(get("seed"));
    d.diag_cov_x = vec("diag_cov_x");
    d.diag_cov_y = vec("diag_cov_y");
    if (std::stoull(get("n")) != d.dim_x() || std::stoull(get("n_prime")) != d.dim_y()) {
      throw Error(paths.manifest->filename().string() + ": dimensions disagree with data files");
    }
  } else {
    int max_label = -1;
    for (int l : d.labels_x) max_label = std::max(max_label, l);
    for (int l : d.labels_y) max_label = std::max(max_label, l);
    d.num_classes = static_cast<std::size_t>(max_label + 1);
    d.diag_cov_x = pooled_within_class_variance(d.x, d.labels_x);
    d.diag_cov_y = pooled_within_class_variance(d.y, d.labels_y);
  }
  d.validate();
  return d;
}

MultimodalDataset load_csv(const std::filesystem::path& dir) {
  return load_csv(DatasetPaths::in_directory(dir));
}

void save_csv(const MultimodalDataset& dataset, const std::filesystem::path& dir) {
  dataset.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());
  const auto paths = DatasetPaths::in_directory(dir);
  write_points(dataset.x, paths.x);
  write_points(dataset.y, paths.y);
  for (const auto& [labels, path] : {std::pair{&dataset.labels_x, paths.labels_x},
                                     std::pair{&dataset.labels_y, paths.labels_y}}) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    for (int l : *labels) out << l << '\n';
  }
  std::ofstream out(*paths.manifest);
  if (!out) throw Error("cannot write " + paths.manifest->string());
  out << "n=" << dataset.dim_x() << '\n'
      << "n_prime=" << dataset.dim_y() << '\n'
      << "num_classes=" << dataset.num_classes << '\n'
      << "seed=" << dataset.seed << '\n'
      << "count_x=" << dataset.size_x() << '\n'
      << "count_y=" << dataset.size_y() << '\n'
      << "diag_cov_x=" << join(dataset.diag_cov_x) << '\n'
      << "diag_cov_y=" << join(dataset.diag_cov_y) << '\n';
  if (!out) throw Error("write failed: " + paths.manifest->string());
}

}  // namespace mmhash
