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

#include "mmhash/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "mmhash/codec.hpp"
#include "mmhash/retrieval.hpp"

namespace mmhash {

std::string_view to_string(Method method) {
  return method == Method::kCmdif ? "cmdif" : "mmkdif";
}

Method parse_method(std::string_view text) {
  if (text == "cmdif") return Method::kCmdif;
  if (text == "mmkdif") return Method::kMmkdif;
  throw Error("unknown method '" + std::string(text) + "' (expected cmdif or mmkdif)");
}

std::string_view to_string(Direction d) { return d == Direction::kXtoY ? "x2y" : "y2x"; }

Direction parse_direction(std::string_view text) {
  if (text == "x2y") return Direction::kXtoY;
  if (text == "y2x") return Direction::kYtoX;
  throw Error("unknown direction '" + std::string(text) + "' (expected x2y or y2x)");
}

void TrainConfig::validate(const MultimodalDataset& train) const {
  train.validate();
  if (m == 0) throw Error("hash length m must be >= 1");
  if (!(gamma > 0.0)) throw Error("gamma must be > 0");
  if (levels < 2) throw Error("threshold grid levels must be >= 2");
  if (num_pos == 0 || num_neg == 0) throw Error("training needs positive and negative pairs");
  if (train.num_classes < 2) throw Error("training needs at least two classes");
  if (method == Method::kCmdif) {
    const auto cap = std::min(train.dim_x(), train.dim_y());
    if (m > cap) {
      throw Error("hash length m = " + std::to_string(m) + " exceeds min(n, n') = " +
                  std::to_string(cap) + "; linear projections must satisfy m <= min(n, n')");
    }
  } else {
    if (l == 0 || l_prime == 0) throw Error("basis sizes must be >= 1");
    if (l > train.size_x() || l_prime > train.size_y()) {
      throw Error("basis size exceeds the number of training points");
    }
    if (m > std::min(l, l_prime)) {
      throw Error("hash length m = " + std::to_string(m) +
                  " exceeds the number of the basis vectors min(l, l') = " +
                  std::to_string(std::min(l, l_prime)));
    }
    if (kernel_bandwidth < 0.0) throw Error("kernel bandwidth must be >= 0");
  }
}

nlohmann::ordered_json TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(method));
  j["m"] = m;
  j["gamma"] = gamma;
  j["levels"] = levels;
  j["mode"] = std::string(to_string(mode));
  j["rate_estimator"] = std::string(to_string(estimator));
  j["num_pos"] = num_pos;
  j["num_neg"] = num_neg;
  j["pair_seed"] = pair_seed;
  if (method == Method::kMmkdif) {
    j["l"] = l;
    j["l_prime"] = l_prime;
    j["basis_seed"] = basis_seed;
    j["kernel_bandwidth"] = kernel_bandwidth;
  }
  return j;
}

TrainOutcome run_training(const MultimodalDataset& train, const TrainConfig& config) {
  config.validate(train);
  const PairSample pairs = sample_pairs(train, config.num_pos, config.num_neg, config.pair_seed);
  ThresholdGrid grid;
  grid.levels = config.levels;

  TrainOutcome out;
  out.file.config = config.to_json();
  out.file.config["data_seed"] = train.seed;
  using Clock = std::chrono::steady_clock;
  if (config.method == Method::kCmdif) {
    CmdifOptions opt{config.m, config.gamma, grid, config.mode, config.estimator, false};
    const auto t0 = Clock::now();
    auto model = train_cmdif(train, pairs, opt);
    out.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    out.file.model = std::move(model);
  } else {
    const auto bases = select_bases(train, config.l, config.l_prime, config.basis_seed);
    const double bw_x = config.kernel_bandwidth > 0.0 ? config.kernel_bandwidth
                                                      : static_cast<double>(train.dim_x());
    const double bw_y = config.kernel_bandwidth > 0.0 ? config.kernel_bandwidth
                                                      : static_cast<double>(train.dim_y());
    const KernelSpec kx(train.diag_cov_x, bw_x);
    const KernelSpec ky(train.diag_cov_y, bw_y);
    MmkdifOptions opt{config.m, config.gamma, grid, config.mode, config.estimator};
    const auto t0 = Clock::now();
    auto model = train_mmkdif(train, pairs, bases.bases_x, bases.bases_y, kx, ky, opt);
    out.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    out.file.model = std::move(model);
  }
  return out;
}

namespace {

std::vector<BinaryCode> encode_points(const HashModel& model, const Matrix& points, Modality modality) {
  if (static_cast<std::size_t>(points.rows()) != model_dim(model, modality)) {
    throw Error("model expects dimension " + std::to_string(model_dim(model, modality)) +
                " for modality " + (modality == Modality::X ? "X" : "Y") + ", data has " +
                std::to_string(points.rows()));
  }
  return std::visit([&](const auto& m) { return encode_all(m, points, modality); }, model);
}

// Within-modality pairs (i != j) for the unimodal baseline.
PairSample sample_intra_pairs(const std::vector<int>& labels, std::size_t num_pos,
                              std::size_t num_neg, std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (n < 2) throw Error("baseline: need at least two points");
  Rng rng(seed);
  PairSample s;
  std::vector<std::size_t> count(static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1, 0);
  for (int l : labels) ++count[static_cast<std::size_t>(l)];
  const bool any_pos = std::any_of(count.begin(), count.end(), [](std::size_t c) { return c >= 2; });
  const bool any_neg = std::none_of(count.begin(), count.end(), [n](std::size_t c) { return c == n; });
  if (num_pos > 0 && !any_pos) throw Error("baseline: no positive pairs exist");
  if (num_neg > 0 && !any_neg) throw Error("baseline: no negative pairs exist");
  while (s.positives.size() < num_pos || s.negatives.size() < num_neg) {
    const auto i = static_cast<std::size_t>(rng.below(n));
    const auto j = static_cast<std::size_t>(rng.below(n));
    if (i == j) continue;
    if (labels[i] == labels[j]) {
      if (s.positives.size() < num_pos) s.positives.emplace_back(i, j);
    } else if (s.negatives.size() < num_neg) {
      s.negatives.emplace_back(i, j);
    }
  }
  return s;
}

std::vector<std::uint64_t> iota_ids(std::size_t n) {
  std::vector<std::uint64_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::uint64_t{0});
  return ids;
}

}  // namespace

EvalReport evaluate_model(const HashModel& model, const MultimodalDataset& test,
                          const EvalConfig& config) {
  test.validate();
  const Modality source = config.direction == Direction::kXtoY ? Modality::X : Modality::Y;
  const Modality target = source == Modality::X ? Modality::Y : Modality::X;
  const auto query_codes = encode_points(model, test.points(source), source);
  const auto db_codes = encode_points(model, test.points(target), target);
  const auto& query_labels = test.labels(source);
  const auto& db_labels = test.labels(target);

  const CodeIndex index = build_index(db_codes, iota_ids(db_codes.size()), db_labels);
  std::vector<std::vector<std::uint8_t>> rankings;
  rankings.reserve(query_codes.size());
  for (std::size_t q = 0; q < query_codes.size(); ++q) {
    const auto order = index.rank_positions(query_codes[q]);
    std::vector<std::uint8_t> rel(order.size());
    bool any = false;
    for (std::size_t r = 0; r < order.size(); ++r) {
      rel[r] = db_labels[order[r]] == query_labels[q];
      any = any || rel[r];
    }
    if (any) rankings.push_back(std::move(rel));
  }

  const auto pairs = sample_pairs(test, config.num_pos, config.num_neg, config.pair_seed);
  const auto& codes_x = source == Modality::X ? query_codes : db_codes;
  const auto& codes_y = source == Modality::X ? db_codes : query_codes;
  std::vector<double> pos, neg;
  pos.reserve(pairs.positives.size());
  neg.reserve(pairs.negatives.size());
  for (const auto& [i, j] : pairs.positives) pos.push_back(static_cast<double>(hamming(codes_x[i], codes_y[j])));
  for (const auto& [i, j] : pairs.negatives) neg.push_back(static_cast<double>(hamming(codes_x[i], codes_y[j])));

  EvalReport report;
  report.roc = roc_from_distances(pos, neg);
  report.eer = eer(report.roc);
  report.map = mean_average_precision(rankings);
  report.config = {{"method", std::string(method_name(model))},
                   {"direction", std::string(to_string(config.direction))},
                   {"m", std::to_string(model_length(model))},
                   {"K", std::to_string(test.num_classes)},
                   {"queries", std::to_string(rankings.size())},
                   {"database", std::to_string(db_codes.size())}};
  return report;
}

EvalReport evaluate_euclidean(const MultimodalDataset& test, Modality modality,
                              const EvalConfig& config) {
  test.validate();
  const Matrix& pts = test.points(modality);
  const auto& labels = test.labels(modality);
  const auto n = static_cast<std::size_t>(pts.cols());

  std::vector<std::vector<std::uint8_t>> rankings;
  rankings.reserve(n);
  std::vector<double> dist(n);
  std::vector<std::size_t> order(n);
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t j = 0; j < n; ++j) {
      dist[j] = (pts.col(static_cast<Eigen::Index>(j)) - pts.col(static_cast<Eigen::Index>(q))).squaredNorm();
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    });
    std::vector<std::uint8_t> rel;
    rel.reserve(n - 1);
    bool any = false;
    for (std::size_t j : order) {
      if (j == q) continue;
      rel.push_back(labels[j] == labels[q]);
      any = any || rel.back();
    }
    if (any) rankings.push_back(std::move(rel));
  }

  const auto pairs = sample_intra_pairs(labels, config.num_pos, config.num_neg, config.pair_seed);
  std::vector<double> pos, neg;
  for (const auto& [i, j] : pairs.positives) {
    pos.push_back((pts.col(static_cast<Eigen::Index>(i)) - pts.col(static_cast<Eigen::Index>(j))).norm());
  }
  for (const auto& [i, j] : pairs.negatives) {
    neg.push_back((pts.col(static_cast<Eigen::Index>(i)) - pts.col(static_cast<Eigen::Index>(j))).norm());
  }

  EvalReport report;
  report.roc = roc_from_distances(pos, neg);
  report.eer = eer(report.roc);
  report.map = mean_average_precision(rankings);
  report.config = {{"method", "euclidean"},
                   {"direction", modality == Modality::X ? "x2x" : "y2y"},
                   {"m", "0"},
                   {"K", std::to_string(test.num_classes)},
                   {"queries", std::to_string(rankings.size())},
                   {"database", std::to_string(n - 1)}};
  return report;
}

std::vector<SweepRow> run_sweep(const MultimodalDataset& train, const MultimodalDataset& test,
                                const SweepConfig& config) {
  if (config.lengths.empty()) throw Error("sweep: empty list of hash lengths");
  if (config.methods.empty()) throw Error("sweep: empty list of methods");
  const auto cap = std::min(train.dim_x(), train.dim_y());
  std::vector<SweepRow> rows;
  for (Method method : config.methods) {
    for (std::size_t m : config.lengths) {
      SweepRow row;
      row.method = method;
      row.m_requested = m;
      row.m_used = m;
      row.num_classes = train.num_classes;
      if (method == Method::kCmdif && m > cap) {
        if (!config.paper_figure) {
          row.m_used = 0;
          row.status = "m capped";
          rows.push_back(row);
          continue;
        }
        row.m_used = cap;
      }
      try {
        TrainConfig tc = config.train;
        tc.method = method;
        tc.m = row.m_used;
        const auto trained = run_training(train, tc);
        const auto report = evaluate_model(trained.file.model, test, config.eval);
        row.map = report.map;
        row.eer = report.eer;
        row.status = "ok";
      } catch (const Error& e) {
        row.status = std::string("error: ") + e.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "method,m_requested,m_used,K,map,eer,status\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    out << to_string(r.method) << ',' << r.m_requested << ',' << r.m_used << ',' << r.num_classes << ',';
    if (r.status == "ok") {
      out << format_real(r.map) << ',' << format_real(r.eer);
    } else {
      out << ',';
    }
    out << ',' << status << '\n';
  }
}

}  // namespace mmhash
