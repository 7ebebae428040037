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

#include "mmhash/retrieval.hpp"

#include <algorithm>
#include <numeric>

namespace mmhash {

CodeIndex::CodeIndex(std::vector<BinaryCode> codes, std::vector<std::uint64_t> ids,
                     std::optional<std::vector<int>> labels)
    : codes_(std::move(codes)), ids_(std::move(ids)), labels_(std::move(labels)) {
  if (codes_.size() != ids_.size()) throw Error("build_index: code and id counts differ");
  if (labels_ && labels_->size() != codes_.size()) throw Error("build_index: label count differs");
  if (!codes_.empty()) length_ = codes_.front().length();
  for (const auto& c : codes_) {
    if (c.length() != length_) throw Error("build_index: codes have different lengths");
  }
  by_id_.resize(ids_.size());
  std::iota(by_id_.begin(), by_id_.end(), std::size_t{0});
  std::sort(by_id_.begin(), by_id_.end(), [this](std::size_t a, std::size_t b) { return ids_[a] < ids_[b]; });
  for (std::size_t k = 1; k < by_id_.size(); ++k) {
    if (ids_[by_id_[k]] == ids_[by_id_[k - 1]]) {
      throw Error("build_index: duplicate id " + std::to_string(ids_[by_id_[k]]));
    }
  }
}

int CodeIndex::label_at(std::size_t position) const {
  if (!labels_) throw Error("index has no labels");
  return labels_->at(position);
}

std::vector<std::size_t> CodeIndex::rank_positions(const BinaryCode& query) const {
  if (codes_.empty()) throw Error("knn: empty index");
  if (query.length() != length_) throw Error("knn: query length does not match index");
  // Counting sort on distance; walking positions in id order keeps ties by id.
  std::vector<std::size_t> dist(codes_.size());
  std::vector<std::size_t> bucket(length_ + 2, 0);
  for (std::size_t p = 0; p < codes_.size(); ++p) {
    dist[p] = hamming(query, codes_[p]);
    ++bucket[dist[p] + 1];
  }
  for (std::size_t d = 1; d < bucket.size(); ++d) bucket[d] += bucket[d - 1];
  std::vector<std::size_t> order(codes_.size());
  for (std::size_t p : by_id_) order[bucket[dist[p]]++] = p;
  return order;
}

std::vector<Neighbor> CodeIndex::knn(const BinaryCode& query, std::size_t k) const {
  if (k == 0) throw Error("knn: k must be >= 1");
  const auto order = rank_positions(query);
  const std::size_t count = std::min(k, order.size());
  std::vector<Neighbor> out;
  out.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    out.push_back({ids_[order[r]], hamming(query, codes_[order[r]])});
  }
  return out;
}

void write_rankings_csv(std::ostream& out, const std::vector<std::uint64_t>& query_ids,
                        const std::vector<std::vector<Neighbor>>& rankings) {
  if (query_ids.size() != rankings.size()) throw Error("write_rankings_csv: size mismatch");
  out << "query_id,rank,db_id,distance\n";
  for (std::size_t q = 0; q < rankings.size(); ++q) {
    for (std::size_t r = 0; r < rankings[q].size(); ++r) {
      out << query_ids[q] << ',' << r + 1 << ',' << rankings[q][r].id << ',' << rankings[q][r].distance << '\n';
    }
  }
}

}  // namespace mmhash
