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
#include <optional>
#include <ostream>
#include <vector>

#include "mmhash/codec.hpp"

namespace mmhash {

struct Neighbor {
  std::uint64_t id = 0;
  std::size_t distance = 0;

  bool operator==(const Neighbor&) const = default;
};

/// Exact Hamming-space database: linear scan, ties broken by ascending id.
class CodeIndex {
 public:
  CodeIndex(std::vector<BinaryCode> codes, std::vector<std::uint64_t> ids,
            std::optional<std::vector<int>> labels = std::nullopt);

  std::size_t size() const { return codes_.size(); }
  std::size_t code_length() const { return length_; }
  const std::vector<BinaryCode>& codes() const { return codes_; }
  const std::vector<std::uint64_t>& ids() const { return ids_; }
  const std::optional<std::vector<int>>& labels() const { return labels_; }

  /// Label of the entry with the given position in insertion order.
  int label_at(std::size_t position) const;

  std::vector<Neighbor> knn(const BinaryCode& query, std::size_t k) const;
  std::vector<Neighbor> rank_all(const BinaryCode& query) const { return knn(query, size()); }

  /// Same as rank_all but returns insertion positions instead of ids.
  std::vector<std::size_t> rank_positions(const BinaryCode& query) const;

 private:
  std::vector<BinaryCode> codes_;
  std::vector<std::uint64_t> ids_;
  std::optional<std::vector<int>> labels_;
  std::vector<std::size_t> by_id_;  // positions sorted by ascending id
  std::size_t length_ = 0;
};

inline CodeIndex build_index(std::vector<BinaryCode> codes, std::vector<std::uint64_t> ids,
                             std::optional<std::vector<int>> labels = std::nullopt) {
  return CodeIndex(std::move(codes), std::move(ids), std::move(labels));
}

/// CSV with header "query_id,rank,db_id,distance"; rank starts at 1.
void write_rankings_csv(std::ostream& out, const std::vector<std::uint64_t>& query_ids,
                        const std::vector<std::vector<Neighbor>>& rankings);

}  // namespace mmhash
