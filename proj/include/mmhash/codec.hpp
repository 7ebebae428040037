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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmhash/cmdif.hpp"
#include "mmhash/dataset.hpp"
#include "mmhash/mmkdif.hpp"

namespace mmhash {

/// An element of {-1, +1}^m, packed into 64-bit words.
///
/// Component i lives in bit (i % 64) of word (i / 64); a set bit is +1.
/// Pad bits past the length are always zero.
class BinaryCode {
 public:
  BinaryCode() = default;
  explicit BinaryCode(std::size_t length);

  /// From a list of +1 / -1 values. Any other value throws.
  static BinaryCode from_signs(std::span<const int> signs);

  std::size_t length() const { return length_; }
  const std::vector<std::uint64_t>& words() const { return words_; }

  int operator[](std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u ? 1 : -1; }
  void set(std::size_t i, bool positive);

  /// Bytes in little-endian order, two lowercase hex digits each,
  /// ceil(length / 8) bytes.
  std::string to_hex() const;
  static BinaryCode from_hex(std::string_view hex, std::size_t length);

  bool operator==(const BinaryCode&) const = default;

 private:
  std::size_t length_ = 0;
  std::vector<std::uint64_t> words_;
};

/// m/2 - (1/2) sum a_i b_i, via popcount of the XOR.
std::size_t hamming(const BinaryCode& c1, const BinaryCode& c2);

/// sign(P x + a) or sign(Q y + b); sign(0) = +1.
BinaryCode encode_linear(const LinearHashModel& model, const Eigen::Ref<const Vector>& v,
                         Modality modality);

/// sign(A kx + a) or sign(B ky + b), kx the kernel vector against the bases; sign(0) = +1.
BinaryCode encode_kernel(const KernelHashModel& model, const Eigen::Ref<const Vector>& v,
                         Modality modality);

/// Encodes every column of `points`.
std::vector<BinaryCode> encode_all(const LinearHashModel& model, const Matrix& points,
                                   Modality modality);
std::vector<BinaryCode> encode_all(const KernelHashModel& model, const Matrix& points,
                                   Modality modality);

/// Codes file: a header line "# mmhash-codes m=<m> count=<N>", then one hex code per line.
void write_codes(const std::vector<BinaryCode>& codes, std::size_t length, const std::string& path);
std::vector<BinaryCode> read_codes(const std::string& path);

}  // namespace mmhash
