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

#include "mmhash/codec.hpp"

#include <bit>
#include <cstdio>
#include <fstream>

namespace mmhash {

BinaryCode::BinaryCode(std::size_t length) : length_(length), words_((length + 63) / 64, 0) {}

BinaryCode BinaryCode::from_signs(std::span<const int> signs) {
  BinaryCode code(signs.size());
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) throw Error("BinaryCode: entries must be +1 or -1");
    code.set(i, signs[i] == 1);
  }
  return code;
}

void BinaryCode::set(std::size_t i, bool positive) {
  const std::uint64_t mask = std::uint64_t{1} << (i % 64);
  if (positive) {
    words_[i / 64] |= mask;
  } else {
    words_[i / 64] &= ~mask;
  }
}

std::string BinaryCode::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t bytes = (length_ + 7) / 8;
  std::string out;
  out.reserve(2 * bytes);
  for (std::size_t k = 0; k < bytes; ++k) {
    const auto byte = static_cast<unsigned>((words_[k / 8] >> (8 * (k % 8))) & 0xffu);
    out.push_back(kDigits[byte >> 4]);
    out.push_back(kDigits[byte & 0xfu]);
  }
  return out;
}

BinaryCode BinaryCode::from_hex(std::string_view hex, std::size_t length) {
  const std::size_t bytes = (length + 7) / 8;
  if (hex.size() != 2 * bytes) {
    throw Error("BinaryCode: expected " + std::to_string(2 * bytes) + " hex digits for length " +
                std::to_string(length) + ", got " + std::to_string(hex.size()));
  }
  const auto digit = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
    throw Error(std::string("BinaryCode: invalid hex digit '") + c + "'");
  };
  BinaryCode code(length);
  for (std::size_t k = 0; k < bytes; ++k) {
    const std::uint64_t byte = (digit(hex[2 * k]) << 4) | digit(hex[2 * k + 1]);
    code.words_[k / 8] |= byte << (8 * (k % 8));
  }
  if (length % 64 != 0 && !code.words_.empty() &&
      (code.words_.back() >> (length % 64)) != 0) {
    throw Error("BinaryCode: nonzero pad bits");
  }
  return code;
}

std::size_t hamming(const BinaryCode& c1, const BinaryCode& c2) {
  if (c1.length() != c2.length()) {
    throw Error("hamming: code lengths differ (" + std::to_string(c1.length()) + " vs " +
                std::to_string(c2.length()) + ")");
  }
  std::size_t d = 0;
  const auto& w1 = c1.words();
  const auto& w2 = c2.words();
  for (std::size_t k = 0; k < w1.size(); ++k) d += static_cast<std::size_t>(std::popcount(w1[k] ^ w2[k]));
  return d;
}

namespace {

BinaryCode signs_of(const Vector& response) {
  BinaryCode code(static_cast<std::size_t>(response.size()));
  for (Eigen::Index i = 0; i < response.size(); ++i) {
    code.set(static_cast<std::size_t>(i), !(response[i] < 0.0));
  }
  return code;
}

void require_dim(std::size_t expected, Eigen::Index got) {
  if (static_cast<std::size_t>(got) != expected) {
    throw Error("encode: point has dimension " + std::to_string(got) + ", model expects " +
                std::to_string(expected));
  }
}

Vector kernel_vector(const Matrix& bases, const KernelSpec& spec, const Eigen::Ref<const Vector>& v) {
  Vector k(bases.cols());
  for (Eigen::Index i = 0; i < bases.cols(); ++i) k[i] = spec(bases.col(i), v);
  return k;
}

}  // namespace

BinaryCode encode_linear(const LinearHashModel& model, const Eigen::Ref<const Vector>& v,
                         Modality modality) {
  if (modality == Modality::X) {
    require_dim(model.dim_x(), v.size());
    return signs_of(model.p * v + model.a);
  }
  require_dim(model.dim_y(), v.size());
  return signs_of(model.q * v + model.b);
}

BinaryCode encode_kernel(const KernelHashModel& model, const Eigen::Ref<const Vector>& v,
                         Modality modality) {
  if (modality == Modality::X) {
    require_dim(model.dim_x(), v.size());
    return signs_of(model.a_coef * kernel_vector(model.bases_x, model.kernel_x, v) + model.a);
  }
  require_dim(model.dim_y(), v.size());
  return signs_of(model.b_coef * kernel_vector(model.bases_y, model.kernel_y, v) + model.b);
}

std::vector<BinaryCode> encode_all(const LinearHashModel& model, const Matrix& points,
                                   Modality modality) {
  std::vector<BinaryCode> out;
  out.reserve(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index j = 0; j < points.cols(); ++j) out.push_back(encode_linear(model, points.col(j), modality));
  return out;
}

std::vector<BinaryCode> encode_all(const KernelHashModel& model, const Matrix& points,
                                   Modality modality) {
  std::vector<BinaryCode> out;
  out.reserve(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index j = 0; j < points.cols(); ++j) out.push_back(encode_kernel(model, points.col(j), modality));
  return out;
}

void write_codes(const std::vector<BinaryCode>& codes, std::size_t length, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "# mmhash-codes m=" << length << " count=" << codes.size() << '\n';
  for (const auto& c : codes) {
    if (c.length() != length) throw Error("write_codes: inconsistent code length");
    out << c.to_hex() << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

std::vector<BinaryCode> read_codes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::size_t length = 0, count = 0;
  if (std::sscanf(header.c_str(), "# mmhash-codes m=%zu count=%zu", &length, &count) != 2) {
    throw Error(path + ":1: bad codes header");
  }
  std::vector<BinaryCode> codes;
  codes.reserve(count);
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      codes.push_back(BinaryCode::from_hex(line, length));
    } catch (const Error& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (codes.size() != count) throw Error(path + ": header says " + std::to_string(count) + " codes");
  return codes;
}

}  // namespace mmhash
