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

#include "mmhash/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mmhash {

using json = nlohmann::ordered_json;

std::string_view method_name(const HashModel& model) {
  return std::holds_alternative<LinearHashModel>(model) ? "cmdif" : "mmkdif";
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Matrix matrix_from_json(const json& j, const char* name, Eigen::Index cols_if_empty = 0) {
  if (!j.is_array()) throw Error(std::string("model file: ") + name + " is not an array");
  if (j.empty()) return Matrix(0, cols_if_empty);
  const auto cols = j.front().size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw Error(std::string("model file: ") + name + " has ragged rows");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) throw Error(std::string("model file: ") + name + " has a non-number");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
  }
  return m;
}

Vector vector_from_json(const json& j, const char* name) {
  if (!j.is_array()) throw Error(std::string("model file: ") + name + " is not an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(std::string("model file: ") + name + " has a non-number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

const json& member(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(std::string("model file: missing '") + key + "'");
  return *it;
}

json kernel_to_json(const KernelSpec& k) {
  return json{{"kind", "gaussian-mahalanobis"},
              {"diag_cov", vector_to_json(k.diag_cov())},
              {"bandwidth", k.bandwidth()}};
}

KernelSpec kernel_from_json(const json& j) {
  if (member(j, "kind") != "gaussian-mahalanobis") throw Error("model file: unsupported kernel kind");
  return KernelSpec(vector_from_json(member(j, "diag_cov"), "diag_cov"),
                    member(j, "bandwidth").get<double>());
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void check_shapes(const LinearHashModel& m) {
  const auto len = m.p.rows();
  if (m.q.rows() != len || m.a.size() != len || m.b.size() != len) {
    throw Error("model file: inconsistent linear model shapes");
  }
}

void check_shapes(const KernelHashModel& m) {
  const auto len = m.a_coef.rows();
  if (m.b_coef.rows() != len || m.a.size() != len || m.b.size() != len ||
      m.a_coef.cols() != m.bases_x.cols() || m.b_coef.cols() != m.bases_y.cols() ||
      static_cast<std::size_t>(m.bases_x.rows()) != m.kernel_x.dim() ||
      static_cast<std::size_t>(m.bases_y.rows()) != m.kernel_y.dim()) {
    throw Error("model file: inconsistent kernel model shapes");
  }
}

}  // namespace

json model_to_json(const ModelFile& file) {
  json doc;
  doc["format"] = "mmhash-model";
  doc["version"] = kModelFormatVersion;
  doc["method"] = std::string(method_name(file.model));
  doc["config"] = file.config;
  json body;
  std::visit(
      [&body](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        body["gamma"] = m.gamma;
        body["mode"] = std::string(to_string(m.mode));
        body["m"] = m.length();
        if constexpr (std::is_same_v<T, LinearHashModel>) {
          body["P"] = matrix_to_json(m.p);
          body["Q"] = matrix_to_json(m.q);
        } else {
          body["kernel_x"] = kernel_to_json(m.kernel_x);
          body["kernel_y"] = kernel_to_json(m.kernel_y);
          body["bases_x"] = matrix_to_json(m.bases_x.transpose());  // one basis point per row
          body["bases_y"] = matrix_to_json(m.bases_y.transpose());
          body["A"] = matrix_to_json(m.a_coef);
          body["B"] = matrix_to_json(m.b_coef);
        }
        body["a"] = vector_to_json(m.a);
        body["b"] = vector_to_json(m.b);
      },
      file.model);
  doc["model"] = std::move(body);
  doc["checksum"] = hex64(fnv1a64(doc.dump()));
  return doc;
}

ModelFile model_from_json(const json& doc) {
  if (!doc.is_object() || member(doc, "format") != "mmhash-model") {
    throw Error("model file: not an mmhash model");
  }
  if (member(doc, "version") != kModelFormatVersion) throw Error("model file: unsupported version");
  json unsigned_doc = doc;
  const std::string stored = member(doc, "checksum").get<std::string>();
  unsigned_doc.erase("checksum");
  if (hex64(fnv1a64(unsigned_doc.dump())) != stored) throw Error("model file: checksum mismatch");

  ModelFile file;
  file.config = member(doc, "config");
  const json& body = member(doc, "model");
  const std::string method = member(doc, "method").get<std::string>();
  const auto mode = parse_projection_mode(member(body, "mode").get<std::string>());
  const double gamma = member(body, "gamma").get<double>();
  if (method == "cmdif") {
    LinearHashModel m;
    m.p = matrix_from_json(member(body, "P"), "P");
    m.q = matrix_from_json(member(body, "Q"), "Q");
    m.a = vector_from_json(member(body, "a"), "a");
    m.b = vector_from_json(member(body, "b"), "b");
    m.gamma = gamma;
    m.mode = mode;
    check_shapes(m);
    file.model = std::move(m);
  } else if (method == "mmkdif") {
    KernelHashModel m;
    m.kernel_x = kernel_from_json(member(body, "kernel_x"));
    m.kernel_y = kernel_from_json(member(body, "kernel_y"));
    m.bases_x = matrix_from_json(member(body, "bases_x"), "bases_x").transpose();
    m.bases_y = matrix_from_json(member(body, "bases_y"), "bases_y").transpose();
    m.a_coef = matrix_from_json(member(body, "A"), "A");
    m.b_coef = matrix_from_json(member(body, "B"), "B");
    m.a = vector_from_json(member(body, "a"), "a");
    m.b = vector_from_json(member(body, "b"), "b");
    m.gamma = gamma;
    m.mode = mode;
    check_shapes(m);
    file.model = std::move(m);
  } else {
    throw Error("model file: unknown method '" + method + "'");
  }
  return file;
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << model_to_json(file).dump(1) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path.string() + ": invalid JSON: " + e.what());
  }
  try {
    return model_from_json(doc);
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::size_t model_length(const HashModel& model) {
  return std::visit([](const auto& m) { return m.length(); }, model);
}

std::size_t model_dim(const HashModel& model, Modality modality) {
  return std::visit([modality](const auto& m) { return modality == Modality::X ? m.dim_x() : m.dim_y(); }, model);
}

}  // namespace mmhash
