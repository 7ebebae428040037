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

// Versioned JSON model files.
//
//   {
//     "format": "mmhash-model", "version": 1, "method": "cmdif" | "mmkdif",
//     "config": {...},            // training parameters, echoed verbatim
//     "model": {...},             // matrices as arrays of rows
//     "checksum": "<16 hex digits>"
//   }
//
// The checksum is FNV-1a 64 over the compact dump of the document with the
// checksum member removed. Floats are written in shortest round-trip form,
// so loading reproduces every value bit for bit.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"
#include "mmhash/cmdif.hpp"
#include "mmhash/mmkdif.hpp"

namespace mmhash {

using HashModel = std::variant<LinearHashModel, KernelHashModel>;

std::string_view method_name(const HashModel& model);

struct ModelFile {
  HashModel model;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
};

inline constexpr int kModelFormatVersion = 1;

std::uint64_t fnv1a64(std::string_view bytes);

nlohmann::ordered_json model_to_json(const ModelFile& file);
ModelFile model_from_json(const nlohmann::ordered_json& doc);

void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

std::size_t model_length(const HashModel& model);
std::size_t model_dim(const HashModel& model, Modality modality);

}  // namespace mmhash
