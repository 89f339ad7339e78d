// Copyright 2026 The qconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace qconv::cli {

struct InputDigest {
    std::string path;
    std::string sha256;
};

/// Provenance record embedded in every file the CLI writes.
struct RunManifest {
    std::string command;
    nlohmann::ordered_json config;
    std::optional<std::uint64_t> seed;
    std::vector<InputDigest> inputs;
    std::string version;
    /// ISO-8601 UTC from SOURCE_DATE_EPOCH; left null otherwise so that
    /// repeated runs produce identical bytes.
    std::optional<std::string> timestamp;
};

std::string sha256_hex(std::string_view bytes);
InputDigest digest_file(const std::filesystem::path& path);
std::optional<std::string> timestamp_from_env();

nlohmann::ordered_json to_json(const RunManifest& m);

}  // namespace qconv::cli
