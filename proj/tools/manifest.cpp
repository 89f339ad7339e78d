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

#include "manifest.hpp"

#include <openssl/evp.h>

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <ctime>

#include "qconv/errors.hpp"
#include "qconv/io.hpp"

namespace qconv::cli {

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 0xF]);
    }
    return out;
}

InputDigest digest_file(const std::filesystem::path& path) { return {path.string(), sha256_hex(read_text_file(path))}; }

std::optional<std::string> timestamp_from_env() {
    const char* raw = std::getenv("SOURCE_DATE_EPOCH");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    std::int64_t secs = 0;
    const std::string_view s(raw);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), secs);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    const std::time_t t = static_cast<std::time_t>(secs);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
}

nlohmann::ordered_json to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["config"] = m.config;
    j["seed"] = m.seed ? nlohmann::ordered_json(*m.seed) : nlohmann::ordered_json(nullptr);
    auto inputs = nlohmann::ordered_json::array();
    for (const auto& d : m.inputs) inputs.push_back({{"path", d.path}, {"sha256", d.sha256}});
    j["inputs"] = std::move(inputs);
    j["version"] = m.version;
    j["timestamp"] = m.timestamp ? nlohmann::ordered_json(*m.timestamp) : nlohmann::ordered_json(nullptr);
    return j;
}

}  // namespace qconv::cli
