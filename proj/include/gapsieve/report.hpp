// Copyright 2026 The gapsieve Authors
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

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "json.hpp"

namespace gapsieve {

inline constexpr int kReportSchemaVersion = 1;

/// 64-bit FNV-1a, used as a content hash for reports.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Wraps a report body with its schema name and version and appends a
/// content hash over the compact serialization of everything before it.
inline nlohmann::ordered_json seal_report(std::string_view schema, const nlohmann::ordered_json& body) {
  nlohmann::ordered_json out;
  out["schema"] = std::string(schema);
  out["schema_version"] = kReportSchemaVersion;
  for (auto it = body.begin(); it != body.end(); ++it) out[it.key()] = it.value();
  out["content_hash"] = hex64(fnv1a64(out.dump()));
  return out;
}

}  // namespace gapsieve
