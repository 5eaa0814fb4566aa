// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cloudme/model.hpp"

namespace cloudme {

struct NotPlist : Error {
    explicit NotPlist(const std::string& why) : Error("not a property list: " + why) {}
};

struct TruncatedPlist : Error {
    explicit TruncatedPlist(const std::string& why) : Error("truncated property list: " + why) {}
};

struct UnsupportedObjectType : Error {
    explicit UnsupportedObjectType(unsigned code)
        : Error("unsupported binary plist object marker 0x" + [](unsigned c) {
              char buf[8];
              std::snprintf(buf, sizeof(buf), "%02X", c);
              return std::string(buf);
          }(code)),
          code(code) {}
    unsigned code;
};

/// Seconds since 2001-01-01T00:00:00Z, as stored in binary plists.
struct PlistDate {
    double apple_seconds = 0;

    Timestamp to_timestamp() const;
    friend bool operator==(const PlistDate&, const PlistDate&) = default;
};

/// A decoded property-list value tree. Dictionaries keep entry order.
struct PlistValue {
    using Array = std::vector<PlistValue>;
    struct DictEntry;
    using Dict = std::vector<DictEntry>;
    using Data = std::vector<std::uint8_t>;

    std::variant<std::nullptr_t, bool, std::int64_t, double, std::string, Data, PlistDate,
                 Array, Dict>
        v = nullptr;

    bool is_dict() const;
    const Dict* as_dict() const;
    const PlistValue* find(std::string_view key) const;  // dict lookup
    const std::string* as_string() const;
};

struct PlistValue::DictEntry {
    std::string key;
    PlistValue value;
};

bool operator==(const PlistValue& a, const PlistValue& b);
inline bool operator==(const PlistValue::DictEntry& a, const PlistValue::DictEntry& b) {
    return a.key == b.key && a.value == b.value;
}

/// Decode an XML ("<?xml"/"<plist") or binary ("bplist00") property list.
PlistValue parse_plist_bytes(std::string_view bytes);
PlistValue parse_plist(const std::filesystem::path& file);

/// Flatten a dictionary tree into dotted-key string entries, stringifying
/// scalar values. Nested {"startup": {"me": x}} and a literal "startup.me"
/// key both yield ("startup.me", x).
std::vector<std::pair<std::string, std::string>> flatten_plist_strings(const PlistValue& root);

}  // namespace cloudme
