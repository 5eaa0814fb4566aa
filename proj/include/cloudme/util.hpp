// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cloudme {

std::string read_file_bytes(const std::filesystem::path& p);  // throws Unreadable

std::string to_lower_ascii(std::string_view s);
bool iequals_ascii(std::string_view a, std::string_view b);

std::vector<std::string> split(std::string_view s, char sep);

/// Percent-decode a URL component; invalid escapes are passed through.
std::string percent_decode(std::string_view s);

std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view s);

std::string hex_lower(const void* data, std::size_t n);

/// Best-effort UTF-16LE to UTF-8 conversion (surrogate pairs handled,
/// lone surrogates replaced with U+FFFD).
std::string utf16le_to_utf8(const std::uint8_t* data, std::size_t bytes);
std::string utf16be_to_utf8(const std::uint8_t* data, std::size_t bytes);

/// UTF-8 to UTF-16LE bytes (invalid sequences become U+FFFD).
std::vector<std::uint8_t> utf8_to_utf16le(std::string_view s);

/// Parse a full string as a decimal signed/unsigned 64-bit integer.
std::optional<std::int64_t> parse_i64(std::string_view s);
std::optional<std::uint64_t> parse_u64(std::string_view s);

}  // namespace cloudme
