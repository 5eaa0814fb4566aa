// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace cloudme {

/// Compact dump that survives non-UTF-8 evidence bytes (filenames, carved
/// text) by substituting U+FFFD instead of throwing.
inline std::string dump_compact(const nlohmann::ordered_json& j) {
    return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

}  // namespace cloudme
