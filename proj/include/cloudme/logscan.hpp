// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cloudme/model.hpp"

namespace cloudme {

enum class LogEventKind {
    LoggedIn,
    SyncRequestFailed,
    DownloadError,
    LocalFolderOpFailed,
    Unclassified,
};

std::string_view to_string(LogEventKind k);

/// One classified line from a CloudMe daily log. raw_line is verbatim;
/// lines without the datetime prefix are kept as continuations of the
/// event they follow.
struct LogEvent {
    Timestamp time;
    LogEventKind kind = LogEventKind::Unclassified;
    std::optional<std::string> username;
    std::optional<std::string> path;
    std::optional<std::string> url;
    std::optional<std::string> error_code;
    std::string raw_line;
    std::vector<std::string> continuations;

    friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

struct LogFile {
    /// Lines before the first prefixed line (rare; preserved for losslessness).
    std::vector<std::string> preamble;
    std::vector<LogEvent> events;
    std::string path;
};

/// True when the line starts with "YYYY-MM-DD HH:MM:SS:" (one or more
/// spaces may follow the closing colon).
bool has_log_prefix(std::string_view line);

/// Classify a single prefixed log line. Throws std::invalid_argument when
/// the prefix is missing.
LogEvent classify_log_line(std::string_view line);

LogFile parse_log_file(const std::filesystem::path& file);  // throws Unreadable
LogFile parse_log_text(std::string_view text, const std::string& origin_path = "");

/// Download-error URLs name the remote object as
/// /v1/users/<uid>/favorites/<favorite>/webshare/<subpath>.
struct FavoriteDownloadPath {
    std::int64_t user_id = 0;
    std::int64_t favorite_id = 0;
    std::string subpath;

    friend bool operator==(const FavoriteDownloadPath&, const FavoriteDownloadPath&) = default;
};

std::optional<FavoriteDownloadPath> parse_favorite_download_url(std::string_view url);

/// True for names like "2016-03-15.txt" (the daily log naming scheme).
bool is_daily_log_name(std::string_view filename);

std::vector<ForensicEvent> events_from_log(const LogFile& log, const EvidenceRef& source);

}  // namespace cloudme
