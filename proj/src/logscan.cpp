// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/logscan.hpp"

#include <stdexcept>

#include "cloudme/util.hpp"

namespace cloudme {

namespace {

constexpr std::size_t kPrefixLen = 20;  // "YYYY-MM-DD HH:MM:SS:"

// First "..." token in `s`, straight double quotes only.
std::optional<std::string> first_quoted(std::string_view s) {
    auto open = s.find('"');
    if (open == std::string_view::npos) return std::nullopt;
    auto close = s.find('"', open + 1);
    if (close == std::string_view::npos) return std::nullopt;
    return std::string(s.substr(open + 1, close - open - 1));
}

std::optional<std::string> quoted_after(std::string_view s, std::string_view marker) {
    auto pos = s.find(marker);
    if (pos == std::string_view::npos) return std::nullopt;
    return first_quoted(s.substr(pos + marker.size()));
}

// Whitespace-delimited token following `marker`.
std::optional<std::string> token_after(std::string_view s, std::string_view marker) {
    auto pos = s.find(marker);
    if (pos == std::string_view::npos) return std::nullopt;
    auto rest = s.substr(pos + marker.size());
    std::size_t start = 0;
    while (start < rest.size() && rest[start] == ' ') ++start;
    std::size_t end = start;
    while (end < rest.size() && rest[end] != ' ' && rest[end] != '"' && rest[end] != '\t')
        ++end;
    if (end == start) return std::nullopt;
    return std::string(rest.substr(start, end - start));
}

std::optional<std::string> digits_after(std::string_view s, std::string_view marker) {
    auto pos = s.find(marker);
    if (pos == std::string_view::npos) return std::nullopt;
    auto rest = s.substr(pos + marker.size());
    std::size_t start = 0;
    while (start < rest.size() && (rest[start] == ' ' || rest[start] == ':')) ++start;
    std::size_t end = start;
    while (end < rest.size() && rest[end] >= '0' && rest[end] <= '9') ++end;
    if (end == start) return std::nullopt;
    return std::string(rest.substr(start, end - start));
}

}  // namespace

std::string_view to_string(LogEventKind k) {
    switch (k) {
        case LogEventKind::LoggedIn: return "LoggedIn";
        case LogEventKind::SyncRequestFailed: return "SyncRequestFailed";
        case LogEventKind::DownloadError: return "DownloadError";
        case LogEventKind::LocalFolderOpFailed: return "LocalFolderOpFailed";
        case LogEventKind::Unclassified: return "Unclassified";
    }
    return "?";
}

bool has_log_prefix(std::string_view line) {
    if (line.size() < kPrefixLen || line[kPrefixLen - 1] != ':') return false;
    return try_normalize_timestamp(line.substr(0, kPrefixLen - 1), TimeHint::LogPrefix)
        .has_value();
}

LogEvent classify_log_line(std::string_view line) {
    // raw_line keeps the line verbatim (trailing CR included); matching runs
    // on a CR-stripped view.
    LogEvent ev;
    ev.raw_line = std::string(line);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!has_log_prefix(line))
        throw std::invalid_argument("log line lacks datetime prefix: " + std::string(line));

    ev.time = normalize_timestamp(line.substr(0, kPrefixLen - 1), TimeHint::LogPrefix);

    auto msg = line.substr(kPrefixLen);
    while (!msg.empty() && msg.front() == ' ') msg.remove_prefix(1);

    // First match wins.
    if (msg.find("Logged in as:") != std::string_view::npos) {
        ev.kind = LogEventKind::LoggedIn;
        ev.username = quoted_after(msg, "Logged in as:");
    } else if (msg.find("onSyncRequestFailed:") != std::string_view::npos) {
        ev.kind = LogEventKind::SyncRequestFailed;
        ev.path = quoted_after(msg, "onSyncRequestFailed:");
        ev.error_code = quoted_after(msg, "Error:");
    } else if (msg.find("Request error:") != std::string_view::npos &&
               msg.find("Error downloading") != std::string_view::npos) {
        ev.kind = LogEventKind::DownloadError;
        ev.url = token_after(msg, "Error downloading");
        ev.path = first_quoted(msg);
        ev.error_code = digits_after(msg, "Error number:");
    } else if (msg.find("addRemoveLocalFolder:Fail") != std::string_view::npos) {
        ev.kind = LogEventKind::LocalFolderOpFailed;
        ev.path = quoted_after(msg, "addRemoveLocalFolder:Fail");
    } else {
        ev.kind = LogEventKind::Unclassified;
    }
    return ev;
}

LogFile parse_log_text(std::string_view text, const std::string& origin_path) {
    LogFile out;
    out.path = origin_path;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        std::string_view line = eol == std::string_view::npos
                                    ? text.substr(pos)
                                    : text.substr(pos, eol - pos);
        auto stripped = line;
        if (!stripped.empty() && stripped.back() == '\r') stripped.remove_suffix(1);
        if (has_log_prefix(stripped)) {
            out.events.push_back(classify_log_line(line));
        } else if (!out.events.empty()) {
            out.events.back().continuations.emplace_back(line);
        } else {
            out.preamble.emplace_back(line);
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    return out;
}

LogFile parse_log_file(const std::filesystem::path& file) {
    auto text = read_file_bytes(file);
    return parse_log_text(text, file.string());
}

std::optional<FavoriteDownloadPath> parse_favorite_download_url(std::string_view url) {
    auto host_end = url.find("://");
    if (host_end == std::string_view::npos) return std::nullopt;
    auto path_start = url.find('/', host_end + 3);
    if (path_start == std::string_view::npos) return std::nullopt;
    auto segs = split(url.substr(path_start + 1), '/');
    if (segs.size() < 6 || segs[0] != "v1" || segs[1] != "users" || segs[3] != "favorites" ||
        segs[5] != "webshare")
        return std::nullopt;
    auto uid = parse_i64(segs[2]);
    auto fav = parse_i64(segs[4]);
    if (!uid || !fav) return std::nullopt;
    FavoriteDownloadPath out;
    out.user_id = *uid;
    out.favorite_id = *fav;
    for (std::size_t i = 6; i < segs.size(); ++i) {
        if (i > 6) out.subpath += "/";
        out.subpath += segs[i];
    }
    return out;
}

bool is_daily_log_name(std::string_view filename) {
    // ^\d{4}-\d{2}-\d{2}\.txt$
    if (filename.size() != 14 || filename.substr(10) != ".txt") return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (filename[i] < '0' || filename[i] > '9') return false;
    return filename[4] == '-' && filename[7] == '-';
}

std::vector<ForensicEvent> events_from_log(const LogFile& log, const EvidenceRef& source) {
    std::vector<ForensicEvent> events;
    for (const auto& ev : log.events) {
        ForensicEvent out;
        out.time = ev.time;
        out.source = source;
        switch (ev.kind) {
            case LogEventKind::LoggedIn:
                out.kind = EventKind::Login;
                out.actor = ev.username;
                break;
            case LogEventKind::SyncRequestFailed:
                out.kind = EventKind::SyncFailed;
                out.object = ev.path;
                set_attribute(out, "operation", "sync_request");
                break;
            case LogEventKind::DownloadError:
                out.kind = EventKind::SyncFailed;
                out.object = ev.path;
                set_attribute(out, "operation", "download");
                if (ev.url) {
                    set_attribute(out, "url", *ev.url);
                    if (auto remote = parse_favorite_download_url(*ev.url)) {
                        set_attribute(out, "user_id", std::to_string(remote->user_id));
                        set_attribute(out, "favorite_id", std::to_string(remote->favorite_id));
                        set_attribute(out, "remote_path", remote->subpath);
                    }
                }
                break;
            case LogEventKind::LocalFolderOpFailed:
                out.kind = EventKind::SyncFailed;
                out.object = ev.path;
                set_attribute(out, "operation", "local_folder_op");
                break;
            case LogEventKind::Unclassified:
                continue;  // no timeline value
        }
        if (ev.error_code) set_attribute(out, "error_code", *ev.error_code);
        events.push_back(std::move(out));
    }
    return events;
}

}  // namespace cloudme
