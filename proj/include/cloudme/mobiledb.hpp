// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cloudme/model.hpp"

namespace cloudme {

/// Android db.sdb 'files' row: one sync file viewed by the user.
struct MobileFileRow {
    std::int64_t id = 0;
    std::string name;
    std::int64_t folder_id = 0;
    std::int64_t size = 0;
    std::string href;
    std::optional<Timestamp> published;
    std::optional<Timestamp> updated;
    std::string owner;
    std::string mime;

    friend bool operator==(const MobileFileRow&, const MobileFileRow&) = default;
};

/// Android db.sdb 'folders' row.
struct MobileFolderRow {
    std::int64_t folder_id = 0;
    std::string name;
    std::string owner;
    std::string parent;
    bool is_root = false;
    std::string path;  // xios:// scheme in conforming evidence

    friend bool operator==(const MobileFolderRow&, const MobileFolderRow&) = default;
};

struct DbSdb {
    std::vector<MobileFileRow> files;
    std::vector<MobileFolderRow> folders;
    std::vector<std::string> warnings;
    std::string path;
};

/// Enumerate the 'files' and 'folders' tables of an Android db.sdb. Column
/// names are matched case-insensitively (evidence spells them both ways).
DbSdb parse_dbsdb(const std::filesystem::path& file);

/// One row of the file-view-history join (files INNER JOIN folders ON
/// folder_id), column-for-column.
struct FileViewRow {
    std::string owner;
    std::string filename;
    std::int64_t file_size = 0;
    std::string folder_name;
    std::string url;
    std::optional<Timestamp> published;
    std::optional<Timestamp> updated;
    std::string file_type;
    std::string origin;

    friend bool operator==(const FileViewRow&, const FileViewRow&) = default;
};

extern const std::vector<std::string> kFileViewHeaders;

struct FileViewHistory {
    std::vector<FileViewRow> rows;
    std::size_t dropped = 0;
};

FileViewHistory join_file_view_history(const DbSdb& db);

std::vector<ForensicEvent> events_from_dbsdb(const FileViewHistory& history,
                                             const EvidenceRef& source);

std::string file_view_row_to_jsonl(const FileViewRow& row);
std::string file_view_row_to_csv(const FileViewRow& row);
std::string file_view_csv_header();

/// One cached HTTP response from the iOS nsurlcache Cache.db: request URL,
/// fetch time and the response body bit-exact.
struct CachedResponse {
    std::string url;
    std::optional<Timestamp> fetched;
    std::vector<std::uint8_t> body;

    friend bool operator==(const CachedResponse&, const CachedResponse&) = default;
};

struct NsUrlCache {
    std::vector<CachedResponse> responses;
    std::vector<std::string> warnings;
    std::string path;
};

/// Join cfurl_cache_receiver_data with cfurl_cache_response on entry_ID.
/// time_stamp accepts datetime text or a numeric epoch (seconds below 1e11,
/// milliseconds otherwise).
NsUrlCache parse_nsurlcache(const std::filesystem::path& file);

}  // namespace cloudme
