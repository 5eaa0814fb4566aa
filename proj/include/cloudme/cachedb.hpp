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

/// One syncfolder_table row: a local directory mirrored to the server.
struct SyncFolderRecord {
    std::int64_t folder_id = 0;
    std::int64_t owner_id = 0;
    std::string name;
    std::string local_path;
    std::string cloud_path;
    std::optional<Timestamp> created;
    std::optional<Timestamp> last_run;
    bool inactivated = false;
    bool encrypted = false;

    friend bool operator==(const SyncFolderRecord&, const SyncFolderRecord&) = default;
};

/// One syncfolder_folder_table row: tree structure of a sync folder. The
/// root folder keeps its original folder ID as its own child_folder_id.
struct FolderTreeEdge {
    std::int64_t root_folder_id = 0;
    std::int64_t folder_id = 0;
    std::int64_t child_folder_id = 0;
    std::string name;
    std::optional<Timestamp> creation_date;
    std::optional<std::string> deleted;  // absent when the column is NULL
    std::int64_t owner_id = 0;

    friend bool operator==(const FolderTreeEdge&, const FolderTreeEdge&) = default;
};

/// One syncfolder_document_table row: a synced file.
struct SyncFileRecord {
    std::int64_t document_id = 0;
    std::int64_t folder_id = 0;
    std::int64_t root_folder_id = 0;
    std::int64_t owner_id = 0;
    std::string name;
    std::int64_t size = 0;
    std::optional<Timestamp> modified_date;
    std::string checksum;       // MD5 hex, possibly empty
    std::string main_checksum;  // MD5 hex, possibly empty

    friend bool operator==(const SyncFileRecord&, const SyncFileRecord&) = default;
};

/// One output row of the synchronisation-history join, column-for-column.
struct SyncHistoryRow {
    std::string owner_name;
    std::int64_t sync_folder_id = 0;
    std::int64_t sync_file_id = 0;
    std::string sync_file_name;
    std::string sync_folder_path;
    std::int64_t file_size = 0;
    std::optional<Timestamp> file_modified;
    std::optional<Timestamp> folder_created;
    std::optional<Timestamp> folder_last_sync;
    std::optional<std::string> folder_deleted;
    bool folder_inactivated = false;
    bool folder_encrypted = false;

    friend bool operator==(const SyncHistoryRow&, const SyncHistoryRow&) = default;
};

/// Column headers of the synchronisation-history output, in order.
extern const std::vector<std::string> kSyncHistoryHeaders;

struct CacheDb {
    std::vector<Account> accounts;
    std::vector<SyncFolderRecord> folders;
    std::vector<FolderTreeEdge> tree;
    std::vector<SyncFileRecord> files;
    std::vector<std::string> warnings;
    std::string path;
};

/// Enumerate the four tables of forensic interest from a desktop cache.db.
/// Missing tables yield empty lists plus a warning; unknown columns are
/// ignored. Throws sqlite::NotSqlite / sqlite::SchemaMismatch.
CacheDb parse_cachedb(const std::filesystem::path& file);

struct SyncHistory {
    std::vector<SyncHistoryRow> rows;
    std::size_t dropped = 0;  // files excluded by inner-join semantics
};

/// The three-way inner join over files, tree edges, folders and accounts:
/// files.folder_id = tree.child_folder_id, folders.folder_id =
/// files.root_folder_id, accounts.user_id = files.owner. Row order follows
/// the files table.
SyncHistory join_sync_history(const CacheDb& db);

/// Normalize joined rows into timeline events: FileModified per file,
/// SyncCompleted per distinct folder, FolderInactivated where flagged,
/// IdentityFound per account.
std::vector<ForensicEvent> events_from_cachedb(const SyncHistory& history,
                                               const std::vector<Account>& accounts,
                                               const EvidenceRef& source);

std::string sync_history_row_to_jsonl(const SyncHistoryRow& row);
std::string sync_history_row_to_csv(const SyncHistoryRow& row);
std::string sync_history_csv_header();

}  // namespace cloudme
