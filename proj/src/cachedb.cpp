// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/cachedb.hpp"

#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "cloudme/jsonx.hpp"

#include "cloudme/csv.hpp"
#include "cloudme/sqlite_reader.hpp"
#include "cloudme/util.hpp"

namespace cloudme {

namespace {

using sqlite::Value;

std::optional<Timestamp> cell_time(const Value& v, std::vector<std::string>& warnings,
                                   const std::string& context) {
    if (sqlite::is_null(v)) return std::nullopt;
    auto text = sqlite::value_to_display(v);
    auto t = try_normalize_timestamp(text, TimeHint::SqliteDatetime);
    if (!t) {
        t = try_normalize_any(text);
        if (!t) {
            warnings.push_back(context + ": undecodable datetime \"" + text + "\"");
            return std::nullopt;
        }
    }
    return t;
}

bool cell_bool(const Value& v) {
    // Stored as the literal strings "true"/"false" in cache.db.
    if (auto s = sqlite::as_text(v)) return iequals_ascii(*s, "true");
    if (auto i = sqlite::as_int(v)) return *i != 0;
    return false;
}

std::int64_t cell_int(const Value& v) {
    if (auto i = sqlite::as_int(v)) return *i;
    if (auto s = sqlite::as_text(v)) {
        if (auto i = parse_i64(*s)) return *i;
    }
    return 0;
}

std::string cell_text(const Value& v) { return sqlite::value_to_display(v); }

// Resolve the full required column list or throw SchemaMismatch.
std::vector<std::string> require_columns(const sqlite::Database& db, const std::string& table,
                                         const std::vector<std::string>& wanted) {
    std::vector<std::string> resolved;
    resolved.reserve(wanted.size());
    for (const auto& w : wanted) {
        auto real = db.resolve_column(table, w);
        if (!real) throw sqlite::SchemaMismatch(table, w);
        resolved.push_back(*real);
    }
    return resolved;
}

std::string opt_time_display(const std::optional<Timestamp>& t) {
    return t ? t->raw : "";
}

}  // namespace

const std::vector<std::string> kSyncHistoryHeaders = {
    "Owner Name",
    "Sync Folder ID",
    "Sync File ID",
    "Sync File Name",
    "Sync Folder Path",
    "File Size",
    "Sync File Last Modified Date",
    "Folder Creation Time",
    "Folder Last Sync Time",
    "Folder is Deleted",
    "Folder is inactivated",
    "Folder is encrypted",
};

CacheDb parse_cachedb(const std::filesystem::path& file) {
    auto db = sqlite::Database::open_readonly(file);
    CacheDb out;
    out.path = file.string();

    for (const auto& sib : sqlite::journal_siblings(file))
        out.warnings.push_back("journal sibling present (not replayed): " + sib.string());

    EvidenceRef source{file.string(), std::nullopt, ArtefactClass::Database};

    bool any_table = false;

    if (db.has_table("user_table")) {
        any_table = true;
        auto cols = require_columns(db, "user_table", {"user_id", "username"});
        auto dev = db.resolve_column("user_table", "devicename");
        auto created = db.resolve_column("user_table", "created");
        if (dev) cols.push_back(*dev);
        if (created) cols.push_back(*created);
        db.for_each_row("user_table", cols, [&](const std::vector<Value>& row) {
            Account a;
            a.user_id = cell_int(row[0]);
            a.username = cell_text(row[1]);
            std::size_t i = 2;
            if (dev && !sqlite::is_null(row[i])) a.device_name = cell_text(row[i]);
            if (dev) ++i;
            if (created) a.created = cell_time(row[i], out.warnings, "user_table.created");
            a.source = source;
            out.accounts.push_back(std::move(a));
        });
    } else {
        out.warnings.push_back("user_table missing");
    }

    if (db.has_table("syncfolder_table")) {
        any_table = true;
        auto cols = require_columns(db, "syncfolder_table",
                                    {"owner", "name", "local_path", "cloud_path", "folder_id",
                                     "created", "last_run", "inactivated", "encrypted"});
        db.for_each_row("syncfolder_table", cols, [&](const std::vector<Value>& row) {
            SyncFolderRecord r;
            r.owner_id = cell_int(row[0]);
            r.name = cell_text(row[1]);
            r.local_path = cell_text(row[2]);
            r.cloud_path = cell_text(row[3]);
            r.folder_id = cell_int(row[4]);
            r.created = cell_time(row[5], out.warnings, "syncfolder_table.created");
            r.last_run = cell_time(row[6], out.warnings, "syncfolder_table.last_run");
            r.inactivated = cell_bool(row[7]);
            r.encrypted = cell_bool(row[8]);
            out.folders.push_back(std::move(r));
        });
    } else {
        out.warnings.push_back("syncfolder_table missing");
    }

    if (db.has_table("syncfolder_folder_table")) {
        any_table = true;
        auto cols = require_columns(db, "syncfolder_folder_table",
                                    {"name", "root_folder_id", "folder_id", "child_folder_id",
                                     "creation_date", "deleted", "owner"});
        db.for_each_row("syncfolder_folder_table", cols, [&](const std::vector<Value>& row) {
            FolderTreeEdge e;
            e.name = cell_text(row[0]);
            e.root_folder_id = cell_int(row[1]);
            e.folder_id = cell_int(row[2]);
            e.child_folder_id = cell_int(row[3]);
            e.creation_date = cell_time(row[4], out.warnings, "syncfolder_folder_table.creation_date");
            if (!sqlite::is_null(row[5])) e.deleted = cell_text(row[5]);
            e.owner_id = cell_int(row[6]);
            out.tree.push_back(std::move(e));
        });
    } else {
        out.warnings.push_back("syncfolder_folder_table missing");
    }

    if (db.has_table("syncfolder_document_table")) {
        any_table = true;
        auto cols = require_columns(db, "syncfolder_document_table",
                                    {"owner", "name", "root_folder_id", "folder_id",
                                     "document_id", "size", "modified_date", "checksum",
                                     "main_checksum"});
        db.for_each_row("syncfolder_document_table", cols, [&](const std::vector<Value>& row) {
            SyncFileRecord f;
            f.owner_id = cell_int(row[0]);
            f.name = cell_text(row[1]);
            f.root_folder_id = cell_int(row[2]);
            f.folder_id = cell_int(row[3]);
            f.document_id = cell_int(row[4]);
            f.size = cell_int(row[5]);
            f.modified_date = cell_time(row[6], out.warnings, "syncfolder_document_table.modified_date");
            f.checksum = cell_text(row[7]);
            f.main_checksum = cell_text(row[8]);
            out.files.push_back(std::move(f));
        });
    } else {
        out.warnings.push_back("syncfolder_document_table missing");
    }

    if (!any_table)
        out.warnings.push_back("no CloudMe tables found in " + file.string());

    return out;
}

SyncHistory join_sync_history(const CacheDb& db) {
    // Index the smaller relations; iterate files to keep their row order.
    std::unordered_map<std::int64_t, const FolderTreeEdge*> edge_by_child;
    for (const auto& e : db.tree) edge_by_child.emplace(e.child_folder_id, &e);
    std::unordered_map<std::int64_t, const SyncFolderRecord*> folder_by_id;
    for (const auto& f : db.folders) folder_by_id.emplace(f.folder_id, &f);
    std::unordered_map<std::int64_t, const Account*> account_by_id;
    for (const auto& a : db.accounts) account_by_id.emplace(a.user_id, &a);

    SyncHistory out;
    for (const auto& file : db.files) {
        auto edge = edge_by_child.find(file.folder_id);
        auto folder = folder_by_id.find(file.root_folder_id);
        auto account = account_by_id.find(file.owner_id);
        if (edge == edge_by_child.end() || folder == folder_by_id.end() ||
            account == account_by_id.end()) {
            ++out.dropped;
            continue;
        }
        SyncHistoryRow row;
        row.owner_name = account->second->username;
        row.sync_folder_id = file.folder_id;
        row.sync_file_id = file.document_id;
        row.sync_file_name = file.name;
        row.sync_folder_path = folder->second->local_path;
        row.file_size = file.size;
        row.file_modified = file.modified_date;
        row.folder_created = folder->second->created;
        row.folder_last_sync = folder->second->last_run;
        row.folder_deleted = edge->second->deleted;
        row.folder_inactivated = folder->second->inactivated;
        row.folder_encrypted = folder->second->encrypted;
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::vector<ForensicEvent> events_from_cachedb(const SyncHistory& history,
                                               const std::vector<Account>& accounts,
                                               const EvidenceRef& source) {
    std::vector<ForensicEvent> events;

    std::unordered_set<std::int64_t> folders_seen;
    for (const auto& row : history.rows) {
        ForensicEvent mod;
        mod.time = row.file_modified;
        mod.kind = EventKind::FileModified;
        mod.actor = row.owner_name;
        mod.object = row.sync_folder_path + "/" + row.sync_file_name;
        set_attribute(mod, "folder_id", std::to_string(row.sync_folder_id));
        set_attribute(mod, "document_id", std::to_string(row.sync_file_id));
        set_attribute(mod, "size", std::to_string(row.file_size));
        if (row.folder_deleted) set_attribute(mod, "folder_deleted", *row.folder_deleted);
        mod.source = source;
        events.push_back(std::move(mod));

        if (folders_seen.insert(row.sync_folder_id).second) {
            ForensicEvent sync;
            sync.time = row.folder_last_sync;
            sync.kind = EventKind::SyncCompleted;
            sync.actor = row.owner_name;
            sync.object = row.sync_folder_path;
            set_attribute(sync, "folder_id", std::to_string(row.sync_folder_id));
            sync.source = source;
            events.push_back(std::move(sync));

            if (row.folder_inactivated) {
                ForensicEvent inact;
                inact.kind = EventKind::FolderInactivated;
                inact.actor = row.owner_name;
                inact.object = row.sync_folder_path;
                set_attribute(inact, "folder_id", std::to_string(row.sync_folder_id));
                inact.source = source;
                events.push_back(std::move(inact));
            }
        }
    }

    for (const auto& a : accounts) {
        ForensicEvent id;
        id.time = a.created;
        id.kind = EventKind::IdentityFound;
        id.actor = a.username;
        set_attribute(id, "user_id", std::to_string(a.user_id));
        if (a.device_name) set_attribute(id, "device_name", *a.device_name);
        id.source = source;
        events.push_back(std::move(id));
    }

    return events;
}

std::string sync_history_row_to_jsonl(const SyncHistoryRow& row) {
    nlohmann::ordered_json j;
    j["owner_name"] = row.owner_name;
    j["sync_folder_id"] = row.sync_folder_id;
    j["sync_file_id"] = row.sync_file_id;
    j["sync_file_name"] = row.sync_file_name;
    j["sync_folder_path"] = row.sync_folder_path;
    j["file_size"] = row.file_size;
    j["file_modified"] = opt_time_display(row.file_modified);
    j["folder_created"] = opt_time_display(row.folder_created);
    j["folder_last_sync"] = opt_time_display(row.folder_last_sync);
    j["folder_deleted"] = row.folder_deleted ? nlohmann::ordered_json(*row.folder_deleted)
                                             : nlohmann::ordered_json(nullptr);
    j["folder_inactivated"] = row.folder_inactivated;
    j["folder_encrypted"] = row.folder_encrypted;
    return dump_compact(j);
}

std::string sync_history_csv_header() { return csv_row(kSyncHistoryHeaders); }

std::string sync_history_row_to_csv(const SyncHistoryRow& row) {
    return csv_row({row.owner_name, std::to_string(row.sync_folder_id),
                    std::to_string(row.sync_file_id), row.sync_file_name,
                    row.sync_folder_path, std::to_string(row.file_size),
                    opt_time_display(row.file_modified), opt_time_display(row.folder_created),
                    opt_time_display(row.folder_last_sync),
                    row.folder_deleted.value_or(""), row.folder_inactivated ? "true" : "false",
                    row.folder_encrypted ? "true" : "false"});
}

}  // namespace cloudme
