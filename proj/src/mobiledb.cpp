// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/mobiledb.hpp"

#include <unordered_map>

#include <nlohmann/json.hpp>

#include "cloudme/jsonx.hpp"

#include "cloudme/csv.hpp"
#include "cloudme/sqlite_reader.hpp"
#include "cloudme/util.hpp"

namespace cloudme {

namespace {

using sqlite::Value;

constexpr std::string_view kDocumentUrlPrefix = "https://os.cloudme.com/v1/documents/";

std::int64_t cell_int(const Value& v) {
    if (auto i = sqlite::as_int(v)) return *i;
    if (auto s = sqlite::as_text(v)) {
        if (auto i = parse_i64(*s)) return *i;
    }
    return 0;
}

std::string cell_text(const Value& v) { return sqlite::value_to_display(v); }

std::optional<Timestamp> cell_time_iso(const Value& v, std::vector<std::string>& warnings,
                                       const std::string& context) {
    if (sqlite::is_null(v)) return std::nullopt;
    auto text = sqlite::value_to_display(v);
    if (auto t = try_normalize_timestamp(text, TimeHint::Iso8601Z)) return t;
    if (auto t = try_normalize_any(text)) return t;
    warnings.push_back(context + ": undecodable datetime \"" + text + "\"");
    return std::nullopt;
}

std::vector<std::string> require_columns(const sqlite::Database& db, const std::string& table,
                                         const std::vector<std::string>& wanted) {
    std::vector<std::string> resolved;
    for (const auto& w : wanted) {
        auto real = db.resolve_column(table, w);
        if (!real) throw sqlite::SchemaMismatch(table, w);
        resolved.push_back(*real);
    }
    return resolved;
}

std::string opt_raw(const std::optional<Timestamp>& t) { return t ? t->raw : ""; }

}  // namespace

const std::vector<std::string> kFileViewHeaders = {
    "Owner",        "Filename",          "File Size", "Folder Name", "URL",
    "Published Time", "Last Updated Time", "File Type", "Origin",
};

DbSdb parse_dbsdb(const std::filesystem::path& file) {
    auto db = sqlite::Database::open_readonly(file);
    DbSdb out;
    out.path = file.string();

    if (db.has_table("files")) {
        auto cols = require_columns(
            db, "files", {"_id", "name", "folder_id", "size", "href", "published", "updated",
                          "owner", "mime"});
        db.for_each_row("files", cols, [&](const std::vector<Value>& row) {
            MobileFileRow f;
            f.id = cell_int(row[0]);
            f.name = cell_text(row[1]);
            f.folder_id = cell_int(row[2]);
            f.size = cell_int(row[3]);
            f.href = cell_text(row[4]);
            f.published = cell_time_iso(row[5], out.warnings, "files.published");
            f.updated = cell_time_iso(row[6], out.warnings, "files.updated");
            f.owner = cell_text(row[7]);
            f.mime = cell_text(row[8]);
            if (!f.href.empty() && f.href.rfind(kDocumentUrlPrefix, 0) != 0)
                out.warnings.push_back("files._id=" + std::to_string(f.id) +
                                       ": unexpected href \"" + f.href + "\"");
            out.files.push_back(std::move(f));
        });
    } else {
        out.warnings.push_back("files table missing");
    }

    if (db.has_table("folders")) {
        auto cols = require_columns(db, "folders",
                                    {"folder_id", "name", "owner", "parent", "is_root", "path"});
        db.for_each_row("folders", cols, [&](const std::vector<Value>& row) {
            MobileFolderRow f;
            f.folder_id = cell_int(row[0]);
            f.name = cell_text(row[1]);
            f.owner = cell_text(row[2]);
            f.parent = cell_text(row[3]);
            if (auto s = sqlite::as_text(row[4])) f.is_root = iequals_ascii(*s, "true") || *s == "1";
            else f.is_root = cell_int(row[4]) != 0;
            f.path = cell_text(row[5]);
            if (!f.path.empty() && f.path.rfind("xios://", 0) != 0)
                out.warnings.push_back("folders.folder_id=" + std::to_string(f.folder_id) +
                                       ": unexpected path scheme \"" + f.path + "\"");
            out.folders.push_back(std::move(f));
        });
    } else {
        out.warnings.push_back("folders table missing");
    }

    return out;
}

FileViewHistory join_file_view_history(const DbSdb& db) {
    std::unordered_map<std::int64_t, const MobileFolderRow*> folder_by_id;
    for (const auto& f : db.folders) folder_by_id.emplace(f.folder_id, &f);

    FileViewHistory out;
    for (const auto& file : db.files) {
        auto folder = folder_by_id.find(file.folder_id);
        if (folder == folder_by_id.end()) {
            ++out.dropped;
            continue;
        }
        FileViewRow row;
        row.owner = file.owner;
        row.filename = file.name;
        row.file_size = file.size;
        row.folder_name = folder->second->name;
        row.url = file.href;
        row.published = file.published;
        row.updated = file.updated;
        row.file_type = file.mime;
        row.origin = folder->second->path;
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::vector<ForensicEvent> events_from_dbsdb(const FileViewHistory& history,
                                             const EvidenceRef& source) {
    std::vector<ForensicEvent> events;
    for (const auto& row : history.rows) {
        ForensicEvent e;
        e.time = row.published;
        e.kind = EventKind::FileViewed;
        e.actor = row.owner;
        e.object = row.folder_name + "/" + row.filename;
        set_attribute(e, "url", row.url);
        set_attribute(e, "size", std::to_string(row.file_size));
        set_attribute(e, "mime", row.file_type);
        set_attribute(e, "origin", row.origin);
        if (row.updated) set_attribute(e, "updated", row.updated->iso8601());
        e.source = source;
        events.push_back(std::move(e));
    }
    return events;
}

std::string file_view_row_to_jsonl(const FileViewRow& row) {
    nlohmann::ordered_json j;
    j["owner"] = row.owner;
    j["filename"] = row.filename;
    j["file_size"] = row.file_size;
    j["folder_name"] = row.folder_name;
    j["url"] = row.url;
    j["published"] = opt_raw(row.published);
    j["updated"] = opt_raw(row.updated);
    j["file_type"] = row.file_type;
    j["origin"] = row.origin;
    return dump_compact(j);
}

std::string file_view_csv_header() { return csv_row(kFileViewHeaders); }

std::string file_view_row_to_csv(const FileViewRow& row) {
    return csv_row({row.owner, row.filename, std::to_string(row.file_size), row.folder_name,
                    row.url, opt_raw(row.published), opt_raw(row.updated), row.file_type,
                    row.origin});
}

NsUrlCache parse_nsurlcache(const std::filesystem::path& file) {
    auto db = sqlite::Database::open_readonly(file);
    NsUrlCache out;
    out.path = file.string();

    for (const char* table : {"cfurl_cache_receiver_data", "cfurl_cache_response"})
        if (!db.has_table(table)) throw sqlite::SchemaMismatch(table, "(table missing)");

    auto data_cols = require_columns(db, "cfurl_cache_receiver_data", {"entry_ID", "receiver_data"});
    auto resp_cols =
        require_columns(db, "cfurl_cache_response", {"entry_ID", "request_key", "time_stamp"});

    struct Resp {
        std::string url;
        std::optional<Timestamp> fetched;
    };
    std::unordered_map<std::int64_t, Resp> responses;
    db.for_each_row("cfurl_cache_response", resp_cols, [&](const std::vector<Value>& row) {
        Resp r;
        r.url = cell_text(row[1]);
        if (!sqlite::is_null(row[2])) {
            auto text = sqlite::value_to_display(row[2]);
            r.fetched = try_normalize_timestamp(text, TimeHint::SqliteDatetime);
            if (!r.fetched) r.fetched = try_normalize_timestamp(text, TimeHint::Iso8601Z);
            if (!r.fetched) {
                if (auto n = parse_u64(text)) {
                    // Bare epoch: below 1e11 it can only be seconds.
                    auto ms = *n < 100000000000ULL ? *n * 1000 : *n;
                    if (auto t = try_normalize_timestamp(std::to_string(ms), TimeHint::EpochMillis)) {
                        t->raw = text;
                        r.fetched = t;
                    }
                }
            }
            if (!r.fetched)
                out.warnings.push_back("cfurl_cache_response.time_stamp undecodable: \"" + text + "\"");
        }
        responses.emplace(cell_int(row[0]), std::move(r));
    });

    db.for_each_row("cfurl_cache_receiver_data", data_cols, [&](const std::vector<Value>& row) {
        auto match = responses.find(cell_int(row[0]));
        if (match == responses.end()) return;  // inner-join semantics
        CachedResponse r;
        r.url = match->second.url;
        r.fetched = match->second.fetched;
        if (const auto* blob = std::get_if<std::vector<std::uint8_t>>(&row[1])) {
            r.body = *blob;
        } else if (const auto* text = std::get_if<std::string>(&row[1])) {
            r.body.assign(text->begin(), text->end());
        }
        out.responses.push_back(std::move(r));
    });

    return out;
}

}  // namespace cloudme
