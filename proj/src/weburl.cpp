// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/weburl.hpp"

#include <nlohmann/json.hpp>

#include "cloudme/jsonx.hpp"

#include "cloudme/sqlite_reader.hpp"
#include "cloudme/util.hpp"

namespace cloudme {

namespace {

struct UrlParts {
    std::string host;      // lowercased
    std::string path;      // leading '/'
    std::string query;     // without '?'
    std::string fragment;  // without '#'
};

std::optional<UrlParts> split_url(std::string_view url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) return std::nullopt;
    auto rest = url.substr(scheme_end + 3);

    UrlParts parts;
    auto frag = rest.find('#');
    if (frag != std::string_view::npos) {
        parts.fragment = std::string(rest.substr(frag + 1));
        rest = rest.substr(0, frag);
    }
    auto q = rest.find('?');
    if (q != std::string_view::npos) {
        parts.query = std::string(rest.substr(q + 1));
        rest = rest.substr(0, q);
    }
    auto slash = rest.find('/');
    if (slash == std::string_view::npos) {
        parts.host = to_lower_ascii(rest);
        parts.path = "/";
    } else {
        parts.host = to_lower_ascii(rest.substr(0, slash));
        parts.path = std::string(rest.substr(slash));
    }
    if (auto colon = parts.host.find(':'); colon != std::string::npos)
        parts.host.resize(colon);
    return parts;
}

bool is_cloudme_host(const std::string& host) {
    return host == "cloudme.com" ||
           (host.size() > 12 && host.compare(host.size() - 12, 12, ".cloudme.com") == 0);
}

std::optional<std::string> query_param(const std::string& query, std::string_view name) {
    for (const auto& kv : split(query, '&')) {
        auto eq = kv.find('=');
        std::string key = eq == std::string::npos ? kv : kv.substr(0, eq);
        if (key == name) return eq == std::string::npos ? "" : percent_decode(kv.substr(eq + 1));
    }
    return std::nullopt;
}

// "/v1/documents/<fid>/<did>/1/<name>"
bool match_document_path(const std::string& path, UrlClassification& c) {
    auto segs = split(path, '/');
    // leading "" from the root slash
    if (segs.size() != 7 || !segs[0].empty() || segs[1] != "v1" || segs[2] != "documents")
        return false;
    auto fid = parse_i64(segs[3]);
    auto did = parse_i64(segs[4]);
    if (!fid || !did || segs[5] != "1" || segs[6].empty()) return false;
    c.folder_id = fid;
    c.document_id = did;
    c.filename = percent_decode(segs[6]);
    return true;
}

}  // namespace

std::string_view to_string(UrlKind k) {
    switch (k) {
        case UrlKind::FolderAccessByName: return "FolderAccessByName";
        case UrlKind::FolderAccessById: return "FolderAccessById";
        case UrlKind::FolderSync: return "FolderSync";
        case UrlKind::FileAccessOrDownload: return "FileAccessOrDownload";
        case UrlKind::WebShareAccess: return "WebShareAccess";
        case UrlKind::SharedFileDownload: return "SharedFileDownload";
        case UrlKind::Logout: return "Logout";
        case UrlKind::NotCloudMe: return "NotCloudMe";
    }
    return "?";
}

UrlClassification classify_url(std::string_view url) {
    UrlClassification c;
    auto parts = split_url(url);
    if (!parts || !is_cloudme_host(parts->host)) return c;

    // Most specific first.
    if (match_document_path(parts->path, c)) {
        c.kind = query_param(parts->query, "dl") ? UrlKind::SharedFileDownload
                                                 : UrlKind::FileAccessOrDownload;
        return c;
    }
    c = UrlClassification{};

    const auto& frag = parts->fragment;
    if (frag.rfind("webshares:/", 0) == 0) {
        c.kind = UrlKind::WebShareAccess;
        c.folder_name = percent_decode(frag.substr(11));
        return c;
    }
    if (frag.rfind("sync:", 0) == 0) {
        auto body = frag.substr(5);
        if (body.rfind("f:", 0) == 0) {
            auto rest = body.substr(2);
            auto comma = rest.find(',');
            auto id_part = comma == std::string::npos ? rest : rest.substr(0, comma);
            if (auto fid = parse_i64(percent_decode(id_part))) {
                c.kind = UrlKind::FolderSync;
                c.folder_id = fid;
                if (comma != std::string::npos)
                    c.folder_name = percent_decode(rest.substr(comma + 1));
                return c;
            }
        } else if (body.rfind("/", 0) == 0) {
            if (auto fid = parse_i64(percent_decode(body.substr(1)))) {
                c.kind = UrlKind::FolderSync;
                c.folder_id = fid;
                return c;
            }
        }
    }
    if (frag.rfind("files:f:", 0) == 0) {
        if (auto fid = parse_i64(percent_decode(frag.substr(8)))) {
            c.kind = UrlKind::FolderAccessById;
            c.folder_id = fid;
            return c;
        }
    }
    if (frag.rfind("files:/", 0) == 0) {
        auto path = percent_decode(frag.substr(7));
        auto segs = split(path, '/');
        while (!segs.empty() && segs.back().empty()) segs.pop_back();
        if (!segs.empty()) {
            c.kind = UrlKind::FolderAccessByName;
            c.folder_name = segs.back();
            return c;
        }
    }
    if (auto logout = query_param(parts->query, "logout"); logout && *logout == "1") {
        c.kind = UrlKind::Logout;
        if (auto r = query_param(parts->query, "r")) {
            if (auto ms = parse_u64(*r)) c.epoch_ms = ms;
        }
        return c;
    }
    return c;  // cloudme.com host, but no recognized action
}

std::vector<UrlVisit> read_url_list(const std::filesystem::path& file) {
    auto text = read_file_bytes(file);
    std::vector<UrlVisit> out;
    for (const auto& raw_line : split(text, '\n')) {
        std::string line = raw_line;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t sep = line.find_first_of(" \t,");
        UrlVisit visit;
        if (sep == std::string::npos) {
            visit.url = line;
        } else {
            visit.url = line.substr(0, sep);
            auto rest = line.substr(sep + 1);
            std::size_t start = rest.find_first_not_of(" \t,");
            if (start != std::string::npos) {
                auto t = rest.substr(start);
                while (!t.empty() && (t.back() == ' ' || t.back() == '\t')) t.pop_back();
                // Strip optional quotes around the timestamp column.
                if (t.size() >= 2 && t.front() == '"' && t.back() == '"')
                    t = t.substr(1, t.size() - 2);
                visit.time = try_normalize_any(t);
            }
        }
        if (!visit.url.empty()) out.push_back(std::move(visit));
    }
    return out;
}

std::vector<UrlVisit> read_browser_history_db(const std::filesystem::path& file) {
    auto db = sqlite::Database::open_readonly(file);
    std::vector<UrlVisit> out;

    auto epoch_visit = [&](const std::string& url, std::int64_t unix_ms, std::string raw) {
        UrlVisit v;
        v.url = url;
        if (unix_ms > 0) {
            Timestamp t;
            t.instant = SysMillis{std::chrono::milliseconds(unix_ms)};
            t.raw = std::move(raw);
            v.time = t;
        }
        out.push_back(std::move(v));
    };

    if (db.has_table("urls") && db.has_table("visits")) {
        // Chrome: visit_time is microseconds since 1601-01-01 UTC.
        constexpr std::int64_t kWindowsToUnixMs = 11644473600000LL;
        for (const auto& row : db.query(
                 "SELECT urls.url, visits.visit_time FROM visits "
                 "JOIN urls ON visits.url = urls.id ORDER BY visits.rowid")) {
            auto url = sqlite::as_text(row[0]).value_or("");
            auto t = sqlite::as_int(row[1]).value_or(0);
            epoch_visit(url, t / 1000 - kWindowsToUnixMs, std::to_string(t));
        }
        return out;
    }
    if (db.has_table("moz_places") && db.has_table("moz_historyvisits")) {
        // Firefox: visit_date is microseconds since the Unix epoch.
        for (const auto& row : db.query(
                 "SELECT moz_places.url, moz_historyvisits.visit_date FROM moz_historyvisits "
                 "JOIN moz_places ON moz_historyvisits.place_id = moz_places.id "
                 "ORDER BY moz_historyvisits.rowid")) {
            auto url = sqlite::as_text(row[0]).value_or("");
            auto t = sqlite::as_int(row[1]).value_or(0);
            epoch_visit(url, t / 1000, std::to_string(t));
        }
        return out;
    }
    throw sqlite::SchemaMismatch("browser history", "urls/visits or moz_places/moz_historyvisits");
}

std::vector<UrlVisit> read_url_visits(const std::filesystem::path& file) {
    auto bytes = read_file_bytes(file);
    if (bytes.size() >= 16 && bytes.compare(0, 15, "SQLite format 3") == 0)
        return read_browser_history_db(file);
    return read_url_list(file);
}

std::vector<ForensicEvent> events_from_url_visits(const std::vector<UrlVisit>& visits,
                                                  const EvidenceRef& source) {
    std::vector<ForensicEvent> events;
    for (const auto& v : visits) {
        auto c = classify_url(v.url);
        if (c.kind == UrlKind::NotCloudMe) continue;
        ForensicEvent e;
        e.time = v.time;
        e.source = source;
        set_attribute(e, "url", v.url);
        switch (c.kind) {
            case UrlKind::FolderAccessByName:
                e.kind = EventKind::FolderAccessed;
                e.object = c.folder_name;
                break;
            case UrlKind::FolderAccessById:
                e.kind = EventKind::FolderAccessed;
                break;
            case UrlKind::FolderSync:
                e.kind = EventKind::FolderAccessed;
                e.object = c.folder_name;
                set_attribute(e, "action", "sync");
                break;
            case UrlKind::FileAccessOrDownload:
                e.kind = EventKind::FileViewed;
                e.object = c.filename;
                break;
            case UrlKind::SharedFileDownload:
                e.kind = EventKind::FileDownloaded;
                e.object = c.filename;
                break;
            case UrlKind::WebShareAccess:
                e.kind = EventKind::WebShareAccessed;
                e.object = c.folder_name;
                break;
            case UrlKind::Logout: {
                e.kind = EventKind::Logout;
                if (c.epoch_ms) {
                    auto t = normalize_timestamp(std::to_string(*c.epoch_ms), TimeHint::EpochMillis);
                    set_attribute(e, "logout_time", t.iso8601());
                    if (!e.time) e.time = t;
                }
                break;
            }
            case UrlKind::NotCloudMe:
                continue;
        }
        if (c.folder_id) set_attribute(e, "folder_id", std::to_string(*c.folder_id));
        if (c.document_id) set_attribute(e, "document_id", std::to_string(*c.document_id));
        events.push_back(std::move(e));
    }
    return events;
}

std::string url_classification_to_jsonl(const UrlVisit& visit, const UrlClassification& c) {
    nlohmann::ordered_json j;
    j["url"] = visit.url;
    j["time"] = visit.time ? nlohmann::ordered_json(visit.time->iso8601())
                           : nlohmann::ordered_json(nullptr);
    j["kind"] = std::string(to_string(c.kind));
    if (c.folder_id) j["folder_id"] = *c.folder_id;
    if (c.document_id) j["document_id"] = *c.document_id;
    if (c.folder_name) j["folder_name"] = *c.folder_name;
    if (c.filename) j["filename"] = *c.filename;
    if (c.epoch_ms) j["epoch_ms"] = *c.epoch_ms;
    return dump_compact(j);
}

}  // namespace cloudme
