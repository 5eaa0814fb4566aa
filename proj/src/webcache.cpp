// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/webcache.hpp"

#include <algorithm>

#include "cloudme/util.hpp"
#include "cloudme/xmlmini.hpp"

namespace cloudme {

namespace {

namespace fs = std::filesystem;

// Dispatch one XML body by root element. Returns false when the root is not
// a known CloudMe document.
bool dispatch_xml(const std::string& origin, std::string_view bytes, HarvestResult& out) {
    auto root = xml::sniff_root_name(bytes);
    if (!root) return false;
    try {
        if (*root == "webshares") {
            out.webshares.emplace_back(origin, parse_webshares_doc(bytes));
        } else if (*root == "favorites") {
            out.favorites.emplace_back(origin, parse_favorites_doc(bytes));
        } else if (*root == "sync") {
            out.device_profiles.emplace_back(origin, parse_device_sync_doc(bytes));
        } else if (*root == "folder") {
            out.folder_listings.emplace_back(origin, parse_folder_listing_doc(bytes));
        } else {
            auto doc = parse_lifestream_doc(bytes);
            if (doc.events.empty() && *root != "lifestream") return false;
            out.lifestreams.emplace_back(origin, std::move(doc));
        }
        return true;
    } catch (const Error& e) {
        out.warnings.push_back(origin + ": " + e.what());
        return true;  // consumed, though broken
    }
}

// documents/<fid>/<did>/1/<name> or documents/<fid>/<did>/<tid> relative to v1.
void match_document_paths(const fs::path& rel, const std::string& full, HarvestResult& out) {
    std::vector<std::string> segs;
    for (const auto& part : rel) segs.push_back(part.string());
    if (segs.size() < 4 || segs[0] != "documents") return;
    auto fid = parse_i64(segs[1]);
    auto did = parse_i64(segs[2]);
    if (!fid || !did) return;
    if (segs.size() == 5 && segs[3] == "1") {
        out.content_files.push_back({*fid, *did, full});
    } else if (segs.size() == 4) {
        if (auto tid = parse_i64(segs[3]); tid && *tid != 1)
            out.thumbnails.push_back({*fid, *did, *tid, full});
    }
}

void harvest_v1(const fs::path& v1, HarvestResult& out) {
    std::error_code ec;
    fs::recursive_directory_iterator it(v1, fs::directory_options::skip_permission_denied, ec);
    if (ec) {
        out.warnings.push_back(v1.string() + ": " + ec.message());
        return;
    }
    std::vector<fs::path> files;
    for (const auto& entry : it) {
        if (entry.is_symlink(ec)) continue;
        if (entry.is_regular_file(ec)) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    for (const auto& f : files) {
        auto rel = f.lexically_relative(v1);
        std::vector<std::string> segs;
        for (const auto& part : rel) segs.push_back(part.string());
        bool is_content = segs.size() == 5 && segs[0] == "documents" && segs[3] == "1" &&
                          parse_i64(segs[1]) && parse_i64(segs[2]);
        if (is_content) {
            match_document_paths(rel, f.string(), out);
            continue;
        }
        std::string bytes;
        try {
            bytes = read_file_bytes(f);
        } catch (const Unreadable& e) {
            out.warnings.push_back(e.what());
            continue;
        }
        if (dispatch_xml(f.string(), bytes, out)) continue;
        match_document_paths(rel, f.string(), out);
    }
}

}  // namespace

HarvestResult harvest_cache_dir(const fs::path& dir) {
    HarvestResult out;
    std::vector<fs::path> v1_roots;
    std::error_code ec;
    if (dir.filename() == "v1" && fs::is_directory(dir, ec)) {
        v1_roots.push_back(dir);
    } else {
        fs::recursive_directory_iterator it(dir, fs::directory_options::skip_permission_denied,
                                            ec);
        if (ec) throw Unreadable(dir.string(), ec.message());
        for (const auto& entry : it) {
            if (entry.is_symlink(ec)) continue;
            if (entry.is_directory(ec) && entry.path().filename() == "v1")
                v1_roots.push_back(entry.path());
        }
        std::sort(v1_roots.begin(), v1_roots.end());
    }
    if (v1_roots.empty()) throw RootNotFound(dir.string());
    for (const auto& v1 : v1_roots) harvest_v1(v1, out);
    return out;
}

HarvestResult dispatch_cached_documents(const NsUrlCache& cache) {
    HarvestResult out;
    for (const auto& resp : cache.responses) {
        if (resp.body.empty()) continue;
        std::string_view bytes(reinterpret_cast<const char*>(resp.body.data()),
                               resp.body.size());
        dispatch_xml(resp.url, bytes, out);
    }
    return out;
}

std::vector<ForensicEvent> events_from_harvest(const HarvestResult& result, ArtefactClass cls,
                                               const std::optional<EvidenceRef>& fixed_source) {
    std::vector<ForensicEvent> events;

    auto source_for = [&](const std::string& origin) {
        if (fixed_source) return *fixed_source;
        return EvidenceRef{origin, std::nullopt, cls};
    };
    auto tag_origin = [&](std::vector<ForensicEvent>& evs, const std::string& origin) {
        if (!fixed_source) return;
        for (auto& e : evs) set_attribute(e, "origin", origin);
    };

    auto append = [&](std::vector<ForensicEvent>&& evs) {
        for (auto& e : evs) events.push_back(std::move(e));
    };

    for (const auto& [origin, doc] : result.webshares) {
        auto evs = events_from_webshares(doc, source_for(origin));
        tag_origin(evs, origin);
        append(std::move(evs));
    }
    for (const auto& [origin, doc] : result.favorites) {
        auto evs = events_from_favorites(doc, source_for(origin));
        tag_origin(evs, origin);
        append(std::move(evs));
    }
    for (const auto& [origin, doc] : result.device_profiles) {
        auto evs = events_from_device_sync(doc, source_for(origin));
        tag_origin(evs, origin);
        append(std::move(evs));
    }
    for (const auto& [origin, doc] : result.folder_listings) {
        auto evs = events_from_folder_listing(doc, source_for(origin));
        tag_origin(evs, origin);
        append(std::move(evs));
    }
    for (const auto& [origin, doc] : result.lifestreams) {
        auto evs = events_from_lifestream(doc, source_for(origin));
        tag_origin(evs, origin);
        append(std::move(evs));
    }

    for (const auto& hit : result.content_files) {
        ForensicEvent e;
        e.kind = EventKind::FileViewed;
        e.object = fs::path(hit.path).filename().string();
        set_attribute(e, "folder_id", std::to_string(hit.folder_id));
        set_attribute(e, "document_id", std::to_string(hit.document_id));
        e.source = source_for(hit.path);
        events.push_back(std::move(e));
    }
    return events;
}

}  // namespace cloudme
