// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cloudme/mobiledb.hpp"
#include "cloudme/webdocs.hpp"

namespace cloudme {

struct RootNotFound : Error {
    explicit RootNotFound(const std::string& dir)
        : Error("no v1 web-cache directory found under " + dir) {}
};

/// A viewed file recovered from the documents/<folder>/<document>/1/ path.
struct ContentHit {
    std::int64_t folder_id = 0;
    std::int64_t document_id = 0;
    std::string path;

    friend bool operator==(const ContentHit&, const ContentHit&) = default;
};

/// A thumbnail at documents/<folder>/<document>/<thumbnail> (id != 1).
struct ThumbnailHit {
    std::int64_t folder_id = 0;
    std::int64_t document_id = 0;
    std::int64_t thumbnail_id = 0;
    std::string path;

    friend bool operator==(const ThumbnailHit&, const ThumbnailHit&) = default;
};

/// Everything recovered from an extracted web-cache tree (or from cached
/// response bodies): documents keyed by origin, viewed content, thumbnails.
struct HarvestResult {
    std::vector<std::pair<std::string, WebsharesDoc>> webshares;
    std::vector<std::pair<std::string, FavoritesDoc>> favorites;
    std::vector<std::pair<std::string, DeviceSyncProfile>> device_profiles;
    std::vector<std::pair<std::string, FolderListingDoc>> folder_listings;
    std::vector<std::pair<std::string, LifestreamDoc>> lifestreams;
    std::vector<ContentHit> content_files;
    std::vector<ThumbnailHit> thumbnails;
    std::vector<std::string> warnings;

    std::size_t document_count() const {
        return webshares.size() + favorites.size() + device_profiles.size() +
               folder_listings.size() + lifestreams.size();
    }
};

/// Walk an extracted web-cache tree rooted at (or containing) a
/// www.cloudme.com/v1 directory. XML files are dispatched to the document
/// parsers by root element; content and thumbnail paths are recorded.
/// Throws RootNotFound when no v1 directory exists.
HarvestResult harvest_cache_dir(const std::filesystem::path& dir);

/// Dispatch nsurlcache response bodies through the same document parsers.
/// Origins are the request URLs.
HarvestResult dispatch_cached_documents(const NsUrlCache& cache);

/// Timeline events for everything harvested. When fixed_source is set
/// (nsurlcache), all events point at that evidence and carry the document
/// origin as an attribute; otherwise each document's path is the source.
std::vector<ForensicEvent> events_from_harvest(const HarvestResult& result,
                                               ArtefactClass cls,
                                               const std::optional<EvidenceRef>& fixed_source);

}  // namespace cloudme
