// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cloudme/model.hpp"

namespace cloudme {

struct WrongDocType : Error {
    WrongDocType(std::string_view expected, std::string_view got)
        : Error("wrong document type: expected <" + std::string(expected) + ">, got <" +
                std::string(got) + ">") {}
};

/// OpenSearch counters carried by the webshares/favorites listings.
struct OpenSearchMeta {
    std::optional<std::int64_t> total_results;
    std::optional<std::int64_t> start_index;
    std::optional<std::int64_t> items_per_page;

    friend bool operator==(const OpenSearchMeta&, const OpenSearchMeta&) = default;
};

enum class ShareAccess { Read, Update };

std::string_view to_string(ShareAccess a);

/// One webshare element: a sharing grant over a folder/file, with an
/// optional plaintext password. Passwords are preserved exactly, case
/// included: variants differing only in case are distinct evidence.
struct WebShareRecord {
    std::int64_t id = 0;
    std::optional<std::int64_t> folder_id;  // nested <folder> child
    std::optional<std::string> folder_name;
    std::string name;
    std::optional<std::string> password;  // absent when empty
    ShareAccess access = ShareAccess::Read;
    std::string visibility;
    std::string description;
    std::int64_t user_id = 0;
    std::optional<Timestamp> created;
    std::optional<Timestamp> updated;
    std::string created_state;
    std::string share_type;  // the 'type' attribute
    std::vector<std::pair<std::string, std::string>> raw_attributes;

    friend bool operator==(const WebShareRecord&, const WebShareRecord&) = default;
};

struct WebsharesDoc {
    OpenSearchMeta meta;
    std::vector<WebShareRecord> records;
    std::vector<std::string> warnings;
};

WebsharesDoc parse_webshares_doc(std::string_view xml);

/// One favorite element: a remote shared folder bookmarked into the local
/// account, cross-referencing the webshare that grants access.
struct FavoriteRecord {
    std::int64_t id = 0;
    std::int64_t folder_id = 0;
    std::int64_t document_id = 0;
    std::string name;
    std::optional<std::string> password;
    std::int64_t webshare_id = 0;
    std::string sharing_user_name;
    std::int64_t sharing_user_id = 0;
    std::int64_t user_id = 0;
    std::optional<std::string> access;
    std::string description;
    std::optional<Timestamp> created;
    std::vector<std::pair<std::string, std::string>> raw_attributes;

    friend bool operator==(const FavoriteRecord&, const FavoriteRecord&) = default;
};

struct FavoritesDoc {
    OpenSearchMeta meta;
    std::vector<FavoriteRecord> records;
    std::vector<std::string> warnings;
};

FavoritesDoc parse_favorites_doc(std::string_view xml);

struct DeviceSyncFolder {
    std::string name;
    std::string local_path;   // 'path'
    std::string cloud_path;   // 'cloudPath'
    std::int64_t folder_id = 0;
    std::optional<Timestamp> last_sync;
    bool has_synchronized = false;
    bool favorite_folder = false;
    bool inactivated = false;
    std::string conflict;
    std::vector<std::pair<std::string, std::string>> raw_attributes;

    friend bool operator==(const DeviceSyncFolder&, const DeviceSyncFolder&) = default;
};

/// The device-specific sync metadata document: device name, opaque client
/// ID (brace-GUID or 32-char form, preserved verbatim) and per-folder sync
/// state.
struct DeviceSyncProfile {
    std::string device_name;
    std::string client_id;
    std::string version;
    std::vector<DeviceSyncFolder> folders;
    std::vector<std::pair<std::string, std::string>> raw_attributes;
    std::vector<std::string> warnings;

    friend bool operator==(const DeviceSyncProfile&, const DeviceSyncProfile&) = default;
};

DeviceSyncProfile parse_device_sync_doc(std::string_view xml);

struct FolderTag {
    std::string type;
    std::string value;
    std::string group;  // sharing type, e.g. "webshare"
    bool propagated = false;
    std::vector<std::pair<std::string, std::string>> raw_attributes;

    friend bool operator==(const FolderTag&, const FolderTag&) = default;
};

struct FolderListingEntry {
    std::int64_t folder_id = 0;
    std::string name;
    std::optional<std::int64_t> parent_id;
    std::vector<FolderTag> tags;

    friend bool operator==(const FolderListingEntry&, const FolderListingEntry&) = default;
};

struct FolderListingDoc {
    std::vector<FolderListingEntry> entries;  // depth-first, root first
    std::vector<std::string> warnings;
};

FolderListingDoc parse_folder_listing_doc(std::string_view xml);

/// One share-notification feed entry. The document shape is only loosely
/// specified, so every attribute is kept raw alongside the mapped fields.
struct LifestreamEvent {
    std::optional<std::string> sender_id;
    std::optional<std::string> sender_group_id;
    std::optional<std::string> sender_name;
    std::optional<std::string> receiver_id;
    std::optional<std::string> receiver_group_id;
    std::optional<std::string> receiver_name;
    std::optional<std::string> parent_folder;
    std::optional<bool> seen;
    std::vector<std::pair<std::string, std::string>> raw_attributes;

    friend bool operator==(const LifestreamEvent&, const LifestreamEvent&) = default;
};

struct LifestreamDoc {
    std::vector<LifestreamEvent> events;
};

LifestreamDoc parse_lifestream_doc(std::string_view xml);

std::vector<ForensicEvent> events_from_webshares(const WebsharesDoc& doc, const EvidenceRef& source);
std::vector<ForensicEvent> events_from_favorites(const FavoritesDoc& doc, const EvidenceRef& source);
std::vector<ForensicEvent> events_from_device_sync(const DeviceSyncProfile& doc,
                                                   const EvidenceRef& source);
std::vector<ForensicEvent> events_from_folder_listing(const FolderListingDoc& doc,
                                                      const EvidenceRef& source);
std::vector<ForensicEvent> events_from_lifestream(const LifestreamDoc& doc,
                                                  const EvidenceRef& source);

}  // namespace cloudme
