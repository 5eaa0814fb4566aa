// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/webdocs.hpp"

#include "cloudme/util.hpp"
#include "cloudme/xmlmini.hpp"

namespace cloudme {

namespace {

std::int64_t attr_int(const xml::Node& n, std::string_view name) {
    if (const auto* v = n.attribute_local(name))
        if (auto i = parse_i64(*v)) return *i;
    return 0;
}

std::string attr_str(const xml::Node& n, std::string_view name) {
    if (const auto* v = n.attribute_local(name)) return *v;
    return "";
}

std::optional<std::string> attr_opt(const xml::Node& n, std::string_view name) {
    if (const auto* v = n.attribute_local(name)) return *v;
    return std::nullopt;
}

bool attr_bool(const xml::Node& n, std::string_view name) {
    if (const auto* v = n.attribute_local(name)) return iequals_ascii(*v, "true");
    return false;
}

std::optional<Timestamp> attr_time(const xml::Node& n, std::string_view name,
                                   std::vector<std::string>* warnings) {
    const auto* v = n.attribute_local(name);
    if (!v || v->empty()) return std::nullopt;
    if (auto t = try_normalize_timestamp(*v, TimeHint::Iso8601Z)) return t;
    if (auto t = try_normalize_any(*v)) return t;
    if (warnings)
        warnings->push_back(std::string(name) + ": undecodable datetime \"" + *v + "\"");
    return std::nullopt;
}

OpenSearchMeta opensearch_meta(const xml::Node& root) {
    OpenSearchMeta meta;
    auto read = [&](std::string_view local) -> std::optional<std::int64_t> {
        if (const auto* n = root.first_child(local)) return parse_i64(n->text);
        return std::nullopt;
    };
    meta.total_results = read("totalResults");
    meta.start_index = read("startIndex");
    meta.items_per_page = read("itemsPerPage");
    return meta;
}

ShareAccess parse_access(std::string_view raw) {
    return iequals_ascii(raw, "update") ? ShareAccess::Update : ShareAccess::Read;
}

xml::Node parse_with_root(std::string_view xml_bytes, std::string_view expected_root) {
    auto root = xml::parse(xml_bytes);
    if (root.local_name() != expected_root)
        throw WrongDocType(expected_root, root.local_name());
    return root;
}

void add_raw_attrs(std::vector<std::pair<std::string, std::string>>& dest, const xml::Node& n) {
    dest = n.attributes;
}

void flatten_folder_listing(const xml::Node& node, std::optional<std::int64_t> parent,
                            FolderListingDoc& out) {
    FolderListingEntry entry;
    entry.folder_id = attr_int(node, "id");
    entry.name = attr_str(node, "name");
    entry.parent_id = parent;
    for (const auto& child : node.children) {
        if (child.local_name() == "tag") {
            FolderTag tag;
            tag.type = attr_str(child, "type");
            tag.value = attr_str(child, "value");
            tag.group = attr_str(child, "group");
            tag.propagated = attr_bool(child, "propagated");
            add_raw_attrs(tag.raw_attributes, child);
            entry.tags.push_back(std::move(tag));
        } else if (child.local_name() != "folder") {
            out.warnings.push_back("unknown element <" + child.name + "> ignored");
        }
    }
    std::int64_t self_id = entry.folder_id;
    out.entries.push_back(std::move(entry));
    for (const auto& child : node.children)
        if (child.local_name() == "folder") flatten_folder_listing(child, self_id, out);
}

}  // namespace

std::string_view to_string(ShareAccess a) {
    return a == ShareAccess::Update ? "update" : "read";
}

WebsharesDoc parse_webshares_doc(std::string_view xml_bytes) {
    auto root = parse_with_root(xml_bytes, "webshares");
    WebsharesDoc doc;
    doc.meta = opensearch_meta(root);
    for (const auto* n : root.children_named("webshare")) {
        WebShareRecord r;
        r.id = attr_int(*n, "id");
        r.name = attr_str(*n, "name");
        auto pw = attr_str(*n, "password");
        if (!pw.empty()) r.password = pw;
        r.access = parse_access(attr_str(*n, "access"));
        r.visibility = attr_str(*n, "visibility");
        r.description = attr_str(*n, "description");
        r.user_id = attr_int(*n, "userId");
        r.created = attr_time(*n, "created", &doc.warnings);
        r.updated = attr_time(*n, "updated", &doc.warnings);
        r.created_state = attr_str(*n, "createdState");
        r.share_type = attr_str(*n, "type");
        if (const auto* folder = n->first_child("folder")) {
            r.folder_id = attr_int(*folder, "id");
            r.folder_name = attr_opt(*folder, "name");
        }
        add_raw_attrs(r.raw_attributes, *n);
        doc.records.push_back(std::move(r));
    }
    return doc;
}

FavoritesDoc parse_favorites_doc(std::string_view xml_bytes) {
    auto root = parse_with_root(xml_bytes, "favorites");
    FavoritesDoc doc;
    doc.meta = opensearch_meta(root);
    for (const auto* n : root.children_named("favorite")) {
        FavoriteRecord r;
        r.id = attr_int(*n, "id");
        r.folder_id = attr_int(*n, "folder_id");
        r.document_id = attr_int(*n, "document_id");
        r.name = attr_str(*n, "name");
        auto pw = attr_str(*n, "password");
        if (!pw.empty()) r.password = pw;
        r.webshare_id = attr_int(*n, "webShareId");
        r.sharing_user_name = attr_str(*n, "sharingUserName");
        r.sharing_user_id = attr_int(*n, "sharingUserId");
        r.user_id = attr_int(*n, "userId");
        r.access = attr_opt(*n, "access");
        r.description = attr_str(*n, "description");
        r.created = attr_time(*n, "created", &doc.warnings);
        add_raw_attrs(r.raw_attributes, *n);
        doc.records.push_back(std::move(r));
    }
    return doc;
}

DeviceSyncProfile parse_device_sync_doc(std::string_view xml_bytes) {
    auto root = parse_with_root(xml_bytes, "sync");
    DeviceSyncProfile profile;
    profile.device_name = attr_str(root, "dName");
    profile.client_id = attr_str(root, "clientId");
    profile.version = attr_str(root, "version");
    add_raw_attrs(profile.raw_attributes, root);
    for (const auto* n : root.children_named("syncfolder")) {
        DeviceSyncFolder f;
        f.name = attr_str(*n, "name");
        f.local_path = attr_str(*n, "path");
        f.cloud_path = attr_str(*n, "cloudPath");
        f.folder_id = attr_int(*n, "folderId");
        f.last_sync = attr_time(*n, "lastSync", &profile.warnings);
        f.has_synchronized = attr_bool(*n, "hasSynchronized");
        f.favorite_folder = attr_bool(*n, "favoriteFolder");
        f.inactivated = attr_bool(*n, "inactivated");
        f.conflict = attr_str(*n, "conflict");
        add_raw_attrs(f.raw_attributes, *n);
        profile.folders.push_back(std::move(f));
    }
    return profile;
}

FolderListingDoc parse_folder_listing_doc(std::string_view xml_bytes) {
    auto root = parse_with_root(xml_bytes, "folder");
    FolderListingDoc doc;
    flatten_folder_listing(root, std::nullopt, doc);
    return doc;
}

LifestreamDoc parse_lifestream_doc(std::string_view xml_bytes) {
    auto root = xml::parse(xml_bytes);
    LifestreamDoc doc;
    std::vector<const xml::Node*> nodes;
    root.collect("event", nodes);
    for (const auto* n : nodes) {
        LifestreamEvent e;
        e.sender_id = attr_opt(*n, "senderId");
        e.sender_group_id = attr_opt(*n, "senderGroupId");
        e.sender_name = attr_opt(*n, "senderName");
        e.receiver_id = attr_opt(*n, "receiverId");
        e.receiver_group_id = attr_opt(*n, "receiverGroupId");
        e.receiver_name = attr_opt(*n, "receiverName");
        e.parent_folder = attr_opt(*n, "parentFolder");
        if (const auto* seen = n->attribute_local("seen")) e.seen = iequals_ascii(*seen, "true");
        add_raw_attrs(e.raw_attributes, *n);
        doc.events.push_back(std::move(e));
    }
    return doc;
}

std::vector<ForensicEvent> events_from_webshares(const WebsharesDoc& doc,
                                                 const EvidenceRef& source) {
    std::vector<ForensicEvent> events;
    for (const auto& r : doc.records) {
        ForensicEvent e;
        e.time = r.created;
        e.kind = EventKind::ShareCreated;
        e.object = r.name;
        set_attribute(e, "webshare_id", std::to_string(r.id));
        set_attribute(e, "access", std::string(to_string(r.access)));
        if (!r.visibility.empty()) set_attribute(e, "visibility", r.visibility);
        if (!r.share_type.empty()) set_attribute(e, "share_type", r.share_type);
        if (r.password) set_attribute(e, "password", *r.password);
        if (r.folder_id) set_attribute(e, "folder_id", std::to_string(*r.folder_id));
        set_attribute(e, "user_id", std::to_string(r.user_id));
        if (r.updated) set_attribute(e, "updated", r.updated->iso8601());
        e.source = source;
        events.push_back(std::move(e));
    }
    return events;
}

std::vector<ForensicEvent> events_from_favorites(const FavoritesDoc& doc,
                                                 const EvidenceRef& source) {
    std::vector<ForensicEvent> events;
    for (const auto& r : doc.records) {
        ForensicEvent e;
        e.time = r.created;
        e.kind = EventKind::WebShareAccessed;
        e.object = r.name;
        set_attribute(e, "favorite_id", std::to_string(r.id));
        set_attribute(e, "webshare_id", std::to_string(r.webshare_id));
        set_attribute(e, "folder_id", std::to_string(r.folder_id));
        set_attribute(e, "sharing_user_name", r.sharing_user_name);
        set_attribute(e, "sharing_user_id", std::to_string(r.sharing_user_id));
        if (r.password) set_attribute(e, "password", *r.password);
        if (r.access) set_attribute(e, "access", *r.access);
        e.source = source;
        events.push_back(std::move(e));
    }
    return events;
}

std::vector<ForensicEvent> events_from_device_sync(const DeviceSyncProfile& doc,
                                                   const EvidenceRef& source) {
    std::vector<ForensicEvent> events;

    ForensicEvent id;
    id.kind = EventKind::IdentityFound;
    if (!doc.device_name.empty()) set_attribute(id, "device_name", doc.device_name);
    if (!doc.client_id.empty()) set_attribute(id, "client_id", doc.client_id);
    id.source = source;
    if (!id.attributes.empty()) events.push_back(std::move(id));

    for (const auto& f : doc.folders) {
        ForensicEvent e;
        e.time = f.last_sync;
        e.kind = EventKind::SyncCompleted;
        e.object = f.local_path.empty() ? f.name : f.local_path;
        set_attribute(e, "folder_id", std::to_string(f.folder_id));
        if (!f.name.empty()) set_attribute(e, "name", f.name);
        if (!f.cloud_path.empty()) set_attribute(e, "cloud_path", f.cloud_path);
        set_attribute(e, "has_synchronized", f.has_synchronized ? "true" : "false");
        e.source = source;
        events.push_back(std::move(e));

        if (f.inactivated) {
            ForensicEvent inact;
            inact.kind = EventKind::FolderInactivated;
            inact.object = f.local_path.empty() ? f.name : f.local_path;
            set_attribute(inact, "folder_id", std::to_string(f.folder_id));
            inact.source = source;
            events.push_back(std::move(inact));
        }
    }
    return events;
}

std::vector<ForensicEvent> events_from_folder_listing(const FolderListingDoc& doc,
                                                      const EvidenceRef& source) {
    std::vector<ForensicEvent> events;
    for (const auto& entry : doc.entries) {
        for (const auto& tag : entry.tags) {
            ForensicEvent e;
            e.kind = EventKind::ShareCreated;
            e.object = entry.name;
            set_attribute(e, "folder_id", std::to_string(entry.folder_id));
            set_attribute(e, "share_group", tag.group);
            set_attribute(e, "webshare_id", tag.value);
            set_attribute(e, "access", tag.type);
            set_attribute(e, "propagated", tag.propagated ? "true" : "false");
            e.source = source;
            events.push_back(std::move(e));
        }
    }
    return events;
}

std::vector<ForensicEvent> events_from_lifestream(const LifestreamDoc& doc,
                                                  const EvidenceRef& source) {
    std::vector<ForensicEvent> events;
    for (const auto& ev : doc.events) {
        ForensicEvent e;
        e.kind = EventKind::ShareCreated;
        e.actor = ev.sender_name;
        e.object = ev.parent_folder;
        if (ev.sender_id) set_attribute(e, "sender_id", *ev.sender_id);
        if (ev.receiver_name) set_attribute(e, "receiver_name", *ev.receiver_name);
        if (ev.receiver_id) set_attribute(e, "receiver_id", *ev.receiver_id);
        if (ev.seen) set_attribute(e, "seen", *ev.seen ? "true" : "false");
        set_attribute(e, "feed", "lifestream");
        e.source = source;
        events.push_back(std::move(e));
    }
    return events;
}

}  // namespace cloudme
