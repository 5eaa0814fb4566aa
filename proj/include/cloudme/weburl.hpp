// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cloudme/model.hpp"

namespace cloudme {

/// The CloudMe web-application action a browser-history URL evidences.
enum class UrlKind {
    FolderAccessByName,
    FolderAccessById,
    FolderSync,
    FileAccessOrDownload,
    WebShareAccess,
    SharedFileDownload,
    Logout,
    NotCloudMe,
};

std::string_view to_string(UrlKind k);

struct UrlClassification {
    UrlKind kind = UrlKind::NotCloudMe;
    std::optional<std::int64_t> folder_id;
    std::optional<std::int64_t> document_id;
    std::optional<std::string> folder_name;
    std::optional<std::string> filename;
    std::optional<std::uint64_t> epoch_ms;

    friend bool operator==(const UrlClassification&, const UrlClassification&) = default;
};

/// Map a URL to a CloudMe user action. Total and deterministic; anything
/// not on a cloudme.com host, or on one but matching no action template,
/// classifies as NotCloudMe. Fragment names are percent-decoded.
UrlClassification classify_url(std::string_view url);

/// A browser-history entry (or any URL observation with an optional time).
struct UrlVisit {
    std::string url;
    std::optional<Timestamp> time;

    friend bool operator==(const UrlVisit&, const UrlVisit&) = default;
};

/// Plain text or CSV list: one "url [separator timestamp]" per line.
/// Timestamps are tried against all supported grammars.
std::vector<UrlVisit> read_url_list(const std::filesystem::path& file);

/// Chrome (urls/visits) and Firefox (moz_places/moz_historyvisits) history
/// stores. Chrome visit times are microseconds since 1601; Firefox since
/// the Unix epoch.
std::vector<UrlVisit> read_browser_history_db(const std::filesystem::path& file);

/// Either of the above, sniffed by file magic.
std::vector<UrlVisit> read_url_visits(const std::filesystem::path& file);

std::vector<ForensicEvent> events_from_url_visits(const std::vector<UrlVisit>& visits,
                                                  const EvidenceRef& source);

std::string url_classification_to_jsonl(const UrlVisit& visit, const UrlClassification& c);

}  // namespace cloudme
