// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cloudme {

/// Base class for every error the toolkit raises on malformed evidence.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnparsableTimestamp : Error {
    explicit UnparsableTimestamp(std::string_view raw)
        : Error("unparsable timestamp: \"" + std::string(raw) + "\""), raw(raw) {}
    std::string raw;
};

struct Unreadable : Error {
    explicit Unreadable(const std::string& path, const std::string& why = "")
        : Error("unreadable: " + path + (why.empty() ? "" : " (" + why + ")")) {}
};

using SysMillis = std::chrono::sys_time<std::chrono::milliseconds>;

/// A UTC point in time plus the verbatim source string it was decoded from.
/// CloudMe artefacts carry several datetime spellings; `raw` always
/// round-trips byte-identically to the evidence.
struct Timestamp {
    SysMillis instant{};
    std::string raw;

    /// ISO-8601 with explicit Z suffix; fractional part rendered only when
    /// the instant carries a nonzero millisecond component.
    std::string iso8601() const;

    friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

/// Source grammar for normalize_timestamp.
///   SqliteDatetime  "2016-03-16 12:25:07" (optional .fff)
///   Iso8601Z        "2016-03-16T04:41:34Z" (optional .fff)
///   LogPrefix       "2016-03-15 13:48:22" as it appears before the log colon
///   EpochMillis     "1458192365602"
enum class TimeHint { SqliteDatetime, Iso8601Z, LogPrefix, EpochMillis };

/// Decode `raw` under the hinted grammar. All grammars are interpreted as
/// UTC; cache.db and log datetimes carry no zone designator and the UTC
/// assumption is recorded in report metadata. Throws UnparsableTimestamp.
Timestamp normalize_timestamp(std::string_view raw, TimeHint hint);

std::optional<Timestamp> try_normalize_timestamp(std::string_view raw, TimeHint hint);

/// Attempt all four grammars in declaration order; nullopt when none match.
std::optional<Timestamp> try_normalize_any(std::string_view raw);

enum class ArtefactClass { Database, Log, WebCache, Config, MemoryDump, BrowserHistory };

std::string_view to_string(ArtefactClass c);
std::optional<ArtefactClass> artefact_class_from_string(std::string_view s);

/// Where a fact came from. `offset` is set only for memory-dump carvings.
struct EvidenceRef {
    std::string path;
    std::optional<std::uint64_t> offset;
    ArtefactClass artefact_class = ArtefactClass::Database;

    friend bool operator==(const EvidenceRef&, const EvidenceRef&) = default;
};

enum class EventKind {
    Login,
    Logout,
    SyncCompleted,
    SyncFailed,
    FileModified,
    FolderCreated,
    FolderDeleted,
    FolderInactivated,
    FileViewed,
    FileDownloaded,
    FolderAccessed,
    WebShareAccessed,
    ShareCreated,
    CredentialFound,
    IdentityFound,
};

std::string_view to_string(EventKind k);

/// One normalized, timestamped fact with evidence provenance: the timeline
/// atom every parser emits into. Undated facts (credentials, cached files)
/// keep `time` absent rather than a sentinel epoch.
struct ForensicEvent {
    std::optional<Timestamp> time;
    EventKind kind = EventKind::IdentityFound;
    std::optional<std::string> actor;
    std::optional<std::string> object;
    std::vector<std::pair<std::string, std::string>> attributes;  // ordered, unique keys
    EvidenceRef source;

    friend bool operator==(const ForensicEvent&, const ForensicEvent&) = default;
};

/// Insert or overwrite an attribute, keeping keys unique and order stable.
void set_attribute(ForensicEvent& e, std::string key, std::string value);
const std::string* find_attribute(const ForensicEvent& e, std::string_view key);

/// Serialize one event as a JSON Lines record with fixed key order
/// (time, kind, actor, object, attributes, source). Absent optionals are
/// emitted as null. With mask_secrets, any "password" attribute value is
/// replaced by "***" and a secret_present=true attribute is appended.
std::string event_to_jsonl(const ForensicEvent& e, bool mask_secrets = true);

/// Merge per-artefact event streams into one timeline: ascending by instant,
/// undated events last, stable by (stream, position) within equal times,
/// exact duplicates collapsed to the first occurrence.
std::vector<ForensicEvent> merge_event_streams(
    const std::vector<std::vector<ForensicEvent>>& streams);

/// A user account row from the desktop cache.db user_table.
struct Account {
    std::int64_t user_id = 0;
    std::string username;
    std::optional<std::string> device_name;
    std::optional<Timestamp> created;
    EvidenceRef source;

    friend bool operator==(const Account&, const Account&) = default;
};

}  // namespace cloudme
