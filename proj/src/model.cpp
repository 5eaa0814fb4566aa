// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/model.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "cloudme/jsonx.hpp"

#include "cloudme/util.hpp"

namespace cloudme {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

struct CivilTime {
    int year, month, day, hour, minute, second;
    int millis = 0;
};

// "YYYY-MM-DD<sep>HH:MM:SS" with optional ".fff" when allow_fraction.
std::optional<CivilTime> parse_civil(std::string_view s, char sep, bool allow_fraction) {
    if (s.size() < 19) return std::nullopt;
    auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        if (pos + len > s.size()) return std::nullopt;
        auto part = s.substr(pos, len);
        if (!all_digits(part)) return std::nullopt;
        int v = 0;
        for (char c : part) v = v * 10 + (c - '0');
        return v;
    };
    if (s[4] != '-' || s[7] != '-' || s[10] != sep || s[13] != ':' || s[16] != ':')
        return std::nullopt;
    CivilTime t{};
    auto y = num(0, 4), mo = num(5, 2), d = num(8, 2);
    auto h = num(11, 2), mi = num(14, 2), se = num(17, 2);
    if (!y || !mo || !d || !h || !mi || !se) return std::nullopt;
    t.year = *y; t.month = *mo; t.day = *d;
    t.hour = *h; t.minute = *mi; t.second = *se;
    std::size_t pos = 19;
    if (allow_fraction && pos < s.size() && s[pos] == '.') {
        std::size_t fs = ++pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        if (pos == fs || pos - fs > 3) return std::nullopt;
        int frac = 0;
        for (std::size_t i = fs; i < pos; ++i) frac = frac * 10 + (s[i] - '0');
        for (std::size_t i = pos - fs; i < 3; ++i) frac *= 10;
        t.millis = frac;
    }
    if (pos != s.size()) return std::nullopt;
    return t;
}

bool civil_valid(const CivilTime& t) {
    if (t.month < 1 || t.month > 12 || t.day < 1) return false;
    if (t.hour > 23 || t.minute > 59 || t.second > 59) return false;
    std::chrono::year_month_day ymd{std::chrono::year(t.year),
                                    std::chrono::month(static_cast<unsigned>(t.month)),
                                    std::chrono::day(static_cast<unsigned>(t.day))};
    return ymd.ok();
}

SysMillis civil_to_instant(const CivilTime& t) {
    using namespace std::chrono;
    sys_days d{year_month_day{year(t.year), month(static_cast<unsigned>(t.month)),
                              day(static_cast<unsigned>(t.day))}};
    return sys_time<milliseconds>{d.time_since_epoch() + hours(t.hour) +
                                  minutes(t.minute) + seconds(t.second) +
                                  milliseconds(t.millis)};
}

// Years representable as "1458192365602"-style epoch milliseconds; cap at
// year 9999 so absurd digit strings are rejected rather than wrapped.
constexpr std::uint64_t kMaxEpochMillis = 253402300799999ULL;

}  // namespace

std::string Timestamp::iso8601() const {
    using namespace std::chrono;
    auto ms = instant.time_since_epoch();
    auto days = floor<std::chrono::days>(instant);
    year_month_day ymd{days};
    auto tod = ms - days.time_since_epoch();
    auto h = duration_cast<hours>(tod);
    auto mi = duration_cast<minutes>(tod - h);
    auto se = duration_cast<seconds>(tod - h - mi);
    auto milli = duration_cast<milliseconds>(tod - h - mi - se);
    char buf[64];
    if (milli.count() != 0) {
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                      static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()),
                      static_cast<long long>(h.count()), static_cast<long long>(mi.count()),
                      static_cast<long long>(se.count()),
                      static_cast<long long>(milli.count()));
    } else {
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ",
                      static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()),
                      static_cast<long long>(h.count()), static_cast<long long>(mi.count()),
                      static_cast<long long>(se.count()));
    }
    return buf;
}

Timestamp normalize_timestamp(std::string_view raw, TimeHint hint) {
    if (raw.empty()) throw UnparsableTimestamp(raw);
    std::optional<CivilTime> civil;
    switch (hint) {
        case TimeHint::SqliteDatetime:
            civil = parse_civil(raw, ' ', true);
            break;
        case TimeHint::Iso8601Z: {
            if (raw.size() < 20 || raw.back() != 'Z') throw UnparsableTimestamp(raw);
            civil = parse_civil(raw.substr(0, raw.size() - 1), 'T', true);
            break;
        }
        case TimeHint::LogPrefix: {
            auto body = raw;
            if (!body.empty() && body.back() == ':') body.remove_suffix(1);
            civil = parse_civil(body, ' ', false);
            break;
        }
        case TimeHint::EpochMillis: {
            if (!all_digits(raw)) throw UnparsableTimestamp(raw);
            auto ms = parse_u64(raw);
            if (!ms || *ms > kMaxEpochMillis) throw UnparsableTimestamp(raw);
            Timestamp t;
            t.instant = SysMillis{std::chrono::milliseconds(static_cast<std::int64_t>(*ms))};
            t.raw = std::string(raw);
            return t;
        }
    }
    if (!civil || !civil_valid(*civil)) throw UnparsableTimestamp(raw);
    Timestamp t;
    t.instant = civil_to_instant(*civil);
    t.raw = std::string(raw);
    return t;
}

std::optional<Timestamp> try_normalize_timestamp(std::string_view raw, TimeHint hint) {
    try {
        return normalize_timestamp(raw, hint);
    } catch (const UnparsableTimestamp&) {
        return std::nullopt;
    }
}

std::optional<Timestamp> try_normalize_any(std::string_view raw) {
    for (auto hint : {TimeHint::SqliteDatetime, TimeHint::Iso8601Z, TimeHint::LogPrefix,
                      TimeHint::EpochMillis}) {
        if (auto t = try_normalize_timestamp(raw, hint)) return t;
    }
    return std::nullopt;
}

std::string_view to_string(ArtefactClass c) {
    switch (c) {
        case ArtefactClass::Database: return "Database";
        case ArtefactClass::Log: return "Log";
        case ArtefactClass::WebCache: return "WebCache";
        case ArtefactClass::Config: return "Config";
        case ArtefactClass::MemoryDump: return "MemoryDump";
        case ArtefactClass::BrowserHistory: return "BrowserHistory";
    }
    return "?";
}

std::optional<ArtefactClass> artefact_class_from_string(std::string_view s) {
    for (auto c : {ArtefactClass::Database, ArtefactClass::Log, ArtefactClass::WebCache,
                   ArtefactClass::Config, ArtefactClass::MemoryDump,
                   ArtefactClass::BrowserHistory})
        if (s == to_string(c)) return c;
    return std::nullopt;
}

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::Login: return "Login";
        case EventKind::Logout: return "Logout";
        case EventKind::SyncCompleted: return "SyncCompleted";
        case EventKind::SyncFailed: return "SyncFailed";
        case EventKind::FileModified: return "FileModified";
        case EventKind::FolderCreated: return "FolderCreated";
        case EventKind::FolderDeleted: return "FolderDeleted";
        case EventKind::FolderInactivated: return "FolderInactivated";
        case EventKind::FileViewed: return "FileViewed";
        case EventKind::FileDownloaded: return "FileDownloaded";
        case EventKind::FolderAccessed: return "FolderAccessed";
        case EventKind::WebShareAccessed: return "WebShareAccessed";
        case EventKind::ShareCreated: return "ShareCreated";
        case EventKind::CredentialFound: return "CredentialFound";
        case EventKind::IdentityFound: return "IdentityFound";
    }
    return "?";
}

void set_attribute(ForensicEvent& e, std::string key, std::string value) {
    for (auto& [k, v] : e.attributes) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    e.attributes.emplace_back(std::move(key), std::move(value));
}

const std::string* find_attribute(const ForensicEvent& e, std::string_view key) {
    for (const auto& [k, v] : e.attributes)
        if (k == key) return &v;
    return nullptr;
}

std::string event_to_jsonl(const ForensicEvent& e, bool mask_secrets) {
    nlohmann::ordered_json j;
    j["time"] = e.time ? nlohmann::ordered_json(e.time->iso8601()) : nlohmann::ordered_json(nullptr);
    j["kind"] = std::string(to_string(e.kind));
    j["actor"] = e.actor ? nlohmann::ordered_json(*e.actor) : nlohmann::ordered_json(nullptr);
    j["object"] = e.object ? nlohmann::ordered_json(*e.object) : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json attrs = nlohmann::ordered_json::object();
    bool had_secret = false;
    for (const auto& [k, v] : e.attributes) {
        if (mask_secrets && k == "password") {
            attrs[k] = "***";
            had_secret = true;
        } else {
            attrs[k] = v;
        }
    }
    if (had_secret) attrs["secret_present"] = "true";
    j["attributes"] = std::move(attrs);
    nlohmann::ordered_json src;
    src["path"] = e.source.path;
    src["offset"] = e.source.offset ? nlohmann::ordered_json(*e.source.offset)
                                    : nlohmann::ordered_json(nullptr);
    src["artefact_class"] = std::string(to_string(e.source.artefact_class));
    j["source"] = std::move(src);
    return dump_compact(j);
}

std::vector<ForensicEvent> merge_event_streams(
    const std::vector<std::vector<ForensicEvent>>& streams) {
    struct Tagged {
        const ForensicEvent* ev;
        std::size_t stream, pos;
    };
    std::vector<Tagged> all;
    for (std::size_t s = 0; s < streams.size(); ++s)
        for (std::size_t i = 0; i < streams[s].size(); ++i)
            all.push_back({&streams[s][i], s, i});

    std::stable_sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
        const auto& ta = a.ev->time;
        const auto& tb = b.ev->time;
        if (ta.has_value() != tb.has_value()) return ta.has_value();  // undated last
        if (ta && tb && ta->instant != tb->instant) return ta->instant < tb->instant;
        return false;  // stable: input order preserved within equal keys
    });

    std::vector<ForensicEvent> out;
    out.reserve(all.size());
    // Exact-duplicate detection over every field: hash on the (possibly
    // lossy) serialized form, confirm with field equality.
    std::unordered_map<std::string, std::vector<const ForensicEvent*>> seen;
    for (const auto& t : all) {
        std::string key = event_to_jsonl(*t.ev, /*mask_secrets=*/false);
        if (t.ev->time) key += "|" + t.ev->time->raw;
        auto& bucket = seen[std::move(key)];
        bool duplicate = false;
        for (const auto* prior : bucket)
            if (*prior == *t.ev) {
                duplicate = true;
                break;
            }
        if (!duplicate) {
            bucket.push_back(t.ev);
            out.push_back(*t.ev);
        }
    }
    return out;
}

}  // namespace cloudme
