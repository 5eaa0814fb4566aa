// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include <doctest.h>

#include <random>

#include "cloudme/model.hpp"

using namespace cloudme;

TEST_SUITE("model") {

TEST_CASE("iso8601z grammar") {
    auto t = normalize_timestamp("2016-03-16T04:41:34Z", TimeHint::Iso8601Z);
    CHECK(t.raw == "2016-03-16T04:41:34Z");
    CHECK(t.iso8601() == "2016-03-16T04:41:34Z");
    CHECK(t.instant.time_since_epoch().count() == 1458103294000LL);
}

TEST_CASE("epoch milliseconds grammar") {
    // logout URL r= parameter; value cross-checked against an external
    // epoch converter
    auto t = normalize_timestamp("1458192365602", TimeHint::EpochMillis);
    CHECK(t.iso8601() == "2016-03-17T05:26:05.602Z");
    CHECK(t.raw == "1458192365602");
}

TEST_CASE("sqlite datetime grammar") {
    auto t = normalize_timestamp("2016-03-16 12:25:07", TimeHint::SqliteDatetime);
    CHECK(t.iso8601() == "2016-03-16T12:25:07Z");
    CHECK(t.raw == "2016-03-16 12:25:07");
}

TEST_CASE("log prefix grammar accepts trailing colon") {
    auto t = normalize_timestamp("2016-03-15 13:48:22", TimeHint::LogPrefix);
    CHECK(t.iso8601() == "2016-03-15T13:48:22Z");
    auto t2 = normalize_timestamp("2016-03-15 13:48:22:", TimeHint::LogPrefix);
    CHECK(t2.instant == t.instant);
}

TEST_CASE("unparsable inputs") {
    CHECK_THROWS_AS(normalize_timestamp("", TimeHint::SqliteDatetime), UnparsableTimestamp);
    CHECK_THROWS_AS(normalize_timestamp("2016-03-16T04:41:34Z", TimeHint::SqliteDatetime),
                    UnparsableTimestamp);
    CHECK_THROWS_AS(normalize_timestamp("2016-13-01 00:00:00", TimeHint::SqliteDatetime),
                    UnparsableTimestamp);
    CHECK_THROWS_AS(normalize_timestamp("2016-02-30 00:00:00", TimeHint::SqliteDatetime),
                    UnparsableTimestamp);
    CHECK_THROWS_AS(normalize_timestamp("not a time", TimeHint::Iso8601Z), UnparsableTimestamp);
    CHECK_THROWS_AS(normalize_timestamp("99999999999999999999", TimeHint::EpochMillis),
                    UnparsableTimestamp);
}

TEST_CASE("every corpus timestamp string parses and reserializes as iso8601") {
    // Strings as they appear across the evidence corpus.
    const std::pair<const char*, TimeHint> samples[] = {
        {"2016-03-16 12:25:07", TimeHint::SqliteDatetime},
        {"2016-03-16 12:25:10", TimeHint::SqliteDatetime},
        {"2016-03-16 12:25:13", TimeHint::SqliteDatetime},
        {"2016-03-16 12:25:20", TimeHint::SqliteDatetime},
        {"2016-03-15 22:06:55", TimeHint::SqliteDatetime},
        {"2016-03-16 04:41:40", TimeHint::SqliteDatetime},
        {"2016-03-15 12:47:25", TimeHint::SqliteDatetime},
        {"2016-03-16T04:41:12Z", TimeHint::Iso8601Z},
        {"2016-03-16T04:41:34Z", TimeHint::Iso8601Z},
        {"2016-03-17T04:57:49Z", TimeHint::Iso8601Z},
        {"2016-03-15T14:43:17Z", TimeHint::Iso8601Z},
        {"2016-03-15T14:28:27Z", TimeHint::Iso8601Z},
        {"2016-03-15T14:28:35Z", TimeHint::Iso8601Z},
        {"2016-03-15T14:29:24Z", TimeHint::Iso8601Z},
        {"2016-03-16T11:53:52Z", TimeHint::Iso8601Z},
        {"2016-03-15 13:48:22", TimeHint::LogPrefix},
        {"2016-03-15 14:52:02", TimeHint::LogPrefix},
        {"2016-03-15 14:56:30", TimeHint::LogPrefix},
        {"2016-03-15 14:51:52", TimeHint::LogPrefix},
        {"1458192365602", TimeHint::EpochMillis},
    };
    for (const auto& [raw, hint] : samples) {
        CAPTURE(raw);
        auto t = normalize_timestamp(raw, hint);
        CHECK(t.raw == raw);
        auto iso = t.iso8601();
        CHECK(iso.size() >= 20);
        CHECK(iso.back() == 'Z');
        CHECK(iso[10] == 'T');
        // the ISO form itself is parseable
        auto t2 = normalize_timestamp(iso, TimeHint::Iso8601Z);
        CHECK(t2.instant == t.instant);
    }
}

namespace {

ForensicEvent make_event(const char* time, EventKind kind, const char* actor) {
    ForensicEvent e;
    if (time) e.time = normalize_timestamp(time, TimeHint::SqliteDatetime);
    e.kind = kind;
    if (actor) e.actor = actor;
    e.source = {"x/cache.db", std::nullopt, ArtefactClass::Database};
    return e;
}

}  // namespace

TEST_CASE("merge: empty input") {
    CHECK(merge_event_streams({}).empty());
    CHECK(merge_event_streams({{}, {}}).empty());
}

TEST_CASE("merge: exact duplicates collapse") {
    auto login = make_event("2016-03-15 13:48:22", EventKind::Login, "adamthomson");
    auto merged = merge_event_streams({{login}, {login}});
    REQUIRE(merged.size() == 1);
    CHECK(merged[0] == login);
}

TEST_CASE("merge: sort contract with undated last") {
    auto a = make_event("2016-03-16 00:00:00", EventKind::Login, "a");
    auto b = make_event("2016-03-15 00:00:00", EventKind::Login, "b");
    auto c = make_event("2016-03-15 00:00:00", EventKind::Logout, "c");
    auto undated = make_event(nullptr, EventKind::CredentialFound, "d");
    auto merged = merge_event_streams({{a, b, c, undated}});
    REQUIRE(merged.size() == 4);
    CHECK(merged[0].actor == "b");
    CHECK(merged[1].actor == "c");  // stable within the equal instant
    CHECK(merged[2].actor == "a");
    CHECK(merged[3].actor == "d");
}

TEST_CASE("merge: idempotence over random streams") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 20; ++round) {
        std::vector<std::vector<ForensicEvent>> streams(1 + rng() % 4);
        for (auto& s : streams) {
            std::size_t n = rng() % 8;
            for (std::size_t i = 0; i < n; ++i) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "2016-03-%02d 0%d:00:00",
                              static_cast<int>(1 + rng() % 28), static_cast<int>(rng() % 10));
                auto e = make_event(rng() % 5 ? buf : nullptr,
                                    rng() % 2 ? EventKind::Login : EventKind::FileModified,
                                    rng() % 2 ? "alice" : "bob");
                s.push_back(std::move(e));
            }
        }
        auto once = merge_event_streams(streams);
        auto twice = merge_event_streams({once});
        CHECK(once == twice);
    }
}

TEST_CASE("event jsonl: fixed key order and secret masking") {
    auto e = make_event("2016-03-16 04:41:12", EventKind::ShareCreated, nullptr);
    e.object = "CloudMe";
    set_attribute(e, "webshare_id", "718585");
    set_attribute(e, "password", "digitalevidence");

    auto masked = event_to_jsonl(e, true);
    CHECK(masked.find("\"password\":\"***\"") != std::string::npos);
    CHECK(masked.find("\"secret_present\":\"true\"") != std::string::npos);
    CHECK(masked.find("digitalevidence") == std::string::npos);

    auto revealed = event_to_jsonl(e, false);
    CHECK(revealed.find("digitalevidence") != std::string::npos);

    auto tpos = masked.find("\"time\"");
    auto kpos = masked.find("\"kind\"");
    auto apos = masked.find("\"actor\"");
    auto opos = masked.find("\"object\"");
    auto atpos = masked.find("\"attributes\"");
    auto spos = masked.find("\"source\"");
    CHECK(tpos < kpos);
    CHECK(kpos < apos);
    CHECK(apos < opos);
    CHECK(opos < atpos);
    CHECK(atpos < spos);
}

TEST_CASE("serialization survives non-utf8 evidence bytes") {
    ForensicEvent e;
    e.kind = EventKind::FileViewed;
    e.object = std::string("badname-\xC3\x28\xFF.txt");  // invalid UTF-8 sequence
    e.source = {"dir/\xFFweird", std::nullopt, ArtefactClass::WebCache};
    set_attribute(e, "raw", std::string("\xFE\xFF"));
    std::string line;
    CHECK_NOTHROW(line = event_to_jsonl(e, true));
    CHECK(!line.empty());

    // distinct invalid-byte payloads stay distinct through the merge
    ForensicEvent other = e;
    set_attribute(other, "raw", std::string("\xFE\xFD"));
    auto merged = merge_event_streams({{e, other, e}});
    CHECK(merged.size() == 2);
}

TEST_CASE("attributes stay unique and ordered") {
    ForensicEvent e;
    set_attribute(e, "k1", "a");
    set_attribute(e, "k2", "b");
    set_attribute(e, "k1", "c");
    REQUIRE(e.attributes.size() == 2);
    CHECK(e.attributes[0] == std::pair<std::string, std::string>{"k1", "c"});
    CHECK(*find_attribute(e, "k2") == "b");
    CHECK(find_attribute(e, "nope") == nullptr);
}

}  // TEST_SUITE
