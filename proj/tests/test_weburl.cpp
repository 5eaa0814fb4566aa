// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include <doctest.h>

#include <fstream>
#include <random>

#include "cloudme/weburl.hpp"
#include "support/fixtures.hpp"

using namespace cloudme;

namespace {

std::string random_name(std::mt19937_64& rng, bool allow_space = true) {
    static const char* alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    std::string s;
    std::size_t len = 1 + rng() % 14;
    for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % 62]);
    if (allow_space && (rng() % 3) == 0) s.insert(s.size() / 2, " ");
    return s;
}

std::int64_t random_id(std::mt19937_64& rng) {
    return static_cast<std::int64_t>(rng() % 900000000000000LL) + 1;
}

}  // namespace

TEST_SUITE("weburl") {

TEST_CASE("logout url extracts the epoch") {
    auto c = classify_url("https://www.cloudme.com/en?r=1458192365602&logout=1");
    CHECK(c.kind == UrlKind::Logout);
    REQUIRE(c.epoch_ms.has_value());
    CHECK(*c.epoch_ms == 1458192365602ULL);
}

TEST_CASE("shared file download url") {
    auto c = classify_url(
        "https://www.cloudme.com/v1/documents/562958569596145/4457368187/1/Enron3111.jpg"
        "?dl=Enron3111.jpg");
    CHECK(c.kind == UrlKind::SharedFileDownload);
    CHECK(c.folder_id == 562958569596145LL);
    CHECK(c.document_id == 4457368187LL);
    CHECK(c.filename == "Enron3111.jpg");
}

TEST_CASE("file access url without dl") {
    auto c = classify_url(
        "https://www.cloudme.com/v1/documents/562958569596136/4457417804/1/Enron3111.jpg");
    CHECK(c.kind == UrlKind::FileAccessOrDownload);
    CHECK(c.folder_id == 562958569596136LL);
    CHECK(c.document_id == 4457417804LL);
}

TEST_CASE("folder fragments") {
    auto by_name = classify_url("https://www.cloudme.com/en#files:/Documents/WindowsSyncFolder");
    CHECK(by_name.kind == UrlKind::FolderAccessByName);
    CHECK(by_name.folder_name == "WindowsSyncFolder");

    auto by_id = classify_url("https://www.cloudme.com/en#files:f:562958569591836");
    CHECK(by_id.kind == UrlKind::FolderAccessById);
    CHECK(by_id.folder_id == 562958569591836LL);

    auto sync1 = classify_url("https://www.cloudme.com/en#sync:f:562958569591836");
    CHECK(sync1.kind == UrlKind::FolderSync);
    CHECK(sync1.folder_id == 562958569591836LL);

    auto sync2 = classify_url("https://www.cloudme.com/en#sync:/562958569591836");
    CHECK(sync2.kind == UrlKind::FolderSync);
    CHECK(sync2.folder_id == 562958569591836LL);

    auto sync3 = classify_url("https://www.cloudme.com/en#sync:f:562958569591836,CloudMe");
    CHECK(sync3.kind == UrlKind::FolderSync);
    CHECK(sync3.folder_id == 562958569591836LL);
    CHECK(sync3.folder_name == "CloudMe");

    auto share = classify_url("https://www.cloudme.com/en#webshares:/MacSyncFolder");
    CHECK(share.kind == UrlKind::WebShareAccess);
    CHECK(share.folder_name == "MacSyncFolder");
}

TEST_CASE("percent-encoded names decode") {
    auto c = classify_url("https://www.cloudme.com/en#webshares:/cloudme%20investigation");
    CHECK(c.kind == UrlKind::WebShareAccess);
    CHECK(c.folder_name == "cloudme investigation");
}

TEST_CASE("non-cloudme hosts and unmatched actions") {
    CHECK(classify_url("https://example.com/").kind == UrlKind::NotCloudMe);
    CHECK(classify_url("not a url").kind == UrlKind::NotCloudMe);
    CHECK(classify_url("https://www.cloudme.com/en").kind == UrlKind::NotCloudMe);
    CHECK(classify_url("https://notcloudme.com/en#files:f:1").kind == UrlKind::NotCloudMe);
    // subdomains of cloudme.com are in scope
    CHECK(classify_url("https://os.cloudme.com/v1/documents/1/2/1/x.txt").kind ==
          UrlKind::FileAccessOrDownload);
}

TEST_CASE("template round-trip for every action shape") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 25; ++round) {
        auto fid = random_id(rng);
        auto did = random_id(rng);
        auto name = random_name(rng);
        auto epoch = static_cast<std::uint64_t>(rng() % 2000000000000ULL);

        auto c1 = classify_url("https://www.cloudme.com/en#files:/Documents/" + name);
        CHECK(c1.kind == UrlKind::FolderAccessByName);
        CHECK(c1.folder_name == name);

        auto c2 = classify_url("https://www.cloudme.com/en#files:f:" + std::to_string(fid));
        CHECK(c2.kind == UrlKind::FolderAccessById);
        CHECK(c2.folder_id == fid);

        auto c3 = classify_url("https://www.cloudme.com/en#sync:f:" + std::to_string(fid) + "," +
                               name);
        CHECK(c3.kind == UrlKind::FolderSync);
        CHECK(c3.folder_id == fid);
        CHECK(c3.folder_name == name);

        auto file_name = random_name(rng, false) + ".pdf";
        auto c4 = classify_url("https://www.cloudme.com/v1/documents/" + std::to_string(fid) +
                               "/" + std::to_string(did) + "/1/" + file_name);
        CHECK(c4.kind == UrlKind::FileAccessOrDownload);
        CHECK(c4.folder_id == fid);
        CHECK(c4.document_id == did);
        CHECK(c4.filename == file_name);

        auto c5 = classify_url("https://www.cloudme.com/en#webshares:/" + name);
        CHECK(c5.kind == UrlKind::WebShareAccess);
        CHECK(c5.folder_name == name);

        auto c6 = classify_url("https://www.cloudme.com/v1/documents/" + std::to_string(fid) +
                               "/" + std::to_string(did) + "/1/" + file_name +
                               "?dl=" + file_name);
        CHECK(c6.kind == UrlKind::SharedFileDownload);
        CHECK(c6.filename == file_name);

        auto c7 = classify_url("https://www.cloudme.com/en?r=" + std::to_string(epoch) +
                               "&logout=1");
        CHECK(c7.kind == UrlKind::Logout);
        CHECK(c7.epoch_ms == epoch);
    }
}

TEST_CASE("url list file ingestion") {
    fixtures::TempDir tmp;
    auto f = tmp / "urls.txt";
    std::ofstream(f) << "# comment line\n"
                     << "https://www.cloudme.com/en?r=1458192365602&logout=1\t2016-03-17 05:26:05\n"
                     << "https://example.com/else,1458192365602\n"
                     << "https://www.cloudme.com/en#files:f:5\n";
    auto visits = read_url_list(f);
    REQUIRE(visits.size() == 3);
    CHECK(visits[0].time->raw == "2016-03-17 05:26:05");
    CHECK(visits[1].time->raw == "1458192365602");
    CHECK_FALSE(visits[2].time.has_value());

    EvidenceRef source{f.string(), std::nullopt, ArtefactClass::BrowserHistory};
    auto events = events_from_url_visits(visits, source);
    REQUIRE(events.size() == 2);  // example.com dropped
    CHECK(events[0].kind == EventKind::Logout);
    CHECK(events[1].kind == EventKind::FolderAccessed);
}

TEST_CASE("chrome history store") {
    fixtures::TempDir tmp;
    auto f = tmp / "History";
    // visit_time written in the Chrome timebase by the test itself
    constexpr std::int64_t kWindowsToUnixSeconds = 11644473600LL;
    std::int64_t unix_seconds = 1458192365;
    std::int64_t chrome_micros = (unix_seconds + kWindowsToUnixSeconds) * 1000000;
    fixtures::sqlite_exec(
        f, {"CREATE TABLE urls (id INTEGER PRIMARY KEY, url TEXT, title TEXT, "
            "last_visit_time INTEGER)",
            "CREATE TABLE visits (id INTEGER PRIMARY KEY, url INTEGER, visit_time INTEGER)",
            "INSERT INTO urls VALUES (1, 'https://www.cloudme.com/en#files:f:77', 't', 0)",
            "INSERT INTO visits VALUES (1, 1, " + std::to_string(chrome_micros) + ")"});
    auto visits = read_browser_history_db(f);
    REQUIRE(visits.size() == 1);
    CHECK(visits[0].url == "https://www.cloudme.com/en#files:f:77");
    CHECK(visits[0].time->iso8601() == "2016-03-17T05:26:05Z");
}

TEST_CASE("firefox history store") {
    fixtures::TempDir tmp;
    auto f = tmp / "places.sqlite";
    std::int64_t micros = 1458192365602000LL;
    fixtures::sqlite_exec(
        f, {"CREATE TABLE moz_places (id INTEGER PRIMARY KEY, url TEXT)",
            "CREATE TABLE moz_historyvisits (id INTEGER PRIMARY KEY, place_id INTEGER, "
            "visit_date INTEGER)",
            "INSERT INTO moz_places VALUES (3, 'https://www.cloudme.com/en#webshares:/X')",
            "INSERT INTO moz_historyvisits VALUES (1, 3, " + std::to_string(micros) + ")"});
    auto visits = read_browser_history_db(f);
    REQUIRE(visits.size() == 1);
    CHECK(visits[0].time->iso8601() == "2016-03-17T05:26:05.602Z");
}

}  // TEST_SUITE
