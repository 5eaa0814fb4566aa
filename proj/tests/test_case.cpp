// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "cloudme/casefile.hpp"
#include "support/fixtures.hpp"

using namespace cloudme;

namespace {

CaseOptions pinned_options() {
    CaseOptions opts;
    opts.timestamp_override = "2026-01-02T03:04:05Z";
    return opts;
}

std::string render_jsonl(const CaseReport& report) {
    std::ostringstream out;
    emit_report(report, ReportFormat::Jsonl, out, false);
    return out.str();
}

std::size_t count_kind(const CaseReport& report, EventKind kind) {
    std::size_t n = 0;
    for (const auto& e : report.events) n += e.kind == kind;
    return n;
}

}  // namespace

TEST_SUITE("case") {

TEST_CASE("composite evidence tree produces the full event union") {
    fixtures::TempDir tmp;
    auto root = tmp / "root";
    fixtures::build_composite_root(root);

    auto report = run_case(root, pinned_options());

    CHECK(report.warnings.empty());
    CHECK(report.hits.size() >= 4);

    // the five published file rows
    CHECK(count_kind(report, EventKind::FileModified) == 5);
    std::set<std::string> modified_objects;
    for (const auto& e : report.events)
        if (e.kind == EventKind::FileModified) modified_objects.insert(*e.object);
    CHECK(modified_objects.count(
              "C:/Users/anonymous/Documents/MacSyncFolder/Enron3111.jpg") == 1);
    CHECK(modified_objects.count(
              "C:/Users/anonymous/Documents/MacSyncFolder/Enron3111.zip") == 1);

    // the daily log
    CHECK(count_kind(report, EventKind::Login) == 1);
    CHECK(count_kind(report, EventKind::SyncFailed) == 3);

    // webshares -> ShareCreated (6) plus the folder-listing tag (1)
    CHECK(count_kind(report, EventKind::ShareCreated) == 7);
    CHECK(count_kind(report, EventKind::WebShareAccessed) == 3);

    // cache.db + device profile identities, Sync.conf facts
    CHECK(count_kind(report, EventKind::IdentityFound) == 4);
    CHECK(count_kind(report, EventKind::FileViewed) == 1);
    CHECK(count_kind(report, EventKind::SyncCompleted) == 2);

    REQUIRE(report.identities.accounts.size() == 1);
    CHECK(report.identities.accounts[0].username == "adamthomson");
    CHECK(report.identities.facts.size() == 2);

    // events are sorted: dated ascending, undated at the end
    bool seen_undated = false;
    SysMillis last{};
    for (const auto& e : report.events) {
        if (!e.time) {
            seen_undated = true;
            continue;
        }
        CHECK_FALSE(seen_undated);
        CHECK(e.time->instant >= last);
        last = e.time->instant;
    }

    // every event source is an artefact hit (relativized)
    std::set<std::string> hit_paths;
    for (const auto& h : report.hits) hit_paths.insert(h.path);
    for (const auto& e : report.events) {
        CAPTURE(e.source.path);
        CHECK(hit_paths.count(e.source.path) == 1);
    }
}

TEST_CASE("empty root gives an empty report") {
    fixtures::TempDir tmp;
    auto report = run_case(tmp.path(), pinned_options());
    CHECK(report.hits.empty());
    CHECK(report.events.empty());
    CHECK(report.warnings.empty());
}

TEST_CASE("unreadable root is the only fatal error") {
    CHECK_THROWS_AS(run_case("/nonexistent/case/root", pinned_options()), RootUnreadable);
}

TEST_CASE("reports are byte-deterministic") {
    fixtures::TempDir tmp;
    auto root = tmp / "root";
    fixtures::build_composite_root(root);
    auto first = render_jsonl(run_case(root, pinned_options()));
    auto second = render_jsonl(run_case(root, pinned_options()));
    CHECK(first == second);
    CHECK(first.find("2026-01-02T03:04:05Z") != std::string::npos);
}

TEST_CASE("corrupting one artefact changes only its events plus one warning") {
    fixtures::TempDir tmp;
    auto root = tmp / "root";
    fixtures::build_composite_root(root);
    auto baseline = run_case(root, pinned_options());

    std::ofstream(root / "Users/anonymous/AppData/Local/CloudMe/cache.db",
                  std::ios::binary)
        << "garbage, not a database";
    auto corrupted = run_case(root, pinned_options());

    REQUIRE(corrupted.warnings.size() == baseline.warnings.size() + 1);
    bool cache_warning = false;
    for (const auto& w : corrupted.warnings)
        cache_warning |= w.find("cache.db") != std::string::npos;
    CHECK(cache_warning);

    auto without_cachedb = [](const CaseReport& r) {
        std::vector<ForensicEvent> out;
        for (const auto& e : r.events)
            if (e.source.path.find("cache.db") == std::string::npos) out.push_back(e);
        return out;
    };
    CHECK(without_cachedb(baseline) == without_cachedb(corrupted));
    CHECK(count_kind(corrupted, EventKind::FileModified) == 0);
}

TEST_CASE("csv and summary renderings are stable") {
    fixtures::TempDir tmp;
    auto root = tmp / "root";
    fixtures::build_composite_root(root);
    auto report = run_case(root, pinned_options());

    std::ostringstream csv;
    emit_report(report, ReportFormat::Csv, csv, false);
    auto csv_text = csv.str();
    CHECK(csv_text.rfind("time,kind,actor,object,attributes,source_path,source_offset,"
                         "source_class\n",
                         0) == 0);
    // masked secret with escaping contract
    CHECK(csv_text.find("password=***") != std::string::npos);
    CHECK(csv_text.find("digitalevidence") == std::string::npos);

    std::ostringstream summary;
    emit_report(report, ReportFormat::Summary, summary, false);
    CHECK(summary.str().find("FileModified: 5") != std::string::npos);
    CHECK(summary.str().find("adamthomson") != std::string::npos);

    std::ostringstream revealed;
    emit_report(report, ReportFormat::Csv, revealed, true);
    CHECK(revealed.str().find("digitalevidence") != std::string::npos);
}

TEST_CASE("profile filter narrows the scan") {
    fixtures::TempDir tmp;
    auto root = tmp / "root";
    fixtures::build_composite_root(root);
    auto opts = pinned_options();
    opts.profiles = {Os::Ubuntu};
    auto report = run_case(root, opts);
    // Sync.conf plus the web-cache tree are in Ubuntu scope; the Windows
    // cache.db and logs are not
    REQUIRE(report.hits.size() == 2);
    CHECK(count_kind(report, EventKind::FileModified) == 0);
    CHECK(count_kind(report, EventKind::Login) == 0);
    CHECK(count_kind(report, EventKind::ShareCreated) == 7);
    // Sync.conf facts (2) plus the device profile identity (1)
    CHECK(count_kind(report, EventKind::IdentityFound) == 3);
}

}  // TEST_SUITE
