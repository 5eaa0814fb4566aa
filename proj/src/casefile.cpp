// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/casefile.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <ostream>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <nlohmann/json.hpp>

#include "cloudme/jsonx.hpp"

#include "cloudme/cachedb.hpp"
#include "cloudme/csv.hpp"
#include "cloudme/logscan.hpp"
#include "cloudme/mobiledb.hpp"
#include "cloudme/sqlite_reader.hpp"
#include "cloudme/util.hpp"
#include "cloudme/webcache.hpp"
#include "cloudme/weburl.hpp"

namespace cloudme {

namespace fs = std::filesystem;

namespace {

struct UnitResult {
    std::vector<ForensicEvent> events;
    std::vector<std::string> warnings;
    std::vector<Account> accounts;
    std::vector<IdentityFact> facts;
};

std::string relativize(const std::string& path, const fs::path& root) {
    auto rel = fs::path(path).lexically_relative(root);
    if (rel.empty() || rel.native().rfind("..", 0) == 0) return path;
    return rel.generic_string();
}

bool filename_is(const fs::path& p, std::string_view name) {
    return iequals_ascii(p.filename().string(), name);
}

bool path_contains(const std::string& path, std::string_view needle) {
    return to_lower_ascii(path).find(to_lower_ascii(needle)) != std::string::npos;
}

void parse_config_hit(const fs::path& path, const EvidenceRef& source, UnitResult& out) {
    auto name = path.filename().string();
    if (path.extension() == ".reg") {
        auto facts = parse_reg_export(read_file_bytes(path), source);
        out.facts.insert(out.facts.end(), facts.begin(), facts.end());
        return;
    }
    if (iequals_ascii(name, "Sync.conf")) {
        auto facts = parse_sync_conf(read_file_bytes(path), source);
        out.facts.insert(out.facts.end(), facts.begin(), facts.end());
        return;
    }
    if (iequals_ascii(name, "user_data.xml")) {
        auto entries = parse_user_data_xml(read_file_bytes(path));
        out.facts.push_back(
            extract_mobile_credentials(entries, CredentialOrigin::AndroidUserDataXml, source));
        return;
    }
    if (path.extension() == ".plist") {
        auto tree = parse_plist(path);
        if (iequals_ascii(name, "com.xcerion.icloud.iphone.plist")) {
            out.facts.push_back(extract_mobile_credentials(flatten_plist_strings(tree),
                                                           CredentialOrigin::IosPlist, source));
        } else if (auto fact = extract_desktop_identity(tree, source)) {
            out.facts.push_back(std::move(*fact));
        }
        return;
    }
    out.warnings.push_back(source.path + ": unrecognized configuration artefact");
}

UnitResult process_hit(const ArtefactHit& hit) {
    UnitResult out;
    fs::path path(hit.path);
    EvidenceRef source{hit.path, std::nullopt, hit.artefact_class};

    switch (hit.artefact_class) {
        case ArtefactClass::Database: {
            if (filename_is(path, "db.sdb")) {
                auto db = parse_dbsdb(path);
                out.warnings = db.warnings;
                auto history = join_file_view_history(db);
                if (history.dropped)
                    out.warnings.push_back(hit.path + ": " + std::to_string(history.dropped) +
                                           " file rows without a folder row (dropped)");
                out.events = events_from_dbsdb(history, source);
            } else if (path_contains(hit.path, "nsurlcache")) {
                auto cache = parse_nsurlcache(path);
                out.warnings = cache.warnings;
                auto docs = dispatch_cached_documents(cache);
                out.warnings.insert(out.warnings.end(), docs.warnings.begin(),
                                    docs.warnings.end());
                out.events = events_from_harvest(docs, ArtefactClass::Database, source);
                std::vector<UrlVisit> visits;
                for (const auto& r : cache.responses) visits.push_back({r.url, r.fetched});
                auto url_events = events_from_url_visits(visits, source);
                out.events.insert(out.events.end(), url_events.begin(), url_events.end());
            } else {
                auto db = parse_cachedb(path);
                out.warnings = db.warnings;
                auto history = join_sync_history(db);
                if (history.dropped)
                    out.warnings.push_back(hit.path + ": " + std::to_string(history.dropped) +
                                           " file rows dropped by inner-join semantics");
                out.events = events_from_cachedb(history, db.accounts, source);
                out.accounts = db.accounts;
            }
            break;
        }
        case ArtefactClass::Log: {
            auto log = parse_log_file(path);
            out.events = events_from_log(log, source);
            break;
        }
        case ArtefactClass::Config: {
            parse_config_hit(path, source, out);
            auto events = events_from_identity_facts(out.facts);
            out.events.insert(out.events.end(), events.begin(), events.end());
            break;
        }
        case ArtefactClass::WebCache: {
            auto harvest = harvest_cache_dir(path);
            out.warnings = harvest.warnings;
            out.events = events_from_harvest(harvest, ArtefactClass::WebCache, source);
            break;
        }
        case ArtefactClass::BrowserHistory: {
            auto visits = read_url_visits(path);
            out.events = events_from_url_visits(visits, source);
            break;
        }
        case ArtefactClass::MemoryDump:
            out.warnings.push_back(hit.path + ": memory dumps are carved explicitly (see carve)");
            break;
    }
    return out;
}

nlohmann::ordered_json identity_json(const IdentitySummary& ids, bool reveal) {
    nlohmann::ordered_json j;
    auto accounts = nlohmann::ordered_json::array();
    for (const auto& a : ids.accounts) {
        nlohmann::ordered_json aj;
        aj["user_id"] = a.user_id;
        aj["username"] = a.username;
        aj["device_name"] = a.device_name ? nlohmann::ordered_json(*a.device_name)
                                          : nlohmann::ordered_json(nullptr);
        aj["created"] = a.created ? nlohmann::ordered_json(a.created->iso8601())
                                  : nlohmann::ordered_json(nullptr);
        accounts.push_back(std::move(aj));
    }
    j["accounts"] = std::move(accounts);
    auto facts = nlohmann::ordered_json::array();
    for (const auto& f : ids.facts) {
        nlohmann::ordered_json fj;
        fj["username"] = f.username ? nlohmann::ordered_json(*f.username)
                                    : nlohmann::ordered_json(nullptr);
        fj["client_id"] = f.client_id ? nlohmann::ordered_json(*f.client_id)
                                      : nlohmann::ordered_json(nullptr);
        fj["password"] = f.password
                             ? nlohmann::ordered_json(reveal ? *f.password : "***")
                             : nlohmann::ordered_json(nullptr);
        fj["last_upload"] = f.last_upload ? nlohmann::ordered_json(f.last_upload->iso8601())
                                          : nlohmann::ordered_json(nullptr);
        fj["source"] = f.source.path;
        facts.push_back(std::move(fj));
    }
    j["config_facts"] = std::move(facts);
    return j;
}

std::string csv_escape_attr(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\\' || c == ';' || c == '=') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string attributes_csv_cell(const ForensicEvent& e, bool reveal) {
    std::string out;
    bool had_secret = false;
    for (const auto& [k, v] : e.attributes) {
        if (!out.empty()) out.push_back(';');
        bool mask = !reveal && k == "password";
        had_secret |= mask;
        out += csv_escape_attr(k);
        out.push_back('=');
        out += csv_escape_attr(mask ? "***" : v);
    }
    if (had_secret) {
        if (!out.empty()) out.push_back(';');
        out += "secret_present=true";
    }
    return out;
}

}  // namespace

CaseReport run_case(const fs::path& root, const CaseOptions& opts) {
    CaseReport report;
    report.root = root.string();
    report.download_keywords = opts.download_keywords;

    auto profiles = builtin_profiles();
    if (!opts.profiles.empty()) {
        std::erase_if(profiles, [&](const PlatformProfile& p) {
            return std::find(opts.profiles.begin(), opts.profiles.end(), p.os) ==
                   opts.profiles.end();
        });
    }
    if (opts.profile_dir) {
        std::error_code ec;
        for (fs::directory_iterator it(*opts.profile_dir, ec); !ec && it != fs::directory_iterator();
             ++it) {
            if (it->path().extension() != ".json") continue;
            try {
                auto extra = profiles_from_json(read_file_bytes(it->path()));
                profiles.insert(profiles.end(), extra.begin(), extra.end());
            } catch (const std::exception& e) {
                report.warnings.push_back(it->path().string() + ": " + e.what());
            }
        }
    }
    for (const auto& p : profiles) report.profiles_used.push_back(p.os);

    ScanOpts scan_opts;
    scan_opts.download_keywords = opts.download_keywords;
    scan_opts.parallel = opts.parallel;
    auto scan = scan_root(root, profiles, scan_opts);
    report.warnings.insert(report.warnings.end(), scan.warnings.begin(), scan.warnings.end());

    // One parse per distinct (path, artefact class), preserving hit order.
    std::vector<ArtefactHit> units;
    std::set<std::pair<std::string, int>> seen;
    for (const auto& hit : scan.hits)
        if (seen.emplace(hit.path, static_cast<int>(hit.artefact_class)).second)
            units.push_back(hit);

    std::vector<UnitResult> results(units.size());
    auto run_unit = [&](std::size_t i) {
        try {
            results[i] = process_hit(units[i]);
        } catch (const std::exception& e) {
            results[i].warnings.push_back(units[i].path + ": " + e.what());
        }
    };
#ifdef _OPENMP
    if (opts.parallel && units.size() > 1) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(units.size()); ++i)
            run_unit(static_cast<std::size_t>(i));
    } else
#endif
    {
        for (std::size_t i = 0; i < units.size(); ++i) run_unit(i);
    }

    std::vector<std::vector<ForensicEvent>> streams;
    for (auto& r : results) {
        streams.push_back(std::move(r.events));
        report.warnings.insert(report.warnings.end(), r.warnings.begin(), r.warnings.end());
        report.identities.accounts.insert(report.identities.accounts.end(), r.accounts.begin(),
                                          r.accounts.end());
        report.identities.facts.insert(report.identities.facts.end(), r.facts.begin(),
                                       r.facts.end());
    }
    report.events = merge_event_streams(streams);

    // Location-independent output: everything relative to the root.
    for (auto& e : report.events) {
        e.source.path = relativize(e.source.path, root);
        for (auto& [key, value] : e.attributes)
            if (key == "origin") value = relativize(value, root);
    }
    report.hits = scan.hits;
    for (auto& h : report.hits) h.path = relativize(h.path, root);
    report.downloads = scan.downloads;
    for (auto& d : report.downloads) d.path = relativize(d.path, root);
    for (auto& f : report.identities.facts) f.source.path = relativize(f.source.path, root);
    for (auto& a : report.identities.accounts) a.source.path = relativize(a.source.path, root);

    std::sort(report.warnings.begin(), report.warnings.end());

    if (opts.timestamp_override) {
        report.generated_at = normalize_timestamp(*opts.timestamp_override, TimeHint::Iso8601Z);
    } else {
        auto now = std::chrono::time_point_cast<std::chrono::milliseconds>(
            std::chrono::system_clock::now());
        report.generated_at.instant = now;
        report.generated_at.raw = report.generated_at.iso8601();
    }
    return report;
}

std::optional<ReportFormat> report_format_from_string(std::string_view s) {
    auto lower = to_lower_ascii(s);
    if (lower == "jsonl") return ReportFormat::Jsonl;
    if (lower == "csv") return ReportFormat::Csv;
    if (lower == "summary") return ReportFormat::Summary;
    return std::nullopt;
}

void emit_report(const CaseReport& report, ReportFormat format, std::ostream& out,
                 bool reveal_secrets) {
    switch (format) {
        case ReportFormat::Jsonl: {
            nlohmann::ordered_json header;
            header["tool"] = report.tool;
            header["version"] = report.version;
            header["root"] = report.root;
            header["generated_at"] = report.generated_at.iso8601();
            auto profs = nlohmann::ordered_json::array();
            for (auto os : report.profiles_used) profs.push_back(std::string(to_string(os)));
            header["profiles"] = std::move(profs);
            header["time_assumption"] = report.time_assumption;
            header["warnings"] = report.warnings;
            header["identity"] = identity_json(report.identities, reveal_secrets);
            auto hits = nlohmann::ordered_json::array();
            for (const auto& h : report.hits) {
                nlohmann::ordered_json hj;
                hj["profile"] = std::string(to_string(h.profile));
                hj["artefact_class"] = std::string(to_string(h.artefact_class));
                hj["path"] = h.path;
                hj["rule"] = h.rule;
                hits.push_back(std::move(hj));
            }
            header["hits"] = std::move(hits);
            auto downloads = nlohmann::ordered_json::array();
            for (const auto& d : report.downloads) {
                nlohmann::ordered_json dj;
                dj["profile"] = std::string(to_string(d.profile));
                dj["path"] = d.path;
                dj["keyword"] = d.keyword;
                downloads.push_back(std::move(dj));
            }
            header["downloads"] = std::move(downloads);
            header["event_count"] = report.events.size();
            out << dump_compact(header) << "\n";
            for (const auto& e : report.events)
                out << event_to_jsonl(e, !reveal_secrets) << "\n";
            break;
        }
        case ReportFormat::Csv: {
            out << csv_row({"time", "kind", "actor", "object", "attributes", "source_path",
                            "source_offset", "source_class"})
                << "\n";
            for (const auto& e : report.events) {
                out << csv_row({e.time ? e.time->iso8601() : "",
                                std::string(to_string(e.kind)), e.actor.value_or(""),
                                e.object.value_or(""), attributes_csv_cell(e, reveal_secrets),
                                e.source.path,
                                e.source.offset ? std::to_string(*e.source.offset) : "",
                                std::string(to_string(e.source.artefact_class))})
                    << "\n";
            }
            break;
        }
        case ReportFormat::Summary: {
            out << report.tool << " " << report.version << " case report\n";
            out << "root: " << report.root << "\n";
            out << "generated_at: " << report.generated_at.iso8601() << "\n";
            out << "note: " << report.time_assumption << "\n";
            out << "artefact hits: " << report.hits.size() << "\n";
            std::map<std::string, std::size_t> counts;
            for (const auto& e : report.events) counts[std::string(to_string(e.kind))]++;
            out << "events: " << report.events.size() << "\n";
            for (const auto& [kind, n] : counts) out << "  " << kind << ": " << n << "\n";
            out << "accounts:\n";
            for (const auto& a : report.identities.accounts)
                out << "  " << a.user_id << " " << a.username
                    << (a.device_name ? " (" + *a.device_name + ")" : "") << "\n";
            out << "identity facts:\n";
            for (const auto& f : report.identities.facts) {
                out << "  ";
                if (f.username) out << "user=" << *f.username << " ";
                if (f.client_id) out << "client_id=" << *f.client_id << " ";
                if (f.password) out << "password=" << (reveal_secrets ? *f.password : "***") << " ";
                out << "[" << f.source.path << "]\n";
            }
            out << "warnings: " << report.warnings.size() << "\n";
            for (const auto& w : report.warnings) out << "  " << w << "\n";
            break;
        }
    }
}

}  // namespace cloudme
