// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cloudme/jsonx.hpp"

#include "cloudme/cachedb.hpp"
#include "cloudme/carver.hpp"
#include "cloudme/casefile.hpp"
#include "cloudme/confparse.hpp"
#include "cloudme/locator.hpp"
#include "cloudme/logscan.hpp"
#include "cloudme/mobiledb.hpp"
#include "cloudme/util.hpp"
#include "cloudme/webcache.hpp"
#include "cloudme/weburl.hpp"

using namespace cloudme;

namespace {

// Exit codes: 0 clean, 1 completed with warnings, 2 fatal.
constexpr int kOk = 0;
constexpr int kWarnings = 1;
constexpr int kFatal = 2;

struct GlobalOpts {
    std::string format = "jsonl";
    bool reveal_secrets = false;
    std::string output;
    std::string timestamp;
};

std::ostream& open_output(const GlobalOpts& opts, std::ofstream& file_stream) {
    if (opts.output.empty()) return std::cout;
    file_stream.open(opts.output, std::ios::binary);
    if (!file_stream) throw Unreadable(opts.output, "cannot open for writing");
    return file_stream;
}

int finish(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return warnings.empty() ? kOk : kWarnings;
}

nlohmann::ordered_json fact_json(const IdentityFact& f, bool reveal) {
    nlohmann::ordered_json j;
    if (f.username) j["username"] = *f.username;
    if (f.client_id) j["client_id"] = *f.client_id;
    if (f.device_name) j["device_name"] = *f.device_name;
    if (f.password) {
        j["password"] = reveal ? *f.password : "***";
        if (!reveal) j["secret_present"] = "true";
    }
    if (f.last_upload) j["last_upload"] = f.last_upload->iso8601();
    if (f.sid) j["sid"] = *f.sid;
    j["source"] = f.source.path;
    return j;
}

int cmd_scan(const std::string& root, const std::vector<std::string>& profile_names,
             const std::vector<std::string>& download_keywords, const GlobalOpts& gopts) {
    auto profiles = builtin_profiles();
    if (!profile_names.empty() &&
        !(profile_names.size() == 1 && profile_names[0] == "all")) {
        std::vector<PlatformProfile> chosen;
        for (const auto& name : profile_names) {
            auto os = os_from_string(name);
            if (!os) {
                std::cerr << "error: unknown profile '" << name << "'\n";
                return kFatal;
            }
            for (const auto& p : profiles)
                if (p.os == *os) chosen.push_back(p);
        }
        profiles = std::move(chosen);
    }
    if (const char* dir = std::getenv("CLOUDME_SCOPE_PROFILE_DIR")) {
        std::error_code ec;
        for (std::filesystem::directory_iterator it(dir, ec);
             !ec && it != std::filesystem::directory_iterator(); ++it) {
            if (it->path().extension() != ".json") continue;
            auto extra = profiles_from_json(read_file_bytes(it->path()));
            profiles.insert(profiles.end(), extra.begin(), extra.end());
        }
    }

    ScanOpts opts;
    opts.download_keywords = download_keywords;
    auto result = scan_root(root, profiles, opts);

    std::ofstream file_stream;
    auto& out = open_output(gopts, file_stream);
    for (const auto& hit : result.hits) out << artefact_hit_to_jsonl(hit) << "\n";
    for (const auto& d : result.downloads) out << download_hit_to_jsonl(d) << "\n";
    return finish(result.warnings);
}

int cmd_parse_cachedb(const std::string& file, const GlobalOpts& gopts) {
    auto db = parse_cachedb(file);
    auto history = join_sync_history(db);
    std::ofstream file_stream;
    auto& out = open_output(gopts, file_stream);
    if (gopts.format == "csv") {
        out << sync_history_csv_header() << "\n";
        for (const auto& row : history.rows) out << sync_history_row_to_csv(row) << "\n";
    } else {
        for (const auto& row : history.rows) out << sync_history_row_to_jsonl(row) << "\n";
    }
    auto warnings = db.warnings;
    if (history.dropped)
        warnings.push_back(std::to_string(history.dropped) +
                           " file rows dropped by inner-join semantics");
    return finish(warnings);
}

int cmd_parse_dbsdb(const std::string& file, const GlobalOpts& gopts) {
    auto db = parse_dbsdb(file);
    auto history = join_file_view_history(db);
    std::ofstream file_stream;
    auto& out = open_output(gopts, file_stream);
    if (gopts.format == "csv") {
        out << file_view_csv_header() << "\n";
        for (const auto& row : history.rows) out << file_view_row_to_csv(row) << "\n";
    } else {
        for (const auto& row : history.rows) out << file_view_row_to_jsonl(row) << "\n";
    }
    auto warnings = db.warnings;
    if (history.dropped)
        warnings.push_back(std::to_string(history.dropped) +
                           " file rows dropped by inner-join semantics");
    return finish(warnings);
}

int cmd_parse_nsurlcache(const std::string& file, const GlobalOpts& gopts) {
    auto cache = parse_nsurlcache(file);
    auto docs = dispatch_cached_documents(cache);
    std::ofstream file_stream;
    auto& out = open_output(gopts, file_stream);
    for (const auto& r : cache.responses) {
        nlohmann::ordered_json j;
        j["url"] = r.url;
        j["fetched"] = r.fetched ? nlohmann::ordered_json(r.fetched->iso8601())
                                 : nlohmann::ordered_json(nullptr);
        j["body_bytes"] = r.body.size();
        out << dump_compact(j) << "\n";
    }
    nlohmann::ordered_json summary;
    summary["cached_responses"] = cache.responses.size();
    summary["recognized_documents"] = docs.document_count();
    out << dump_compact(summary) << "\n";
    auto warnings = cache.warnings;
    warnings.insert(warnings.end(), docs.warnings.begin(), docs.warnings.end());
    return finish(warnings);
}

int cmd_parse_logs(const std::string& target, const GlobalOpts& gopts) {
    namespace fs = std::filesystem;
    std::vector<std::string> warnings;
    std::vector<fs::path> files;
    if (fs::is_directory(target)) {
        std::vector<fs::path> daily, other;
        for (const auto& entry : fs::directory_iterator(target)) {
            if (!entry.is_regular_file()) continue;
            if (is_daily_log_name(entry.path().filename().string()))
                daily.push_back(entry.path());
            else if (entry.path().extension() == ".txt")
                other.push_back(entry.path());
        }
        std::sort(daily.begin(), daily.end());
        std::sort(other.begin(), other.end());
        files = daily;
        for (const auto& p : other) {
            warnings.push_back(p.string() + ": name does not match the daily log pattern");
            files.push_back(p);
        }
    } else {
        files.emplace_back(target);
    }

    std::ofstream file_stream;
    auto& out = open_output(gopts, file_stream);
    for (const auto& f : files) {
        auto log = parse_log_file(f);
        for (const auto& ev : log.events) {
            nlohmann::ordered_json j;
            j["time"] = ev.time.iso8601();
            j["kind"] = std::string(to_string(ev.kind));
            if (ev.username) j["username"] = *ev.username;
            if (ev.path) j["path"] = *ev.path;
            if (ev.url) j["url"] = *ev.url;
            if (ev.error_code) j["error_code"] = *ev.error_code;
            j["raw_line"] = ev.raw_line;
            j["file"] = f.string();
            out << dump_compact(j) << "\n";
        }
    }
    return finish(warnings);
}

int cmd_classify_urls(const std::string& file, const GlobalOpts& gopts) {
    auto visits = read_url_visits(file);
    std::ofstream file_stream;
    auto& out = open_output(gopts, file_stream);
    for (const auto& v : visits)
        out << url_classification_to_jsonl(v, classify_url(v.url)) << "\n";
    return kOk;
}

int cmd_parse_webcache(const std::string& dir, const GlobalOpts& gopts) {
    auto result = harvest_cache_dir(dir);
    std::ofstream file_stream;
    auto& out = open_output(gopts, file_stream);
    auto events = events_from_harvest(result, ArtefactClass::WebCache, std::nullopt);
    for (const auto& e : events) out << event_to_jsonl(e, !gopts.reveal_secrets) << "\n";
    for (const auto& t : result.thumbnails) {
        nlohmann::ordered_json j;
        j["thumbnail"] = t.path;
        j["folder_id"] = t.folder_id;
        j["document_id"] = t.document_id;
        j["thumbnail_id"] = t.thumbnail_id;
        out << dump_compact(j) << "\n";
    }
    return finish(result.warnings);
}

int cmd_parse_config(const std::string& file, std::string kind, const GlobalOpts& gopts) {
    EvidenceRef source{file, std::nullopt, ArtefactClass::Config};
    auto bytes = read_file_bytes(file);
    namespace fs = std::filesystem;
    auto name = fs::path(file).filename().string();

    if (kind == "auto") {
        auto probe = bytes.substr(0, 256);
        if (bytes.rfind("bplist0", 0) == 0 || fs::path(file).extension() == ".plist")
            kind = "plist";
        else if (probe.find("Windows Registry Editor") != std::string::npos ||
                 probe.rfind("REGEDIT4", 0) == 0 || fs::path(file).extension() == ".reg")
            kind = "reg";
        else if (iequals_ascii(name, "user_data.xml"))
            kind = "userdata";
        else if (bytes.find("<plist") != std::string::npos)
            kind = "plist";
        else if (bytes.find("<map") != std::string::npos)
            kind = "userdata";
        else
            kind = "conf";
        // UTF-16LE exports hide the header from the byte probe
        if (kind == "conf" && bytes.size() >= 2 &&
            static_cast<unsigned char>(bytes[0]) == 0xFF &&
            static_cast<unsigned char>(bytes[1]) == 0xFE) {
            auto text = utf16le_to_utf8(reinterpret_cast<const std::uint8_t*>(bytes.data()) + 2,
                                        std::min<std::size_t>(bytes.size() - 2, 128));
            if (text.find("Windows Registry Editor") != std::string::npos) kind = "reg";
        }
    }

    std::vector<IdentityFact> facts;
    if (kind == "reg") {
        facts = parse_reg_export(bytes, source);
    } else if (kind == "conf") {
        facts = parse_sync_conf(bytes, source);
    } else if (kind == "userdata") {
        facts.push_back(extract_mobile_credentials(parse_user_data_xml(bytes),
                                                   CredentialOrigin::AndroidUserDataXml,
                                                   source));
    } else if (kind == "plist") {
        auto tree = parse_plist_bytes(bytes);
        if (iequals_ascii(name, "com.xcerion.icloud.iphone.plist")) {
            facts.push_back(extract_mobile_credentials(flatten_plist_strings(tree),
                                                       CredentialOrigin::IosPlist, source));
        } else if (auto fact = extract_desktop_identity(tree, source)) {
            facts.push_back(std::move(*fact));
        }
    } else {
        std::cerr << "error: unknown --kind '" << kind << "'\n";
        return kFatal;
    }

    std::ofstream file_stream;
    auto& out = open_output(gopts, file_stream);
    for (const auto& f : facts) out << dump_compact(fact_json(f, gopts.reveal_secrets)) << "\n";
    return kOk;
}

int cmd_carve(const std::string& dump, const std::string& anchor,
              const std::string& template_arg, std::size_t back_bound, bool serial,
              const GlobalOpts& gopts) {
    RecordTemplate tmpl;
    if (auto builtin = builtin_template(template_arg)) {
        tmpl = *builtin;
    } else if (std::filesystem::exists(template_arg)) {
        tmpl = template_from_json(read_file_bytes(template_arg));
    } else {
        std::cerr << "error: unknown template '" << template_arg
                  << "' (built-ins: user_table, syncfolder_table, "
                     "syncfolder_document_table, or a JSON file)\n";
        return kFatal;
    }

    FileSource source(dump);
    CarveOptions opts;
    opts.back_search_bound = back_bound;
    opts.parallel = !serial;
    auto records = serial ? carve_records_by_anchor_serial(source, anchor, tmpl, opts)
                          : carve_records_by_anchor(source, anchor, tmpl, opts);

    std::ofstream file_stream;
    auto& out = open_output(gopts, file_stream);
    for (const auto& rec : records) out << carved_record_to_jsonl(rec, dump) << "\n";
    return kOk;
}

int cmd_case(const std::string& root, const std::vector<std::string>& profile_names,
             const std::vector<std::string>& download_keywords, const GlobalOpts& gopts) {
    CaseOptions opts;
    opts.reveal_secrets = gopts.reveal_secrets;
    if (!gopts.timestamp.empty()) opts.timestamp_override = gopts.timestamp;
    opts.download_keywords = download_keywords;
    if (!profile_names.empty() && !(profile_names.size() == 1 && profile_names[0] == "all")) {
        for (const auto& name : profile_names) {
            auto os = os_from_string(name);
            if (!os) {
                std::cerr << "error: unknown profile '" << name << "'\n";
                return kFatal;
            }
            opts.profiles.push_back(*os);
        }
    }
    if (const char* dir = std::getenv("CLOUDME_SCOPE_PROFILE_DIR"))
        opts.profile_dir = std::filesystem::path(dir);

    auto format = report_format_from_string(gopts.format);
    if (!format) {
        std::cerr << "error: unknown --format '" << gopts.format << "'\n";
        return kFatal;
    }

    auto report = run_case(root, opts);
    std::ofstream file_stream;
    auto& out = open_output(gopts, file_stream);
    emit_report(report, *format, out, gopts.reveal_secrets);
    out.flush();
    return report.warnings.empty() ? kOk : kWarnings;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CloudMe client artefact extraction toolkit"};
    app.require_subcommand(1);

    GlobalOpts gopts;
    app.add_option("--format", gopts.format, "Output format: jsonl|csv|summary")
        ->default_val("jsonl");
    app.add_flag("--reveal-secrets", gopts.reveal_secrets,
                 "Print recovered passwords instead of masking them");
    app.add_option("--output", gopts.output, "Write output to a file instead of stdout");
    app.add_option("--timestamp", gopts.timestamp,
                   "Pin the report generated-at time (ISO-8601 Z) for reproducible output");

    std::string root, file, anchor, kind = "auto", template_arg = "user_table";
    std::vector<std::string> profile_names, download_keywords;
    std::size_t back_bound = 64;
    bool serial = false;

    auto* scan = app.add_subcommand("scan", "Locate CloudMe artefacts under an evidence root");
    scan->add_option("root", root)->required();
    scan->add_option("--profile", profile_names, "win|ubuntu|macos|ios|android|all");
    scan->add_option("--downloads", download_keywords,
                     "List download-directory files whose names contain a keyword");

    auto* pc = app.add_subcommand("parse-cachedb", "Parse a desktop cache.db and join the "
                                                   "synchronisation history");
    pc->add_option("file", file)->required();

    auto* pd = app.add_subcommand("parse-dbsdb", "Parse an Android db.sdb file-view history");
    pd->add_option("file", file)->required();

    auto* pn = app.add_subcommand("parse-nsurlcache", "Parse an iOS nsurlcache Cache.db");
    pn->add_option("file", file)->required();

    auto* pl = app.add_subcommand("parse-logs", "Parse CloudMe daily log files");
    pl->add_option("file-or-dir", file)->required();

    auto* cu = app.add_subcommand("classify-urls", "Classify browser-history URLs into "
                                                   "CloudMe actions");
    cu->add_option("file", file)->required();

    auto* pw = app.add_subcommand("parse-webcache", "Harvest an extracted web-cache tree");
    pw->add_option("dir", file)->required();

    auto* pcfg = app.add_subcommand("parse-config", "Extract identity facts from "
                                                    "registry/conf/plist/user_data artefacts");
    pcfg->add_option("file", file)->required();
    pcfg->add_option("--kind", kind, "reg|conf|plist|userdata|auto")->default_val("auto");

    auto* carve = app.add_subcommand("carve", "Recover records from raw bytes by anchor text");
    carve->add_option("dump", file)->required();
    carve->add_option("--anchor", anchor, "Known text value to search for")->required();
    carve->add_option("--template", template_arg,
                      "Built-in template name or a JSON template file");
    carve->add_option("--back-bound", back_bound,
                      "Backward header search distance in bytes");
    carve->add_flag("--serial", serial, "Use the single-threaded reference scanner");

    auto* case_cmd = app.add_subcommand("case", "End-to-end: scan, parse and emit a timeline");
    case_cmd->add_option("root", root)->required();
    case_cmd->add_option("--profile", profile_names, "win|ubuntu|macos|ios|android|all");
    case_cmd->add_option("--downloads", download_keywords);

    auto* version = app.add_subcommand("version", "Print the tool version");

    CLI11_PARSE(app, argc, argv);

    try {
        if (version->parsed()) {
            std::cout << kToolName << " " << kToolVersion << "\n";
            return kOk;
        }
        if (scan->parsed()) return cmd_scan(root, profile_names, download_keywords, gopts);
        if (pc->parsed()) return cmd_parse_cachedb(file, gopts);
        if (pd->parsed()) return cmd_parse_dbsdb(file, gopts);
        if (pn->parsed()) return cmd_parse_nsurlcache(file, gopts);
        if (pl->parsed()) return cmd_parse_logs(file, gopts);
        if (cu->parsed()) return cmd_classify_urls(file, gopts);
        if (pw->parsed()) return cmd_parse_webcache(file, gopts);
        if (pcfg->parsed()) return cmd_parse_config(file, kind, gopts);
        if (carve->parsed())
            return cmd_carve(file, anchor, template_arg, back_bound, serial, gopts);
        if (case_cmd->parsed()) return cmd_case(root, profile_names, download_keywords, gopts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFatal;
    }
    return kFatal;
}
