// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/locator.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <nlohmann/json.hpp>

#include "cloudme/jsonx.hpp"

#include "cloudme/util.hpp"

namespace cloudme {

namespace fs = std::filesystem;

namespace {

bool is_wildcard(std::string_view comp) {
    return comp == "<User Profile>" || comp == "<UUID>" || comp == "<SID>";
}

// Single-component match; one '*' per component is supported ("*.reg").
bool component_matches(std::string_view pat, std::string_view comp, bool ci) {
    if (is_wildcard(pat)) return !comp.empty();
    auto star = pat.find('*');
    auto eq = [&](std::string_view a, std::string_view b) {
        return ci ? iequals_ascii(a, b) : a == b;
    };
    if (star == std::string_view::npos) return eq(pat, comp);
    auto prefix = pat.substr(0, star);
    auto suffix = pat.substr(star + 1);
    if (comp.size() < prefix.size() + suffix.size()) return false;
    return eq(comp.substr(0, prefix.size()), prefix) &&
           eq(comp.substr(comp.size() - suffix.size()), suffix);
}

std::vector<std::string> pattern_components(std::string_view pattern) {
    std::vector<std::string> out;
    for (auto& c : split(pattern, '/'))
        if (!c.empty()) out.push_back(std::move(c));
    return out;
}

bool tail_matches(const std::vector<std::string>& pat, const std::vector<std::string>& comps,
                  std::size_t end, bool ci) {
    if (end < pat.size()) return false;
    for (std::size_t i = 0; i < pat.size(); ++i)
        if (!component_matches(pat[i], comps[end - pat.size() + i], ci)) return false;
    return true;
}

struct WalkResult {
    std::vector<fs::path> files;
    std::vector<fs::path> dirs;
    std::vector<std::string> warnings;
};

void walk(const fs::path& p, WalkResult& out) {
    std::error_code ec;
    auto status = fs::symlink_status(p, ec);
    if (ec) {
        out.warnings.push_back(p.string() + ": " + ec.message());
        return;
    }
    if (fs::is_symlink(status)) return;  // never followed
    if (fs::is_regular_file(status)) {
        out.files.push_back(p);
        return;
    }
    if (!fs::is_directory(status)) return;
    out.dirs.push_back(p);
    fs::directory_iterator it(p, fs::directory_options::skip_permission_denied, ec);
    if (ec) {
        out.warnings.push_back(p.string() + ": " + ec.message());
        return;
    }
    std::vector<fs::path> children;
    for (const auto& entry : it) children.push_back(entry.path());
    std::sort(children.begin(), children.end());
    for (const auto& child : children) walk(child, out);
}

}  // namespace

std::string_view to_string(Os os) {
    switch (os) {
        case Os::Windows: return "Windows";
        case Os::Ubuntu: return "Ubuntu";
        case Os::MacOS: return "MacOS";
        case Os::IOS: return "iOS";
        case Os::Android: return "Android";
    }
    return "?";
}

std::optional<Os> os_from_string(std::string_view s) {
    auto lower = to_lower_ascii(s);
    if (lower == "win" || lower == "windows") return Os::Windows;
    if (lower == "ubuntu" || lower == "linux") return Os::Ubuntu;
    if (lower == "macos" || lower == "mac") return Os::MacOS;
    if (lower == "ios") return Os::IOS;
    if (lower == "android") return Os::Android;
    return std::nullopt;
}

bool rule_matches(const PathRule& rule, std::string_view relative_path, bool case_insensitive) {
    auto pat = pattern_components(rule.pattern);
    if (pat.empty()) return false;
    std::vector<std::string> comps;
    for (auto& c : split(relative_path, '/'))
        if (!c.empty()) comps.push_back(std::move(c));
    if (comps.empty()) return false;

    switch (rule.target) {
        case RuleTarget::File:
        case RuleTarget::DirItself:
            return tail_matches(pat, comps, comps.size(), case_insensitive);
        case RuleTarget::FilesUnder: {
            // Any ancestor directory chain ending with the pattern.
            for (std::size_t end = pat.size(); end < comps.size(); ++end)
                if (tail_matches(pat, comps, end, case_insensitive)) return true;
            return false;
        }
    }
    return false;
}

std::vector<PlatformProfile> builtin_profiles() {
    std::vector<PlatformProfile> out;

    PlatformProfile win;
    win.os = Os::Windows;
    win.case_insensitive = true;
    win.rules = {
        {ArtefactClass::Database, "AppData/Local/CloudMe/cache.db", RuleTarget::File},
        {ArtefactClass::Log, "AppData/Local/CloudMe/logs/", RuleTarget::FilesUnder},
        {ArtefactClass::Config, "*.reg", RuleTarget::File},
        {ArtefactClass::WebCache, "www.cloudme.com/v1", RuleTarget::DirItself},
        {ArtefactClass::BrowserHistory, "Google/Chrome/User Data/Default/History",
         RuleTarget::File},
    };
    win.download_dirs = {"Users/<User Profile>/Documents"};
    out.push_back(std::move(win));

    PlatformProfile ubuntu;
    ubuntu.os = Os::Ubuntu;
    ubuntu.rules = {
        {ArtefactClass::Database, ".local/share/CloudMe/cache.db", RuleTarget::File},
        {ArtefactClass::Log, ".local/share/CloudMe/logs/", RuleTarget::FilesUnder},
        {ArtefactClass::Config, ".config/CloudMe/Sync.conf", RuleTarget::File},
        {ArtefactClass::WebCache, "www.cloudme.com/v1", RuleTarget::DirItself},
        {ArtefactClass::BrowserHistory, "places.sqlite", RuleTarget::File},
    };
    ubuntu.download_dirs = {"home/<User Profile>/Documents"};
    out.push_back(std::move(ubuntu));

    PlatformProfile mac;
    mac.os = Os::MacOS;
    mac.rules = {
        {ArtefactClass::Database, "Library/Application Support/CloudMe/cache.db",
         RuleTarget::File},
        {ArtefactClass::Log, "Library/Application Support/CloudMe/logs/", RuleTarget::FilesUnder},
        {ArtefactClass::Config, "Library/Preferences/com.CloudMe.Sync.plist", RuleTarget::File},
        {ArtefactClass::WebCache, "www.cloudme.com/v1", RuleTarget::DirItself},
    };
    mac.download_dirs = {"Users/<User Profile>/Documents"};
    out.push_back(std::move(mac));

    PlatformProfile ios;
    ios.os = Os::IOS;
    ios.rules = {
        {ArtefactClass::Database,
         "<UUID>/Library/Caches/com.xcerion.icloud.iphone/nsurlcache/Cache.db",
         RuleTarget::File},
        {ArtefactClass::Config, "<UUID>/Library/Preferences/com.xcerion.icloud.iphone.plist",
         RuleTarget::File},
    };
    ios.download_dirs = {"<UUID>/Documents/persistentCache"};
    out.push_back(std::move(ios));

    PlatformProfile android;
    android.os = Os::Android;
    android.rules = {
        {ArtefactClass::Database, "Android/data/com.xcerion.android/cache/db.sdb",
         RuleTarget::File},
        {ArtefactClass::Database, "Android/data/com.excerion.android/cache/db.sdb",
         RuleTarget::File},
        {ArtefactClass::Config, "data/data/com.xcerion.android/shared_prefs/user_data.xml",
         RuleTarget::File},
        {ArtefactClass::Config, "data/data/com.excerion.android/shared_prefs/user_data.xml",
         RuleTarget::File},
    };
    android.download_dirs = {"Android/data/com.xcerion.android/cache/files/Downloads",
                             "Android/data/com.excerion.android/cache/files/Downloads"};
    out.push_back(std::move(android));

    return out;
}

std::vector<PlatformProfile> profiles_from_json(std::string_view json) {
    auto j = nlohmann::json::parse(json);
    std::vector<PlatformProfile> out;
    for (const auto& pj : j.at("profiles")) {
        PlatformProfile p;
        auto os = os_from_string(pj.at("os").get<std::string>());
        if (!os) throw Error("unknown os: " + pj.at("os").get<std::string>());
        p.os = *os;
        p.case_insensitive = pj.value("case_insensitive", false);
        for (const auto& rj : pj.at("rules")) {
            PathRule r;
            auto cls = artefact_class_from_string(rj.at("class").get<std::string>());
            if (!cls) throw Error("unknown artefact class: " + rj.at("class").get<std::string>());
            r.artefact_class = *cls;
            r.pattern = rj.at("pattern").get<std::string>();
            auto target = rj.value("target", std::string("file"));
            if (target == "file") r.target = RuleTarget::File;
            else if (target == "files_under") r.target = RuleTarget::FilesUnder;
            else if (target == "dir") r.target = RuleTarget::DirItself;
            else throw Error("unknown rule target: " + target);
            p.rules.push_back(std::move(r));
        }
        if (pj.contains("download_dirs"))
            for (const auto& d : pj.at("download_dirs"))
                p.download_dirs.push_back(d.get<std::string>());
        out.push_back(std::move(p));
    }
    return out;
}

ScanResult scan_root(const fs::path& root, const std::vector<PlatformProfile>& profiles,
                     const ScanOpts& opts) {
    std::error_code ec;
    if (!fs::is_directory(root, ec) || ec)
        throw RootUnreadable(root.string(), ec ? ec.message() : "not a directory");
    fs::directory_iterator probe(root, ec);
    if (ec) throw RootUnreadable(root.string(), ec.message());

    std::vector<fs::path> tops;
    for (const auto& entry : probe) tops.push_back(entry.path());
    std::sort(tops.begin(), tops.end());

    std::vector<WalkResult> per_top(tops.size());
#ifdef _OPENMP
    if (opts.parallel && tops.size() > 1) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(tops.size()); ++i)
            walk(tops[static_cast<std::size_t>(i)], per_top[static_cast<std::size_t>(i)]);
    } else
#endif
    {
        for (std::size_t i = 0; i < tops.size(); ++i) walk(tops[i], per_top[i]);
    }

    WalkResult all;
    for (auto& w : per_top) {
        all.files.insert(all.files.end(), w.files.begin(), w.files.end());
        all.dirs.insert(all.dirs.end(), w.dirs.begin(), w.dirs.end());
        all.warnings.insert(all.warnings.end(), w.warnings.begin(), w.warnings.end());
    }

    ScanResult out;
    out.warnings = std::move(all.warnings);

    auto relative = [&](const fs::path& p) { return p.lexically_relative(root).generic_string(); };

    for (const auto& profile : profiles) {
        for (const auto& rule : profile.rules) {
            const auto& pool = rule.target == RuleTarget::DirItself ? all.dirs : all.files;
            for (const auto& p : pool) {
                if (rule_matches(rule, relative(p), profile.case_insensitive))
                    out.hits.push_back({profile.os, rule.artefact_class, p.string(),
                                        rule.pattern});
            }
        }
        if (!opts.download_keywords.empty()) {
            for (const auto& dir_pattern : profile.download_dirs) {
                PathRule dir_rule{ArtefactClass::Config, dir_pattern, RuleTarget::FilesUnder};
                for (const auto& p : all.files) {
                    if (!rule_matches(dir_rule, relative(p), profile.case_insensitive)) continue;
                    auto name = to_lower_ascii(p.filename().string());
                    for (const auto& kw : opts.download_keywords) {
                        if (name.find(to_lower_ascii(kw)) != std::string::npos) {
                            out.downloads.push_back({profile.os, p.string(), kw});
                            break;
                        }
                    }
                }
            }
        }
    }

    std::sort(out.hits.begin(), out.hits.end(), [](const ArtefactHit& a, const ArtefactHit& b) {
        if (a.path != b.path) return a.path < b.path;
        if (a.profile != b.profile) return static_cast<int>(a.profile) < static_cast<int>(b.profile);
        return a.rule < b.rule;
    });
    out.hits.erase(std::unique(out.hits.begin(), out.hits.end()), out.hits.end());
    std::sort(out.downloads.begin(), out.downloads.end(),
              [](const DownloadHit& a, const DownloadHit& b) {
                  if (a.path != b.path) return a.path < b.path;
                  if (a.keyword != b.keyword) return a.keyword < b.keyword;
                  return static_cast<int>(a.profile) < static_cast<int>(b.profile);
              });
    // profiles share download directories (Documents on Windows and macOS);
    // one listing row per file is enough
    out.downloads.erase(std::unique(out.downloads.begin(), out.downloads.end(),
                                    [](const DownloadHit& a, const DownloadHit& b) {
                                        return a.path == b.path && a.keyword == b.keyword;
                                    }),
                        out.downloads.end());
    std::sort(out.warnings.begin(), out.warnings.end());
    return out;
}

std::string artefact_hit_to_jsonl(const ArtefactHit& hit) {
    nlohmann::ordered_json j;
    j["profile"] = std::string(to_string(hit.profile));
    j["artefact_class"] = std::string(to_string(hit.artefact_class));
    j["path"] = hit.path;
    j["rule"] = hit.rule;
    return dump_compact(j);
}

std::string download_hit_to_jsonl(const DownloadHit& hit) {
    nlohmann::ordered_json j;
    j["profile"] = std::string(to_string(hit.profile));
    j["download"] = hit.path;
    j["keyword"] = hit.keyword;
    return dump_compact(j);
}

}  // namespace cloudme
