// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cloudme/model.hpp"

namespace cloudme {

struct RootUnreadable : Error {
    explicit RootUnreadable(const std::string& root, const std::string& why)
        : Error("evidence root unreadable: " + root + " (" + why + ")") {}
};

enum class Os { Windows, Ubuntu, MacOS, IOS, Android };

std::string_view to_string(Os os);
std::optional<Os> os_from_string(std::string_view s);

/// How a rule's pattern binds to filesystem entries.
enum class RuleTarget {
    File,       // pattern names a file (suffix match on components)
    FilesUnder, // pattern names a directory; every file beneath it matches
    DirItself,  // pattern names a directory; the directory is the artefact
};

/// One artefact location rule. Patterns are '/'-separated component
/// sequences matched against the end of the relative path; the wildcard
/// segments <User Profile>, <UUID> and <SID> match exactly one component.
struct PathRule {
    ArtefactClass artefact_class = ArtefactClass::Database;
    std::string pattern;
    RuleTarget target = RuleTarget::File;
};

struct PlatformProfile {
    Os os = Os::Windows;
    bool case_insensitive = false;  // Windows paths compare case-insensitively
    std::vector<PathRule> rules;
    std::vector<std::string> download_dirs;  // user-content listing, not artefacts
};

/// The five built-in per-platform profiles (desktop Windows/Ubuntu/macOS,
/// iOS, Android). Android rules match both the com.xcerion.android and
/// com.excerion.android package spellings seen in the wild.
std::vector<PlatformProfile> builtin_profiles();

/// Parse extra profiles from JSON (see README for the schema).
std::vector<PlatformProfile> profiles_from_json(std::string_view json);

struct ArtefactHit {
    Os profile = Os::Windows;
    ArtefactClass artefact_class = ArtefactClass::Database;
    std::string path;
    std::string rule;

    friend bool operator==(const ArtefactHit&, const ArtefactHit&) = default;
};

struct DownloadHit {
    Os profile = Os::Windows;
    std::string path;
    std::string keyword;

    friend bool operator==(const DownloadHit&, const DownloadHit&) = default;
};

struct ScanResult {
    std::vector<ArtefactHit> hits;        // sorted: path, profile, rule
    std::vector<DownloadHit> downloads;   // sorted: path, keyword
    std::vector<std::string> warnings;    // per-entry permission failures etc.
};

struct ScanOpts {
    std::vector<std::string> download_keywords;  // enables the downloads listing
    bool parallel = true;
};

/// Walk the evidence root (symlinks not followed) and apply every profile's
/// rules. Deterministic: results are order-normalized regardless of
/// parallelism. Throws RootUnreadable.
ScanResult scan_root(const std::filesystem::path& root,
                     const std::vector<PlatformProfile>& profiles, const ScanOpts& opts = {});

/// Re-checkable matcher used by scan_root: does the root-relative path (for
/// File/FilesUnder: of a file; for DirItself: of a directory) satisfy the
/// rule?
bool rule_matches(const PathRule& rule, std::string_view relative_path, bool case_insensitive);

std::string artefact_hit_to_jsonl(const ArtefactHit& hit);
std::string download_hit_to_jsonl(const DownloadHit& hit);

}  // namespace cloudme
