// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cloudme/confparse.hpp"
#include "cloudme/locator.hpp"
#include "cloudme/model.hpp"

namespace cloudme {

inline constexpr std::string_view kToolName = "cmftk";
inline constexpr std::string_view kToolVersion = "0.1.0";

struct CaseOptions {
    bool reveal_secrets = false;
    /// Pins generated_at (ISO-8601 Z) so reports become byte-deterministic.
    std::optional<std::string> timestamp_override;
    std::vector<Os> profiles;  // empty = all built-ins
    std::vector<std::string> download_keywords;
    std::optional<std::filesystem::path> profile_dir;  // extra profile JSON files
    bool parallel = true;
};

struct IdentitySummary {
    std::vector<Account> accounts;     // cache.db user_table rows
    std::vector<IdentityFact> facts;   // registry / conf / plist / user_data
};

/// Everything one end-to-end run produced. All paths are relative to the
/// evidence root so reports are location-independent.
struct CaseReport {
    std::string tool{kToolName};
    std::string version{kToolVersion};
    std::string root;
    std::vector<Os> profiles_used;
    std::vector<std::string> download_keywords;
    std::vector<ArtefactHit> hits;
    std::vector<DownloadHit> downloads;
    std::vector<ForensicEvent> events;
    std::vector<std::string> warnings;  // sorted
    IdentitySummary identities;
    Timestamp generated_at;
    /// Documented assumption: undesignated cache.db/log datetimes are UTC.
    std::string time_assumption = "cache.db and log datetimes interpreted as UTC";
};

/// Locate artefacts under root, dispatch each hit to its parser, merge all
/// event streams. Individual parser failures become warnings, never aborts.
/// Throws RootUnreadable only.
CaseReport run_case(const std::filesystem::path& root, const CaseOptions& opts);

enum class ReportFormat { Jsonl, Csv, Summary };

std::optional<ReportFormat> report_format_from_string(std::string_view s);

/// Byte-deterministic for a fixed report. Jsonl: one header object line
/// plus one line per event. Csv: flattened events (attributes joined as
/// key=value pairs with ';', escaping '\', ';' and '=' with a backslash).
/// Summary: per-kind counts and the identity table.
void emit_report(const CaseReport& report, ReportFormat format, std::ostream& out,
                 bool reveal_secrets);

}  // namespace cloudme
