// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fixtures {

namespace fs = std::filesystem;

/// RAII scratch directory under the system temp root.
class TempDir {
  public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& child) const { return path_ / child; }

  private:
    fs::path path_;
};

// Analyst SQL the toolkit's joins mirror, verbatim.
extern const char* kSyncHistorySql;
extern const char* kFileViewSql;
extern const char* kNsUrlCacheSql;

// Web-cache document corpus.
extern const char* kWebsharesXml;
extern const char* kFavoritesXml;
extern const char* kDeviceSyncXml;
extern const char* kFolderListingXml;
extern const char* kLifestreamXml;

// Daily log lines.
extern const char* kLogLineDownloadError;
extern const char* kLogLineSyncRequestFailed;
extern const char* kLogLineLogin;
extern const char* kLogLineFolderOpFailed;
extern const char* kLogLineUnclassified;
std::string daily_log_text();

// Configuration artefacts.
extern const char* kRegExportText;
extern const char* kSyncConfText;
extern const char* kUserDataXml;
extern const char* kIosPlistXml;

// Golden binary plist produced once by an independent writer, with its XML
// twin; both decode to the same tree.
extern const std::vector<std::uint8_t> kGoldenBinaryPlist;
extern const char* kGoldenXmlPlist;

/// Desktop cache.db with the published five-file synchronisation history.
void make_cachedb(const fs::path& file);
/// Android db.sdb with the published three-row file-view history.
void make_dbsdb(const fs::path& file);
/// iOS nsurlcache Cache.db holding one (url, time, body) triple per entry.
struct CacheEntry {
    std::string url;
    std::string time_stamp;
    std::string body;
};
void make_nsurlcache(const fs::path& file, const std::vector<CacheEntry>& entries);

/// Full evidence tree: cache.db + daily log + extracted web cache + Sync.conf.
void build_composite_root(const fs::path& root);

// Independent SQLite engine access (raw C API, no toolkit code).
void sqlite_exec(const fs::path& db, const std::vector<std::string>& statements);

struct OracleCell {
    bool is_null = false;
    std::string text;  // integers in decimal, text verbatim

    friend bool operator==(const OracleCell&, const OracleCell&) = default;
};
std::vector<std::vector<OracleCell>> sqlite_query(const fs::path& db, const std::string& sql);

}  // namespace fixtures
