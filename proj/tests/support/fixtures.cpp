// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "support/fixtures.hpp"

#include <sqlite3.h>

#include <fstream>
#include <random>
#include <stdexcept>

namespace fixtures {

TempDir::TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    auto base = fs::temp_directory_path();
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto candidate = base / ("cmftk_test_" + std::to_string(rng()));
        std::error_code ec;
        if (fs::create_directory(candidate, ec) && !ec) {
            path_ = candidate;
            return;
        }
    }
    throw std::runtime_error("could not create scratch directory");
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

const char* kSyncHistorySql = R"SQL(SELECT
d.username AS 'Owner Name',
a.folder_id AS 'Sync Folder ID',
a.document_id AS 'Sync File ID',
a.name AS 'Sync File Name',
c.local_path AS 'Sync Folder Path',
a.size AS 'File Size',
a.modified_date AS 'Sync File Last Modified Date',
c.created AS 'Folder Creation Time',
c.last_run AS 'Folder Last Sync Time',
b.deleted AS 'Folder is Deleted',
c.inactivated AS 'Folder is inactivated',
c.encrypted AS 'Folder is encrypted'
FROM syncfolder_document_table a
INNER JOIN syncfolder_folder_table b ON a.folder_id=b.child_folder_id
INNER JOIN syncfolder_table c ON c.folder_id=a.root_folder_id
INNER JOIN user_table d ON d.user_id=a.owner;)SQL";

const char* kFileViewSql = R"SQL(SELECT
a.owner AS 'Owner',
a.name AS 'Filename',
a.size AS 'File Size',
b.name AS 'Folder Name',
a.href AS 'URL',
a.published AS 'Published Time',
a.updated AS 'Last Updated Time',
a.mime AS 'File Type',
b.path AS 'Origin'
FROM files a
INNER JOIN folders b ON a.folder_id=b.folder_id)SQL";

const char* kNsUrlCacheSql =
    "SELECT cfurl_cache_receiver_data.receiver_data, cfurl_cache_response.request_key, "
    "cfurl_cache_response.time_stamp FROM cfurl_cache_receiver_data, cfurl_cache_response "
    "WHERE cfurl_cache_receiver_data.entry_ID=cfurl_cache_response.entry_ID";

const char* kWebsharesXml = R"XML(<?xml version="1.0"?>
<webshares xmlns:os="http://a9.com/-/spec/opensearch/1.1/">
  <os:totalResults>6</os:totalResults>
  <os:startIndex>0</os:startIndex>
  <os:itemsPerPage>1000</os:itemsPerPage>
  <webshare createdState="existing" updated="2016-03-16T04:41:12Z" created="2016-03-16T04:41:12Z" access="update" type="cloudme" password="digitalevidence" visibility="private" description="" name="CloudMe" userId="12886417622" id="718585">
    <folder name="CloudMe" id="562958569591836"/>
  </webshare>
  <webshare createdState="existing" updated="2016-03-15T14:36:03Z" created="2016-03-15T14:36:03Z" access="update" type="" password="Digitalevidence" visibility="private" description="" name="IosSubFolder" userId="12886417622" id="718531">
  </webshare>
  <webshare createdState="existing" updated="2016-03-16T04:12:37Z" created="2016-03-16T04:12:37Z" access="update" type="" password="Digitalevidence" visibility="private" description="" name="IOSSyncFolder" userId="12886417622" id="718584">
  </webshare>
  <webshare createdState="existing" updated="2016-03-15T14:45:44Z" created="2016-03-15T14:45:44Z" access="read" type="cloudme" password="digitalevidence" visibility="private" description="foldersharingfromMacOS" name="MacSyncFolder" userId="12886417622" id="718534">
  </webshare>
  <webshare createdState="existing" updated="2016-03-15T14:42:39Z" created="2016-03-15T14:42:39Z" access="read" type="cloudme" password="digitalevidence" visibility="private" description="" name="UbuntuSyncFolder" userId="12886417622" id="718533">
  </webshare>
  <webshare createdState="existing" updated="2016-03-15T14:31:13Z" created="2016-03-15T14:31:13Z" access="read" type="cloudme" password="" visibility="private" description="" name="WindowsSyncFolder" userId="12886417622" id="718530">
  </webshare>
</webshares>
)XML";

const char* kFavoritesXml = R"XML(<?xml version="1.0"?>
<favorites xmlns:os="http://a9.com/-/spec/opensearch/1.1/">
  <os:totalResults>3</os:totalResults>
  <os:startIndex>0</os:startIndex>
  <os:itemsPerPage>1000</os:itemsPerPage>
  <favorite document_id="0" folder_id="562958569591836" access="update" description="" password="digitalevidence" name="CloudMe" created="2016-03-16T04:41:34Z" webShareId="718585" sharingUserName="adamthomson" sharingUserId="12886417622" userId="12886417622" id="112118"/>
  <favorite document_id="0" folder_id="562958569596136" description="foldersharingfromMacOS" password="digitalevidence" name="MacSyncFolder" created="2016-03-17T04:57:49Z" webShareId="718534" sharingUserName="adamthomson" sharingUserId="12886417622" userId="12886417622" id="112124"/>
  <favorite document_id="0" folder_id="562958569596139" description="" password="digitalevidence" name="UbuntuSyncFolder" created="2016-03-15T14:43:17Z" webShareId="718533" sharingUserName="adamthomson" sharingUserId="12886417622" userId="12886417622" id="112112"/>
</favorites>
)XML";

const char* kDeviceSyncXml = R"XML(<sync version="1.9.6" dName="WIN-KMM6MUN4701" clientId="{1cb0b304-6387-4813-88a8-1a2425fble06}">
  <syncfolder name="CloudMe" path="C:/Users/anonymous/Documents/CloudMe" hasSynchronized="true" upload="true" download="true" hotsync="true" cloudmeFolder="true" favoriteFolder="false" conflict="backup" cloudPath="xios://Documents/CloudMe" folderId="562958569591836" folderSyncMode="1" folderMode="2" foldertype="1" inactivated="false" lastSync="2016-03-15 12:47:25" />
</sync>
)XML";

const char* kFolderListingXml = R"XML(<fs:folder id='562958569591836' xmlns:xlink='http://www.w3.org/1999/xlink' xmlns:fs='http://xcerion.com/folders.xsd'>
  <fs:folder id='562958569603280' name='cloudme investigation'>
    <fs:tag type='update' value='718585' group='webshare' propagated='true' />
  </fs:folder>
</fs:folder>
)XML";

const char* kLifestreamXml = R"XML(<?xml version="1.0"?>
<lifestream>
  <event senderId="12886417622" senderGroupId="766540" senderName="adamthomson" receiverId="12886500001" receiverGroupId="766541" receiverName="bob" parentFolder="CloudMe" seen="false"/>
  <event senderId="12886417622" senderGroupId="766540" senderName="adamthomson" receiverId="12886500002" receiverGroupId="766542" receiverName="carol" parentFolder="MacSyncFolder"/>
</lifestream>
)XML";

const char* kLogLineDownloadError =
    "2016-03-15 14:52:02: CloudMeUnthreaded: Request error: "
    "\"/Users/alice/Documents/UbuntuShareFolder/UbuntuSubFolder/UbuntuSubFolder/Enron3111.docx\""
    " | \"Error downloading "
    "https://os.cloudme.com/v1/users/12886417622/favorites/112112/webshare/UbuntuSubFolder/"
    "UbuntuSubFolder/Enron3111.docx - server replied: Not Found\" Error number: 203";

const char* kLogLineSyncRequestFailed =
    "2016-03-15 14:56:30: onSyncRequestFailed: "
    "\"WindowsSubFolder/WindowsSubFolder/Enron3111.pdf\" | Type: \"Uploading\" | Error: \"7\"";

const char* kLogLineLogin = "2016-03-15 13:48:22: Logged in as: \"adamthomson\"";

const char* kLogLineFolderOpFailed =
    "2016-03-15 14:51:52: addRemoveLocalFolder:Fail: "
    "\"/home/suspectpc/UbuntuSyncFolder/UbuntuSubFolder\"";

const char* kLogLineUnclassified =
    "2016-03-15 14:56:30: SYNC_FILE_NOT_FOUND\xE2\x80\x94 SYNC_FOLDER_NOT_FOUND: (0) "
    "\"WindowsSubFolder/WindowsSubFolder/Enron3111.pdf\" :?";

std::string daily_log_text() {
    std::string out;
    out += kLogLineLogin;
    out += "\n";
    out += kLogLineFolderOpFailed;
    out += "\n";
    out += kLogLineDownloadError;
    out += "\n";
    out += kLogLineSyncRequestFailed;
    out += "\n";
    out += kLogLineUnclassified;
    out += "\n";
    return out;
}

const char* kRegExportText = R"REG(Windows Registry Editor Version 5.00

[HKEY_USERS\S-1-5-21-1266370457-1204131221-1025633957-1001\Software\CloudMe\Sync]
"adamthomson_xClientId"="a1b2c3d4e5f60718293a4b5c6d7e8f90"

[HKEY_USERS\S-1-5-21-1266370457-1204131221-1025633957-1001\Software\CloudMe\Sync\startup]
"me"="adamthomson"
)REG";

const char* kSyncConfText = R"CONF([startup]
me=adamthomson

[adamthomson]
_xClientId=a1b2c3d4e5f60718293a4b5c6d7e8f90
)CONF";

const char* kUserDataXml =
    R"XML(<?xml version='1.0' encoding='utf-8' standalone='yes' ?>
<map>
    <string name="username">adamthomson</string>
    <string name="password">Enron3111pass</string>
    <boolean name="autosync" value="true" />
</map>
)XML";

const char* kIosPlistXml = R"XML(<?xml version="1.0" encoding="UTF-8"?>
<!DOCTYPE plist PUBLIC "-//Apple//DTD PLIST 1.0//EN" "http://www.apple.com/DTDs/PropertyList-1.0.dtd">
<plist version="1.0">
<dict>
    <key>username</key>
    <string>adamthomson</string>
    <key>password</key>
    <string>Enron3111pass</string>
    <key>adamthomson_LastUploadTime</key>
    <string>2016-03-15 14:28:27</string>
</dict>
</plist>
)XML";

// Produced by an independent property-list writer from the tree asserted in
// the plist tests; decoding it must match decoding the XML twin below.
const std::vector<std::uint8_t> kGoldenBinaryPlist = {
    98,112,108,105,115,116,48,48,217,1,2,3,4,5,6,7,8,9,10,11,12,18,19,20,21,22,23,90,115,
    116,97,114,116,117,112,46,109,101,95,16,21,97,100,97,109,116,104,111,109,115,111,110,
    46,120,67,108,105,101,110,116,73,100,86,99,111,117,110,116,115,85,114,97,116,105,111,
    87,101,110,97,98,108,101,100,88,100,105,115,97,98,108,101,100,84,98,108,111,98,84,110,
    111,116,101,84,119,104,101,110,91,97,100,97,109,116,104,111,109,115,111,110,95,16,32,
    97,49,98,50,99,51,100,52,101,53,102,54,48,55,49,56,50,57,51,97,52,98,53,99,54,100,55,
    101,56,102,57,48,165,13,14,15,16,17,16,1,16,2,16,250,18,0,1,17,112,19,0,0,0,1,42,5,
    242,0,35,63,228,0,0,0,0,0,0,9,8,68,0,1,254,255,106,0,110,0,97,0,239,0,118,0,101,0,32,
    0,99,0,97,0,102,0,233,51,65,188,152,83,139,0,0,0,8,27,38,62,69,75,83,92,97,102,107,
    119,154,160,162,164,166,171,180,189,190,191,196,217,0,0,0,0,0,0,1,1,0,0,0,0,0,0,0,24,
    0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,226,
};

const char* kGoldenXmlPlist = R"XML(<?xml version="1.0" encoding="UTF-8"?>
<!DOCTYPE plist PUBLIC "-//Apple//DTD PLIST 1.0//EN" "http://www.apple.com/DTDs/PropertyList-1.0.dtd">
<plist version="1.0">
<dict>
	<key>startup.me</key>
	<string>adamthomson</string>
	<key>adamthomson.xClientId</key>
	<string>a1b2c3d4e5f60718293a4b5c6d7e8f90</string>
	<key>counts</key>
	<array>
		<integer>1</integer>
		<integer>2</integer>
		<integer>250</integer>
		<integer>70000</integer>
		<integer>5000000000</integer>
	</array>
	<key>ratio</key>
	<real>0.625</real>
	<key>enabled</key>
	<true/>
	<key>disabled</key>
	<false/>
	<key>blob</key>
	<data>
	AAH+/w==
	</data>
	<key>note</key>
	<string>na&#239;ve caf&#233;</string>
	<key>when</key>
	<date>2016-03-15T14:28:27Z</date>
</dict>
</plist>
)XML";

namespace {

struct DbHandle {
    sqlite3* db = nullptr;
    explicit DbHandle(const fs::path& file) {
        if (sqlite3_open(file.string().c_str(), &db) != SQLITE_OK)
            throw std::runtime_error("sqlite open failed: " + file.string());
    }
    ~DbHandle() {
        if (db) sqlite3_close(db);
    }
    void exec(const std::string& sql) {
        char* err = nullptr;
        if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
            std::string msg = err ? err : "unknown";
            sqlite3_free(err);
            throw std::runtime_error("sqlite exec failed: " + msg + " [" + sql + "]");
        }
    }
};

}  // namespace

void sqlite_exec(const fs::path& db, const std::vector<std::string>& statements) {
    DbHandle h(db);
    for (const auto& sql : statements) h.exec(sql);
}

std::vector<std::vector<OracleCell>> sqlite_query(const fs::path& db, const std::string& sql) {
    DbHandle h(db);
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(h.db, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK)
        throw std::runtime_error(std::string("prepare failed: ") + sqlite3_errmsg(h.db));
    std::vector<std::vector<OracleCell>> rows;
    int rc;
    while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
        int n = sqlite3_column_count(stmt);
        std::vector<OracleCell> row;
        for (int i = 0; i < n; ++i) {
            OracleCell cell;
            if (sqlite3_column_type(stmt, i) == SQLITE_NULL) {
                cell.is_null = true;
            } else {
                const auto* t = sqlite3_column_text(stmt, i);
                int len = sqlite3_column_bytes(stmt, i);
                cell.text.assign(reinterpret_cast<const char*>(t), static_cast<std::size_t>(len));
            }
            row.push_back(std::move(cell));
        }
        rows.push_back(std::move(row));
    }
    sqlite3_finalize(stmt);
    if (rc != SQLITE_DONE) throw std::runtime_error("query step failed");
    return rows;
}

void make_cachedb(const fs::path& file) {
    sqlite_exec(
        file,
        {
            "CREATE TABLE user_table (user_id INTEGER PRIMARY KEY, username TEXT, devicename "
            "TEXT, created TEXT)",
            "CREATE TABLE syncfolder_table (owner INTEGER, name TEXT, local_path TEXT, "
            "cloud_path TEXT, folder_id INTEGER, created TEXT, last_run TEXT, inactivated "
            "TEXT, encrypted TEXT)",
            "CREATE TABLE syncfolder_folder_table (name TEXT, root_folder_id INTEGER, "
            "folder_id INTEGER, child_folder_id INTEGER, creation_date TEXT, deleted TEXT, "
            "owner INTEGER)",
            "CREATE TABLE syncfolder_document_table (owner INTEGER, name TEXT, "
            "root_folder_id INTEGER, folder_id INTEGER, document_id INTEGER, size INTEGER, "
            "modified_date TEXT, checksum TEXT, main_checksum TEXT)",
            "INSERT INTO user_table VALUES (12886417622, 'adamthomson', 'WIN-KMM6MUN4701', "
            "'2016-03-15 12:47:20')",
            "INSERT INTO syncfolder_table VALUES (12886417622, 'MacSyncFolder', "
            "'C:/Users/anonymous/Documents/MacSyncFolder', 'xios://Documents/MacSyncFolder', "
            "562958569596136, '2016-03-15 22:06:55', '2016-03-16 04:41:40', 'false', 'false')",
            "INSERT INTO syncfolder_folder_table VALUES ('MacSyncFolder', 562958569596136, "
            "562958569596136, 562958569596136, '2016-03-15 22:06:55', NULL, 12886417622)",
            "INSERT INTO syncfolder_document_table VALUES (12886417622, 'Enron3111.jpg', "
            "562958569596136, 562958569596136, 4457417804, 287937, '2016-03-16 12:25:07', "
            "'1f0c9f0474e3ab8e2a6b9d2a4c3d10aa', '1f0c9f0474e3ab8e2a6b9d2a4c3d10aa')",
            "INSERT INTO syncfolder_document_table VALUES (12886417622, 'Enron3111.pdf', "
            "562958569596136, 562958569596136, 4457417805, 31747, '2016-03-16 12:25:10', "
            "'2b6e7a81c5d40f93ab87e1c2f3a45b01', '2b6e7a81c5d40f93ab87e1c2f3a45b01')",
            "INSERT INTO syncfolder_document_table VALUES (12886417622, 'Enron3111.rtf', "
            "562958569596136, 562958569596136, 4457417806, 43360, '2016-03-16 12:25:13', "
            "'3c1d82a9e6f51084bc98f2d3a4b56c12', '3c1d82a9e6f51084bc98f2d3a4b56c12')",
            "INSERT INTO syncfolder_document_table VALUES (12886417622, 'Enron3111.txt', "
            "562958569596136, 562958569596136, 4457417807, 2734, '2016-03-16 12:25:13', "
            "'4d2e93baf70612a5cda903e4b5c67d23', '4d2e93baf70612a5cda903e4b5c67d23')",
            "INSERT INTO syncfolder_document_table VALUES (12886417622, 'Enron3111.zip', "
            "562958569596136, 562958569596136, 4457417808, 30967, '2016-03-16 12:25:20', "
            "'5e3fa4cb081723b6deba14f5c6d78e34', '5e3fa4cb081723b6deba14f5c6d78e34')",
        });
}

void make_dbsdb(const fs::path& file) {
    sqlite_exec(
        file,
        {
            "CREATE TABLE files (_id INTEGER PRIMARY KEY, name TEXT, folder_id INTEGER, "
            "size INTEGER, href TEXT, published TEXT, updated TEXT, owner TEXT, mime TEXT)",
            "CREATE TABLE folders (folder_id INTEGER, name TEXT, owner TEXT, parent TEXT, "
            "is_root TEXT, path TEXT)",
            "INSERT INTO files VALUES (1, 'Enron3111.jpg', 562958569596145, 689402, "
            "'https://os.cloudme.com/v1/documents/562958569596145/4457368187/1', "
            "'2016-03-15T14:28:27Z', '2016-03-15T14:28:35Z', 'adamthomson', 'image/jpeg')",
            "INSERT INTO files VALUES (2, 'Enron3111.docx', 562958569596145, 78080, "
            "'https://os.cloudme.com/v1/documents/562958569596145/4457368325/1', "
            "'2016-03-15T14:29:24Z', '2016-03-15T14:29:24Z', 'adamthomson', "
            "'application/vnd.openxmlformats-officedocument.wordprocessingml.document')",
            "INSERT INTO files VALUES (3, 'cloudme_investigation.zip', 562958569603280, "
            "8939743, 'https://os.cloudme.com/v1/documents/562958569603280/4457426501/1', "
            "'2016-03-16T11:53:52Z', '2016-03-16T11:53:52Z', 'adamthomson', 'application/zip')",
            "INSERT INTO folders VALUES (562958569596145, 'AndroidSyncFolder', 'adamthomson', "
            "'CloudMe', 'false', 'xios://Documents/CloudMe/AndroidSyncFolder/')",
            "INSERT INTO folders VALUES (562958569603280, 'cloudme_investigation', "
            "'adamthomson', 'CloudMe', 'false', "
            "'xios://Documents/CloudMe/cloudme_investigation/')",
        });
}

void make_nsurlcache(const fs::path& file, const std::vector<CacheEntry>& entries) {
    sqlite_exec(file,
                {
                    "CREATE TABLE cfurl_cache_response (entry_ID INTEGER PRIMARY KEY, "
                    "request_key TEXT, time_stamp TEXT)",
                    "CREATE TABLE cfurl_cache_receiver_data (entry_ID INTEGER, receiver_data "
                    "BLOB)",
                });
    DbHandle h(file);
    sqlite3_stmt* resp = nullptr;
    sqlite3_stmt* data = nullptr;
    sqlite3_prepare_v2(h.db, "INSERT INTO cfurl_cache_response VALUES (?1, ?2, ?3)", -1, &resp,
                       nullptr);
    sqlite3_prepare_v2(h.db, "INSERT INTO cfurl_cache_receiver_data VALUES (?1, ?2)", -1, &data,
                       nullptr);
    int id = 1;
    for (const auto& e : entries) {
        sqlite3_bind_int(resp, 1, id);
        sqlite3_bind_text(resp, 2, e.url.c_str(), -1, SQLITE_TRANSIENT);
        sqlite3_bind_text(resp, 3, e.time_stamp.c_str(), -1, SQLITE_TRANSIENT);
        sqlite3_step(resp);
        sqlite3_reset(resp);
        sqlite3_bind_int(data, 1, id);
        sqlite3_bind_blob(data, 2, e.body.data(), static_cast<int>(e.body.size()),
                          SQLITE_TRANSIENT);
        sqlite3_step(data);
        sqlite3_reset(data);
        ++id;
    }
    sqlite3_finalize(resp);
    sqlite3_finalize(data);
}

void build_composite_root(const fs::path& root) {
    auto write = [](const fs::path& p, const std::string& text) {
        fs::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary);
        out << text;
    };

    auto cloudme_dir = root / "Users/anonymous/AppData/Local/CloudMe";
    fs::create_directories(cloudme_dir / "logs");
    make_cachedb(cloudme_dir / "cache.db");
    write(cloudme_dir / "logs/2016-03-15.txt", daily_log_text());

    auto v1 = root / "Users/anonymous/AppData/Local/Google/Chrome/cache-extract/"
                     "www.cloudme.com/v1";
    write(v1 / "users/12886417622/webshares/"
               "order=name&desc=false&count=1000&offset=0&resources=true&_=145.xml",
          kWebsharesXml);
    write(v1 / "users/12886417622/favorites/"
               "extended=true&order=favoritename&count=1000&offset=0&_=1458191.xml",
          kFavoritesXml);
    write(v1 / "folders/562958569591836", kFolderListingXml);
    write(v1 / "documents/562958569591836/4457417800/1", kDeviceSyncXml);
    write(v1 / "documents/562958569596136/4457417804/1/Enron3111.jpg",
          std::string("\xFF\xD8\xFF\xE0 not a real jpeg"));

    write(root / "home/suspectpc/.config/CloudMe/Sync.conf", kSyncConfText);
}

}  // namespace fixtures
