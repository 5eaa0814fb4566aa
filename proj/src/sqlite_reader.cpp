// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/sqlite_reader.hpp"

#include <sqlite3.h>

#include <cstring>
#include <fstream>

#include "cloudme/util.hpp"

namespace cloudme::sqlite {

namespace {

constexpr char kMagic[16] = {'S', 'Q', 'L', 'i', 't', 'e', ' ', 'f',
                             'o', 'r', 'm', 'a', 't', ' ', '3', '\0'};

std::string uri_encode_path(const std::string& p) {
    std::string out = "file:";
    static const char* hexd = "0123456789ABCDEF";
    for (unsigned char c : p) {
        bool plain = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                     (c >= '0' && c <= '9') || c == '/' || c == '.' || c == '-' ||
                     c == '_' || c == '~';
        if (plain) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hexd[c >> 4]);
            out.push_back(hexd[c & 0xF]);
        }
    }
    out += "?immutable=1";
    return out;
}

std::string quote_ident(const std::string& name) {
    std::string out = "\"";
    for (char c : name) {
        out.push_back(c);
        if (c == '"') out.push_back('"');
    }
    out.push_back('"');
    return out;
}

struct StmtCloser {
    void operator()(sqlite3_stmt* s) const { sqlite3_finalize(s); }
};
using StmtPtr = std::unique_ptr<sqlite3_stmt, StmtCloser>;

StmtPtr prepare(sqlite3* db, const std::string& sql) {
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
        std::string msg = sqlite3_errmsg(db);
        sqlite3_finalize(stmt);
        throw Error("sqlite prepare failed: " + msg + " [" + sql + "]");
    }
    return StmtPtr(stmt);
}

Value column_value(sqlite3_stmt* stmt, int i) {
    switch (sqlite3_column_type(stmt, i)) {
        case SQLITE_NULL:
            return std::monostate{};
        case SQLITE_INTEGER:
            return static_cast<std::int64_t>(sqlite3_column_int64(stmt, i));
        case SQLITE_FLOAT:
            return sqlite3_column_double(stmt, i);
        case SQLITE_TEXT: {
            const auto* t = sqlite3_column_text(stmt, i);
            int n = sqlite3_column_bytes(stmt, i);
            return std::string(reinterpret_cast<const char*>(t), static_cast<std::size_t>(n));
        }
        case SQLITE_BLOB:
        default: {
            const auto* b = static_cast<const std::uint8_t*>(sqlite3_column_blob(stmt, i));
            int n = sqlite3_column_bytes(stmt, i);
            return std::vector<std::uint8_t>(b, b + n);
        }
    }
}

}  // namespace

bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

std::optional<std::int64_t> as_int(const Value& v) {
    if (const auto* p = std::get_if<std::int64_t>(&v)) return *p;
    return std::nullopt;
}

std::optional<std::string> as_text(const Value& v) {
    if (const auto* p = std::get_if<std::string>(&v)) return *p;
    return std::nullopt;
}

std::string value_to_display(const Value& v) {
    if (is_null(v)) return "";
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&v)) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", *d);
        return buf;
    }
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    const auto& b = std::get<std::vector<std::uint8_t>>(v);
    return hex_lower(b.data(), b.size());
}

Database::Database(sqlite3* db, std::filesystem::path p) : db_(db), path_(std::move(p)) {}

Database::Database(Database&& o) noexcept : db_(o.db_), path_(std::move(o.path_)) {
    o.db_ = nullptr;
}

Database& Database::operator=(Database&& o) noexcept {
    if (this != &o) {
        if (db_) sqlite3_close(db_);
        db_ = o.db_;
        path_ = std::move(o.path_);
        o.db_ = nullptr;
    }
    return *this;
}

Database::~Database() {
    if (db_) sqlite3_close(db_);
}

Database Database::open_readonly(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Unreadable(file.string());
    char magic[16] = {};
    in.read(magic, 16);
    if (in.gcount() != 16 || std::memcmp(magic, kMagic, 16) != 0)
        throw NotSqlite(file.string());
    in.close();

    sqlite3* db = nullptr;
    auto abs = std::filesystem::absolute(file);
    int rc = sqlite3_open_v2(uri_encode_path(abs.string()).c_str(), &db,
                             SQLITE_OPEN_READONLY | SQLITE_OPEN_URI, nullptr);
    if (rc != SQLITE_OK) {
        std::string msg = db ? sqlite3_errmsg(db) : "open failed";
        if (db) sqlite3_close(db);
        throw NotSqlite(file.string() + " (" + msg + ")");
    }
    return Database(db, abs);
}

bool Database::has_table(const std::string& table) const {
    auto stmt = prepare(db_, "SELECT 1 FROM sqlite_master WHERE type IN ('table','view') AND name=?1");
    sqlite3_bind_text(stmt.get(), 1, table.c_str(), -1, SQLITE_TRANSIENT);
    return sqlite3_step(stmt.get()) == SQLITE_ROW;
}

std::vector<std::string> Database::columns(const std::string& table) const {
    std::vector<std::string> out;
    auto stmt = prepare(db_, "PRAGMA table_info(" + quote_ident(table) + ")");
    while (sqlite3_step(stmt.get()) == SQLITE_ROW) {
        const auto* name = sqlite3_column_text(stmt.get(), 1);
        out.emplace_back(reinterpret_cast<const char*>(name));
    }
    return out;
}

std::optional<std::string> Database::resolve_column(const std::string& table,
                                                    const std::string& wanted) const {
    for (const auto& c : columns(table))
        if (iequals_ascii(c, wanted)) return c;
    return std::nullopt;
}

void Database::for_each_row(const std::string& table, const std::vector<std::string>& cols,
                            const std::function<void(const std::vector<Value>&)>& fn) const {
    std::string sql = "SELECT ";
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) sql += ", ";
        sql += quote_ident(cols[i]);
    }
    sql += " FROM " + quote_ident(table);
    StmtPtr stmt;
    try {
        stmt = prepare(db_, sql + " ORDER BY rowid");
    } catch (const Error&) {
        stmt = prepare(db_, sql);  // WITHOUT ROWID tables
    }
    std::vector<Value> row(cols.size());
    int rc;
    while ((rc = sqlite3_step(stmt.get())) == SQLITE_ROW) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            row[i] = column_value(stmt.get(), static_cast<int>(i));
        fn(row);
    }
    if (rc != SQLITE_DONE) throw Error("sqlite step failed: " + std::string(sqlite3_errmsg(db_)));
}

std::vector<std::vector<Value>> Database::query(const std::string& sql) const {
    auto stmt = prepare(db_, sql);
    std::vector<std::vector<Value>> rows;
    int rc;
    while ((rc = sqlite3_step(stmt.get())) == SQLITE_ROW) {
        int n = sqlite3_column_count(stmt.get());
        std::vector<Value> row(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) row[static_cast<std::size_t>(i)] = column_value(stmt.get(), i);
        rows.push_back(std::move(row));
    }
    if (rc != SQLITE_DONE) throw Error("sqlite step failed: " + std::string(sqlite3_errmsg(db_)));
    return rows;
}

std::vector<std::filesystem::path> journal_siblings(const std::filesystem::path& file) {
    std::vector<std::filesystem::path> out;
    for (const char* suffix : {"-wal", "-journal", "-shm"}) {
        auto sib = file;
        sib += suffix;
        std::error_code ec;
        if (std::filesystem::exists(sib, ec)) out.push_back(sib);
    }
    return out;
}

}  // namespace cloudme::sqlite
