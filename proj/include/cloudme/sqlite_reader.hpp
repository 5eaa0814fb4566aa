// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cloudme/model.hpp"

struct sqlite3;

namespace cloudme::sqlite {

struct NotSqlite : Error {
    explicit NotSqlite(const std::string& path) : Error("not a SQLite database: " + path) {}
};

struct SchemaMismatch : Error {
    SchemaMismatch(std::string table, std::string column)
        : Error("schema mismatch: table '" + table + "' lacks column '" + column + "'"),
          table(std::move(table)),
          column(std::move(column)) {}
    std::string table, column;
};

/// A database cell: monostate is SQL NULL.
using Value = std::variant<std::monostate, std::int64_t, double, std::string,
                           std::vector<std::uint8_t>>;

bool is_null(const Value& v);
std::optional<std::int64_t> as_int(const Value& v);      // integer cells only
std::optional<std::string> as_text(const Value& v);      // text cells only
std::string value_to_display(const Value& v);            // NULL -> "", blob -> hex

/// Read-only evidence access. The file is opened with immutable semantics:
/// no locks are taken and sibling -wal/-journal files are never replayed,
/// only reported through journal_siblings().
class Database {
  public:
    static Database open_readonly(const std::filesystem::path& file);

    Database(Database&&) noexcept;
    Database& operator=(Database&&) noexcept;
    ~Database();

    bool has_table(const std::string& table) const;
    /// Column names as declared. Empty when the table does not exist.
    std::vector<std::string> columns(const std::string& table) const;
    /// Actual column name matching `wanted` case-insensitively, if any.
    std::optional<std::string> resolve_column(const std::string& table,
                                              const std::string& wanted) const;

    /// Enumerate every row of `table` in rowid order, projecting the given
    /// (already resolved) column names.
    void for_each_row(const std::string& table, const std::vector<std::string>& cols,
                      const std::function<void(const std::vector<Value>&)>& fn) const;

    /// Execute arbitrary SQL and collect all result rows.
    std::vector<std::vector<Value>> query(const std::string& sql) const;

    const std::filesystem::path& path() const { return path_; }

  private:
    explicit Database(sqlite3* db, std::filesystem::path p);
    sqlite3* db_ = nullptr;
    std::filesystem::path path_;
};

/// -wal / -journal siblings present next to the evidence file.
std::vector<std::filesystem::path> journal_siblings(const std::filesystem::path& file);

}  // namespace cloudme::sqlite
