// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cloudme/model.hpp"

namespace cloudme {

struct Truncated : Error {
    explicit Truncated(const std::string& why) : Error("truncated: " + why) {}
};

struct MalformedHeader : Error {
    explicit MalformedHeader(const std::string& why) : Error("malformed record header: " + why) {}
};

/// Random-access byte stream over a dump. read_at is thread-safe, so
/// scanning can be chunked across threads with bounded memory.
class ByteSource {
  public:
    virtual ~ByteSource() = default;
    virtual std::uint64_t size() const = 0;
    /// Read up to out.size() bytes at off; returns the number read.
    virtual std::size_t read_at(std::uint64_t off, std::span<std::uint8_t> out) const = 0;
};

class MemorySource final : public ByteSource {
  public:
    explicit MemorySource(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
    explicit MemorySource(std::string_view bytes)
        : bytes_(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()) {}
    std::uint64_t size() const override { return bytes_.size(); }
    std::size_t read_at(std::uint64_t off, std::span<std::uint8_t> out) const override;

  private:
    std::span<const std::uint8_t> bytes_;
};

/// pread-backed source; never mutates the evidence file.
class FileSource final : public ByteSource {
  public:
    explicit FileSource(const std::filesystem::path& file);  // throws Unreadable
    ~FileSource() override;
    FileSource(const FileSource&) = delete;
    FileSource& operator=(const FileSource&) = delete;
    std::uint64_t size() const override { return size_; }
    std::size_t read_at(std::uint64_t off, std::span<std::uint8_t> out) const override;

  private:
    int fd_ = -1;
    std::uint64_t size_ = 0;
};

// ---- varint / record decoding --------------------------------------------

struct VarintResult {
    std::uint64_t value = 0;
    unsigned length = 0;  // 1..9
};

/// Big-endian base-128 with continuation high bit; a ninth byte contributes
/// all 8 bits. Throws Truncated when the continuation runs past the end.
VarintResult decode_varint(std::span<const std::uint8_t> bytes, std::size_t offset);

/// The varint that ends immediately before `end` (a cell's rowid sits right
/// before the record header). nullopt when no valid encoding ends there.
std::optional<VarintResult> decode_varint_before(std::span<const std::uint8_t> bytes,
                                                 std::size_t end);

enum class TypeClass { Integer, Text, Blob, Any };

std::string_view to_string(TypeClass c);
std::optional<TypeClass> type_class_from_string(std::string_view s);

/// Expected shape of a carved record. The anchor column must be Text; its
/// value is what gets searched for in the dump.
struct RecordTemplate {
    std::string name;
    std::vector<std::pair<std::string, TypeClass>> columns;
    std::size_t anchor_column = 0;
};

/// Templates mirroring the cache.db tables (column order as documented;
/// real databases may differ; supply a custom template to correct it).
const RecordTemplate& user_table_template();
const RecordTemplate& syncfolder_table_template();
const RecordTemplate& syncfolder_document_table_template();
std::optional<RecordTemplate> builtin_template(std::string_view name);

/// Custom template JSON: {"name": ..., "anchor_column": N,
///  "columns": [{"name": ..., "class": "integer|text|blob|any"}, ...]}
RecordTemplate template_from_json(std::string_view json);

using CarvedValue =
    std::variant<std::monostate, std::int64_t, double, std::string, std::vector<std::uint8_t>>;

struct CarvedField {
    std::uint64_t serial_type = 0;
    CarvedValue value;

    friend bool operator==(const CarvedField&, const CarvedField&) = default;
};

/// A record decoded from unstructured bytes: header offset, serial types
/// and payload values, plus the preceding rowid when one decodes cleanly.
struct CarvedRecord {
    std::string template_name;
    std::uint64_t offset = 0;  // header start within the dump
    std::vector<CarvedField> fields;
    std::optional<std::int64_t> rowid;
    double confidence = 1.0;  // template columns satisfied / total

    friend bool operator==(const CarvedRecord&, const CarvedRecord&) = default;
};

/// Decode the record whose header-length varint starts at `offset`.
/// Throws MalformedHeader (header length inconsistent with the consumed
/// varints, or reserved serial types) and Truncated.
CarvedRecord decode_record(std::span<const std::uint8_t> bytes, std::size_t offset);

// ---- keyword scanning -----------------------------------------------------

enum class Encoding { Ascii, Utf16le };

std::string_view to_string(Encoding e);

struct KeywordHit {
    std::string term;
    std::uint64_t offset = 0;
    std::vector<std::uint8_t> context;  // surrounding window, clamped at bounds
    Encoding encoding = Encoding::Ascii;

    friend bool operator==(const KeywordHit&, const KeywordHit&) = default;
};

struct ScanOptions {
    bool case_insensitive = false;
    std::size_t context_bytes = 128;     // each side
    std::size_t chunk_bytes = 4 << 20;   // streaming window
    bool parallel = true;
};

/// All occurrences of each term in 8-bit and UTF-16LE encodings, sorted by
/// offset. Memory use is bounded by the chunk size regardless of dump size.
std::vector<KeywordHit> scan_keywords(const ByteSource& dump,
                                      const std::vector<std::string>& terms,
                                      const ScanOptions& opts = {});

/// Single-threaded reference implementation with identical results.
std::vector<KeywordHit> scan_keywords_serial(const ByteSource& dump,
                                             const std::vector<std::string>& terms,
                                             const ScanOptions& opts = {});

// ---- anchor carving ---------------------------------------------------------

struct CarveOptions {
    std::size_t back_search_bound = 64;      // header search distance before the anchor
    std::size_t max_record_bytes = 1 << 20;  // payload window past the anchor
    std::size_t chunk_bytes = 4 << 20;
    bool parallel = true;
};

/// Find every occurrence of `anchor`, walk candidate header starts backwards
/// and keep each full-record decoding that places the anchor text at the
/// found offset with all fields matching the template. Deduplicated by
/// offset, sorted. Never throws on content; unvalidated hits are skipped.
std::vector<CarvedRecord> carve_records_by_anchor(const ByteSource& dump,
                                                  std::string_view anchor,
                                                  const RecordTemplate& tmpl,
                                                  const CarveOptions& opts = {});

std::vector<CarvedRecord> carve_records_by_anchor_serial(const ByteSource& dump,
                                                         std::string_view anchor,
                                                         const RecordTemplate& tmpl,
                                                         const CarveOptions& opts = {});

std::string carved_record_to_jsonl(const CarvedRecord& rec, const std::string& dump_path);

}  // namespace cloudme
