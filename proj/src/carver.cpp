// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/carver.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <nlohmann/json.hpp>

#include "cloudme/jsonx.hpp"

#include "cloudme/util.hpp"

namespace cloudme {

namespace {

// Serial-type payload sizes: integer classes 0-6, float 7, constants 8/9,
// text/blob per the (code-13)/2 and (code-12)/2 length formulas.
bool serial_type_known(std::uint64_t st) { return st != 10 && st != 11; }

std::uint64_t serial_type_size(std::uint64_t st) {
    switch (st) {
        case 0:
        case 8:
        case 9:
            return 0;
        case 1:
            return 1;
        case 2:
            return 2;
        case 3:
            return 3;
        case 4:
            return 4;
        case 5:
            return 6;
        case 6:
        case 7:
            return 8;
        default:
            return (st - 12) / 2;
    }
}

bool class_accepts(TypeClass c, std::uint64_t st) {
    if (!serial_type_known(st)) return false;
    switch (c) {
        case TypeClass::Any:
            return true;
        case TypeClass::Integer:
            return st <= 6 || st == 8 || st == 9;  // NULL matches any class
        case TypeClass::Text:
            return st == 0 || (st >= 13 && (st % 2) == 1);
        case TypeClass::Blob:
            return st == 0 || (st >= 12 && (st % 2) == 0);
    }
    return false;
}

CarvedValue decode_field(std::span<const std::uint8_t> bytes, std::size_t off,
                         std::uint64_t st) {
    auto be_int = [&](unsigned n) -> std::int64_t {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < n; ++i) v = (v << 8) | bytes[off + i];
        // sign-extend
        unsigned bits = n * 8;
        if (bits < 64 && (v & (1ULL << (bits - 1)))) v |= ~((1ULL << bits) - 1);
        return static_cast<std::int64_t>(v);
    };
    switch (st) {
        case 0:
            return std::monostate{};
        case 8:
            return std::int64_t{0};
        case 9:
            return std::int64_t{1};
        case 1:
            return be_int(1);
        case 2:
            return be_int(2);
        case 3:
            return be_int(3);
        case 4:
            return be_int(4);
        case 5:
            return be_int(6);
        case 6:
            return be_int(8);
        case 7: {
            std::uint64_t v = 0;
            for (unsigned i = 0; i < 8; ++i) v = (v << 8) | bytes[off + i];
            double d;
            std::memcpy(&d, &v, 8);
            return d;
        }
        default: {
            auto n = serial_type_size(st);
            if (st % 2) return std::string(reinterpret_cast<const char*>(bytes.data()) + off, n);
            return std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(off),
                                             bytes.begin() + static_cast<std::ptrdiff_t>(off + n));
        }
    }
}

// ---- pattern search -------------------------------------------------------

struct Pattern {
    std::size_t term_index = 0;
    Encoding encoding = Encoding::Ascii;
    std::vector<std::uint8_t> bytes;
};

void lower_bytes(std::uint8_t* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (data[i] >= 'A' && data[i] <= 'Z') data[i] = static_cast<std::uint8_t>(data[i] + 32);
}

struct RawHit {
    std::uint64_t offset;
    std::size_t term_index;
    Encoding encoding;
};

// Scan one chunk (already case-folded if requested). Matches must start
// before owned_end to stay unique across overlapping chunks.
void find_in_chunk(std::string_view hay, std::uint64_t base, std::size_t owned_end,
                   const Pattern& pat, std::vector<RawHit>& out) {
    std::string_view needle(reinterpret_cast<const char*>(pat.bytes.data()), pat.bytes.size());
    if (needle.empty()) return;
    std::size_t pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string_view::npos) {
        if (pos >= owned_end) break;
        out.push_back({base + pos, pat.term_index, pat.encoding});
        ++pos;
    }
}

std::vector<Pattern> build_patterns(const std::vector<std::string>& terms, bool ci) {
    std::vector<Pattern> pats;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        Pattern ascii;
        ascii.term_index = i;
        ascii.encoding = Encoding::Ascii;
        ascii.bytes.assign(terms[i].begin(), terms[i].end());
        if (ci) lower_bytes(ascii.bytes.data(), ascii.bytes.size());
        if (!ascii.bytes.empty()) pats.push_back(std::move(ascii));

        Pattern wide;
        wide.term_index = i;
        wide.encoding = Encoding::Utf16le;
        wide.bytes = utf8_to_utf16le(terms[i]);
        if (ci) lower_bytes(wide.bytes.data(), wide.bytes.size());
        if (!wide.bytes.empty()) pats.push_back(std::move(wide));
    }
    return pats;
}

std::vector<RawHit> scan_raw(const ByteSource& dump, const std::vector<Pattern>& pats,
                             std::size_t chunk_bytes, bool ci, bool parallel) {
    std::size_t overlap = 0;
    for (const auto& p : pats) overlap = std::max(overlap, p.bytes.size());
    if (overlap) --overlap;
    if (chunk_bytes == 0) chunk_bytes = 4 << 20;

    std::uint64_t total = dump.size();
    std::uint64_t nchunks = total == 0 ? 0 : (total + chunk_bytes - 1) / chunk_bytes;
    std::vector<std::vector<RawHit>> per_chunk(nchunks);

    auto scan_chunk = [&](std::uint64_t ci_idx, std::vector<std::uint8_t>& buf) {
        std::uint64_t base = ci_idx * chunk_bytes;
        buf.resize(chunk_bytes + overlap);
        std::size_t n = dump.read_at(base, buf);
        if (ci) lower_bytes(buf.data(), n);
        std::string_view hay(reinterpret_cast<const char*>(buf.data()), n);
        std::size_t owned_end = std::min<std::size_t>(chunk_bytes, n);
        for (const auto& p : pats) find_in_chunk(hay, base, owned_end, p, per_chunk[ci_idx]);
    };

#ifdef _OPENMP
    if (parallel && nchunks > 1) {
#pragma omp parallel
        {
            std::vector<std::uint8_t> buf;
#pragma omp for schedule(dynamic)
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(nchunks); ++i)
                scan_chunk(static_cast<std::uint64_t>(i), buf);
        }
    } else
#else
    (void)parallel;
#endif
    {
        std::vector<std::uint8_t> buf;
        for (std::uint64_t i = 0; i < nchunks; ++i) scan_chunk(i, buf);
    }

    std::vector<RawHit> hits;
    for (auto& chunk : per_chunk)
        hits.insert(hits.end(), chunk.begin(), chunk.end());
    std::sort(hits.begin(), hits.end(), [](const RawHit& a, const RawHit& b) {
        if (a.offset != b.offset) return a.offset < b.offset;
        if (a.term_index != b.term_index) return a.term_index < b.term_index;
        return static_cast<int>(a.encoding) < static_cast<int>(b.encoding);
    });
    return hits;
}

std::vector<KeywordHit> hits_with_context(const ByteSource& dump,
                                          const std::vector<std::string>& terms,
                                          const std::vector<RawHit>& raw,
                                          const ScanOptions& opts) {
    std::vector<KeywordHit> out;
    out.reserve(raw.size());
    for (const auto& r : raw) {
        KeywordHit hit;
        hit.term = terms[r.term_index];
        hit.offset = r.offset;
        hit.encoding = r.encoding;
        std::size_t match_len = r.encoding == Encoding::Ascii
                                    ? hit.term.size()
                                    : utf8_to_utf16le(hit.term).size();
        std::uint64_t ctx_start = r.offset >= opts.context_bytes ? r.offset - opts.context_bytes : 0;
        std::uint64_t ctx_end = std::min<std::uint64_t>(dump.size(),
                                                        r.offset + match_len + opts.context_bytes);
        hit.context.resize(ctx_end - ctx_start);
        auto n = dump.read_at(ctx_start, hit.context);
        hit.context.resize(n);
        out.push_back(std::move(hit));
    }
    return out;
}

// ---- template-validated record decode --------------------------------------

// Decode a record at window-relative `off`, requiring exactly the template's
// column count, class agreement for every field, and the anchor column's
// text payload to sit at `anchor_rel` matching `anchor` byte-for-byte.
std::optional<CarvedRecord> try_template_decode(std::span<const std::uint8_t> window,
                                                std::size_t off, std::size_t anchor_rel,
                                                std::string_view anchor,
                                                const RecordTemplate& tmpl,
                                                std::uint64_t window_base) {
    const std::size_t ncols = tmpl.columns.size();
    VarintResult hl;
    try {
        hl = decode_varint(window, off);
    } catch (const Truncated&) {
        return std::nullopt;
    }
    if (hl.value < hl.length) return std::nullopt;
    std::uint64_t header_end64 = off + hl.value;
    if (header_end64 > window.size()) return std::nullopt;
    auto header_end = static_cast<std::size_t>(header_end64);

    std::size_t pos = off + hl.length;
    std::vector<std::uint64_t> types;
    types.reserve(ncols);
    while (pos < header_end) {
        if (types.size() == ncols) return std::nullopt;  // too many columns
        VarintResult st;
        try {
            st = decode_varint(window, pos);
        } catch (const Truncated&) {
            return std::nullopt;
        }
        if (pos + st.length > header_end) return std::nullopt;
        if (!serial_type_known(st.value)) return std::nullopt;
        types.push_back(st.value);
        pos += st.length;
    }
    if (types.size() != ncols) return std::nullopt;

    // Field layout and validation.
    std::size_t payload = header_end;
    std::vector<std::size_t> field_offsets(ncols);
    for (std::size_t i = 0; i < ncols; ++i) {
        if (!class_accepts(tmpl.columns[i].second, types[i])) return std::nullopt;
        field_offsets[i] = payload;
        auto sz = serial_type_size(types[i]);
        if (payload + sz > window.size()) return std::nullopt;
        payload += static_cast<std::size_t>(sz);
    }

    // The anchor column must be non-NULL text, exactly the anchor bytes,
    // starting exactly at the anchor offset.
    auto ast = types[tmpl.anchor_column];
    if (ast < 13 || (ast % 2) == 0) return std::nullopt;
    if (serial_type_size(ast) != anchor.size()) return std::nullopt;
    if (field_offsets[tmpl.anchor_column] != anchor_rel) return std::nullopt;
    if (std::memcmp(window.data() + anchor_rel, anchor.data(), anchor.size()) != 0)
        return std::nullopt;

    CarvedRecord rec;
    rec.template_name = tmpl.name;
    rec.offset = window_base + off;
    rec.fields.reserve(ncols);
    for (std::size_t i = 0; i < ncols; ++i)
        rec.fields.push_back({types[i], decode_field(window, field_offsets[i], types[i])});
    if (auto rowid = decode_varint_before(window, off))
        rec.rowid = static_cast<std::int64_t>(rowid->value);
    rec.confidence = 1.0;  // all template columns satisfied by construction
    return rec;
}

std::vector<CarvedRecord> carve_impl(const ByteSource& dump, std::string_view anchor,
                                     const RecordTemplate& tmpl, const CarveOptions& opts,
                                     bool parallel) {
    if (anchor.empty() || tmpl.columns.empty() || tmpl.anchor_column >= tmpl.columns.size())
        return {};

    std::vector<Pattern> pats(1);
    pats[0].term_index = 0;
    pats[0].encoding = Encoding::Ascii;
    pats[0].bytes.assign(anchor.begin(), anchor.end());
    auto hits = scan_raw(dump, pats, opts.chunk_bytes, /*ci=*/false, parallel);

    // Window before the anchor: candidate headers plus room for the
    // payload-length and rowid varints in front of them.
    const std::size_t before = opts.back_search_bound + 18;

    std::vector<std::vector<CarvedRecord>> per_hit(hits.size());

    auto process_hit = [&](std::size_t idx, std::vector<std::uint8_t>& buf) {
        std::uint64_t a = hits[idx].offset;
        std::uint64_t w0 = a >= before ? a - before : 0;
        std::uint64_t wend = std::min<std::uint64_t>(dump.size(),
                                                     a + anchor.size() + opts.max_record_bytes);
        buf.resize(static_cast<std::size_t>(wend - w0));
        auto n = dump.read_at(w0, buf);
        std::span<const std::uint8_t> window(buf.data(), n);
        auto anchor_rel = static_cast<std::size_t>(a - w0);

        std::uint64_t lowest = a >= opts.back_search_bound ? a - opts.back_search_bound : 0;
        for (std::uint64_t h = a; h-- > lowest;) {
            auto rel = static_cast<std::size_t>(h - w0);
            if (auto rec = try_template_decode(window, rel, anchor_rel, anchor, tmpl, w0))
                per_hit[idx].push_back(std::move(*rec));
        }
    };

#ifdef _OPENMP
    if (parallel && hits.size() > 1) {
#pragma omp parallel
        {
            std::vector<std::uint8_t> buf;
#pragma omp for schedule(dynamic)
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(hits.size()); ++i)
                process_hit(static_cast<std::size_t>(i), buf);
        }
    } else
#else
    (void)parallel;
#endif
    {
        std::vector<std::uint8_t> buf;
        for (std::size_t i = 0; i < hits.size(); ++i) process_hit(i, buf);
    }

    std::map<std::uint64_t, CarvedRecord> by_offset;
    for (auto& records : per_hit)
        for (auto& rec : records) by_offset.emplace(rec.offset, std::move(rec));

    std::vector<CarvedRecord> out;
    out.reserve(by_offset.size());
    for (auto& [off, rec] : by_offset) out.push_back(std::move(rec));
    return out;
}

nlohmann::ordered_json value_json(const CarvedValue& v) {
    if (std::holds_alternative<std::monostate>(v)) return nullptr;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    const auto& b = std::get<std::vector<std::uint8_t>>(v);
    return hex_lower(b.data(), b.size());
}

}  // namespace

std::size_t MemorySource::read_at(std::uint64_t off, std::span<std::uint8_t> out) const {
    if (off >= bytes_.size()) return 0;
    std::size_t n = std::min<std::uint64_t>(out.size(), bytes_.size() - off);
    std::memcpy(out.data(), bytes_.data() + off, n);
    return n;
}

FileSource::FileSource(const std::filesystem::path& file) {
    fd_ = ::open(file.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd_ < 0) throw Unreadable(file.string(), std::strerror(errno));
    struct stat st {};
    if (::fstat(fd_, &st) != 0) {
        ::close(fd_);
        throw Unreadable(file.string(), "fstat failed");
    }
    size_ = static_cast<std::uint64_t>(st.st_size);
}

FileSource::~FileSource() {
    if (fd_ >= 0) ::close(fd_);
}

std::size_t FileSource::read_at(std::uint64_t off, std::span<std::uint8_t> out) const {
    std::size_t total = 0;
    while (total < out.size()) {
        ssize_t n = ::pread(fd_, out.data() + total, out.size() - total,
                            static_cast<off_t>(off + total));
        if (n <= 0) break;
        total += static_cast<std::size_t>(n);
    }
    return total;
}

VarintResult decode_varint(std::span<const std::uint8_t> bytes, std::size_t offset) {
    if (offset >= bytes.size()) throw Truncated("varint starts past end");
    std::uint64_t value = 0;
    for (unsigned i = 0; i < 8; ++i) {
        if (offset + i >= bytes.size()) throw Truncated("varint continuation past end");
        std::uint8_t b = bytes[offset + i];
        value = (value << 7) | (b & 0x7F);
        if ((b & 0x80) == 0) return {value, i + 1};
    }
    // ninth byte contributes all 8 bits
    if (offset + 8 >= bytes.size()) throw Truncated("varint continuation past end");
    value = (value << 8) | bytes[offset + 8];
    return {value, 9};
}

std::optional<VarintResult> decode_varint_before(std::span<const std::uint8_t> bytes,
                                                 std::size_t end) {
    if (end == 0 || end > bytes.size()) return std::nullopt;
    std::uint8_t last = bytes[end - 1];
    if (last & 0x80) {
        // Only a nine-byte varint may end with the high bit set.
        if (end < 9) return std::nullopt;
        for (std::size_t i = end - 9; i < end - 1; ++i)
            if ((bytes[i] & 0x80) == 0) return std::nullopt;
        return decode_varint(bytes, end - 9);
    }
    std::size_t start = end - 1;
    while (start > 0 && (end - start) < 9 && (bytes[start - 1] & 0x80)) --start;
    if (end - start > 9) return std::nullopt;
    auto v = decode_varint(bytes, start);
    if (v.length != end - start) return std::nullopt;
    return v;
}

std::string_view to_string(TypeClass c) {
    switch (c) {
        case TypeClass::Integer: return "integer";
        case TypeClass::Text: return "text";
        case TypeClass::Blob: return "blob";
        case TypeClass::Any: return "any";
    }
    return "?";
}

std::optional<TypeClass> type_class_from_string(std::string_view s) {
    auto lower = to_lower_ascii(s);
    if (lower == "integer" || lower == "int") return TypeClass::Integer;
    if (lower == "text") return TypeClass::Text;
    if (lower == "blob") return TypeClass::Blob;
    if (lower == "any") return TypeClass::Any;
    return std::nullopt;
}

const RecordTemplate& user_table_template() {
    static const RecordTemplate t{
        "user_table",
        {{"user_id", TypeClass::Integer},
         {"username", TypeClass::Text},
         {"devicename", TypeClass::Text},
         {"created", TypeClass::Text}},
        1};
    return t;
}

const RecordTemplate& syncfolder_table_template() {
    static const RecordTemplate t{
        "syncfolder_table",
        {{"owner", TypeClass::Integer},
         {"name", TypeClass::Text},
         {"local_path", TypeClass::Text},
         {"cloud_path", TypeClass::Text},
         {"folder_id", TypeClass::Integer},
         {"created", TypeClass::Text},
         {"last_run", TypeClass::Text},
         {"inactivated", TypeClass::Text},
         {"encrypted", TypeClass::Text}},
        1};
    return t;
}

const RecordTemplate& syncfolder_document_table_template() {
    static const RecordTemplate t{
        "syncfolder_document_table",
        {{"owner", TypeClass::Integer},
         {"name", TypeClass::Text},
         {"root_folder_id", TypeClass::Integer},
         {"folder_id", TypeClass::Integer},
         {"document_id", TypeClass::Integer},
         {"size", TypeClass::Integer},
         {"modified_date", TypeClass::Text},
         {"checksum", TypeClass::Text},
         {"main_checksum", TypeClass::Text}},
        1};
    return t;
}

std::optional<RecordTemplate> builtin_template(std::string_view name) {
    if (name == "user_table") return user_table_template();
    if (name == "syncfolder_table") return syncfolder_table_template();
    if (name == "syncfolder_document_table") return syncfolder_document_table_template();
    return std::nullopt;
}

RecordTemplate template_from_json(std::string_view json) {
    auto j = nlohmann::json::parse(json);
    RecordTemplate t;
    t.name = j.at("name").get<std::string>();
    t.anchor_column = j.at("anchor_column").get<std::size_t>();
    for (const auto& col : j.at("columns")) {
        auto cls = type_class_from_string(col.at("class").get<std::string>());
        if (!cls) throw Error("unknown column class: " + col.at("class").get<std::string>());
        t.columns.emplace_back(col.at("name").get<std::string>(), *cls);
    }
    if (t.columns.empty()) throw Error("template has no columns");
    if (t.anchor_column >= t.columns.size()) throw Error("anchor_column out of range");
    if (t.columns[t.anchor_column].second != TypeClass::Text)
        throw Error("anchor column must have class text");
    return t;
}

CarvedRecord decode_record(std::span<const std::uint8_t> bytes, std::size_t offset) {
    auto hl = decode_varint(bytes, offset);
    if (hl.value < hl.length) throw MalformedHeader("header length shorter than its own varint");
    std::uint64_t header_end64 = offset + hl.value;
    if (header_end64 > bytes.size()) throw Truncated("header extends past end");
    auto header_end = static_cast<std::size_t>(header_end64);

    std::vector<std::uint64_t> types;
    std::size_t pos = offset + hl.length;
    while (pos < header_end) {
        auto st = decode_varint(bytes, pos);
        if (pos + st.length > header_end)
            throw MalformedHeader("serial type crosses header boundary");
        if (!serial_type_known(st.value))
            throw MalformedHeader("reserved serial type " + std::to_string(st.value));
        types.push_back(st.value);
        pos += st.length;
    }

    CarvedRecord rec;
    rec.template_name = "";
    rec.offset = offset;
    std::size_t payload = header_end;
    for (auto st : types) {
        auto sz = serial_type_size(st);
        if (payload + sz > bytes.size()) throw Truncated("field payload past end");
        rec.fields.push_back({st, decode_field(bytes, payload, st)});
        payload += static_cast<std::size_t>(sz);
    }
    if (auto rowid = decode_varint_before(bytes, offset))
        rec.rowid = static_cast<std::int64_t>(rowid->value);
    return rec;
}

std::string_view to_string(Encoding e) {
    return e == Encoding::Ascii ? "ascii" : "utf16le";
}

std::vector<KeywordHit> scan_keywords(const ByteSource& dump,
                                      const std::vector<std::string>& terms,
                                      const ScanOptions& opts) {
    auto pats = build_patterns(terms, opts.case_insensitive);
    auto raw = scan_raw(dump, pats, opts.chunk_bytes, opts.case_insensitive, opts.parallel);
    return hits_with_context(dump, terms, raw, opts);
}

std::vector<KeywordHit> scan_keywords_serial(const ByteSource& dump,
                                             const std::vector<std::string>& terms,
                                             const ScanOptions& opts) {
    auto pats = build_patterns(terms, opts.case_insensitive);
    auto raw = scan_raw(dump, pats, opts.chunk_bytes, opts.case_insensitive, /*parallel=*/false);
    return hits_with_context(dump, terms, raw, opts);
}

std::vector<CarvedRecord> carve_records_by_anchor(const ByteSource& dump,
                                                  std::string_view anchor,
                                                  const RecordTemplate& tmpl,
                                                  const CarveOptions& opts) {
    return carve_impl(dump, anchor, tmpl, opts, opts.parallel);
}

std::vector<CarvedRecord> carve_records_by_anchor_serial(const ByteSource& dump,
                                                         std::string_view anchor,
                                                         const RecordTemplate& tmpl,
                                                         const CarveOptions& opts) {
    return carve_impl(dump, anchor, tmpl, opts, /*parallel=*/false);
}

std::string carved_record_to_jsonl(const CarvedRecord& rec, const std::string& dump_path) {
    nlohmann::ordered_json j;
    j["template"] = rec.template_name;
    j["offset"] = rec.offset;
    j["rowid"] = rec.rowid ? nlohmann::ordered_json(*rec.rowid) : nlohmann::ordered_json(nullptr);
    j["confidence"] = rec.confidence;
    nlohmann::ordered_json fields = nlohmann::ordered_json::array();
    for (const auto& f : rec.fields) {
        nlohmann::ordered_json fj;
        fj["serial_type"] = f.serial_type;
        fj["value"] = value_json(f.value);
        fields.push_back(std::move(fj));
    }
    j["fields"] = std::move(fields);
    j["dump"] = dump_path;
    return dump_compact(j);
}

}  // namespace cloudme
