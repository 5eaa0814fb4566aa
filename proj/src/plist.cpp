// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/plist.hpp"

#include <cmath>
#include <cstring>

#include "cloudme/util.hpp"
#include "cloudme/xmlmini.hpp"

namespace cloudme {

namespace {

constexpr double kAppleEpochOffset = 978307200.0;  // 2001-01-01 in Unix seconds

// ---- binary decoding ----------------------------------------------------

class BinaryReader {
  public:
    explicit BinaryReader(std::string_view bytes) : b_(bytes) {
        if (b_.size() < 8 + 32) throw TruncatedPlist("shorter than header plus trailer");
        if (b_.compare(0, 7, "bplist0") != 0) throw NotPlist("missing bplist00 magic");

        const auto* t = u8() + b_.size() - 32;
        offset_int_size_ = t[6];
        object_ref_size_ = t[7];
        num_objects_ = be_u64(t + 8);
        top_object_ = be_u64(t + 16);
        offset_table_offset_ = be_u64(t + 24);

        if (offset_int_size_ < 1 || offset_int_size_ > 8 || object_ref_size_ < 1 ||
            object_ref_size_ > 8)
            throw TruncatedPlist("implausible trailer int sizes");
        if (num_objects_ == 0 || num_objects_ > (b_.size() / 1) + 1 ||
            top_object_ >= num_objects_)
            throw TruncatedPlist("implausible object count");
        if (offset_table_offset_ + num_objects_ * offset_int_size_ > b_.size() - 32)
            throw TruncatedPlist("offset table out of bounds");

        offsets_.reserve(num_objects_);
        for (std::uint64_t i = 0; i < num_objects_; ++i) {
            std::uint64_t off = be_uint(offset_table_offset_ + i * offset_int_size_,
                                        offset_int_size_);
            if (off >= b_.size() - 32) throw TruncatedPlist("object offset out of bounds");
            offsets_.push_back(off);
        }
    }

    PlistValue top() { return object(top_object_, 0); }

  private:
    std::string_view b_;
    unsigned offset_int_size_ = 0, object_ref_size_ = 0;
    std::uint64_t num_objects_ = 0, top_object_ = 0, offset_table_offset_ = 0;
    std::vector<std::uint64_t> offsets_;

    const std::uint8_t* u8() const {
        return reinterpret_cast<const std::uint8_t*>(b_.data());
    }

    static std::uint64_t be_u64(const std::uint8_t* p) {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
        return v;
    }

    std::uint64_t be_uint(std::uint64_t pos, unsigned n) const {
        if (pos + n > b_.size()) throw TruncatedPlist("integer runs past end");
        std::uint64_t v = 0;
        for (unsigned i = 0; i < n; ++i) v = (v << 8) | u8()[pos + i];
        return v;
    }

    // Marker low nibble 0xF means the real count follows as an int object.
    std::uint64_t read_count(std::uint64_t& pos, unsigned nibble) {
        if (nibble != 0xF) return nibble;
        if (pos >= b_.size()) throw TruncatedPlist("count marker past end");
        unsigned marker = u8()[pos++];
        if ((marker >> 4) != 0x1) throw TruncatedPlist("count is not an int object");
        unsigned n = 1u << (marker & 0xF);
        if (n > 8) throw TruncatedPlist("count wider than 8 bytes");
        auto v = be_uint(pos, n);
        pos += n;
        return v;
    }

    PlistValue object(std::uint64_t index, int depth) {
        if (depth > 512) throw TruncatedPlist("nesting too deep");
        if (index >= num_objects_) throw TruncatedPlist("object ref out of range");
        std::uint64_t pos = offsets_[index];
        unsigned marker = u8()[pos++];
        unsigned type = marker >> 4, nibble = marker & 0xF;

        PlistValue out;
        switch (type) {
            case 0x0:
                if (marker == 0x00) out.v = nullptr;
                else if (marker == 0x08) out.v = false;
                else if (marker == 0x09) out.v = true;
                else throw UnsupportedObjectType(marker);
                return out;
            case 0x1: {  // int, 2^nibble bytes, big-endian; 8-byte is signed
                unsigned n = 1u << nibble;
                if (n > 8) throw UnsupportedObjectType(marker);
                auto raw = be_uint(pos, n);
                out.v = static_cast<std::int64_t>(raw);
                return out;
            }
            case 0x2: {  // real
                unsigned n = 1u << nibble;
                if (n == 4) {
                    auto raw = static_cast<std::uint32_t>(be_uint(pos, 4));
                    float f;
                    std::memcpy(&f, &raw, 4);
                    out.v = static_cast<double>(f);
                } else if (n == 8) {
                    auto raw = be_uint(pos, 8);
                    double d;
                    std::memcpy(&d, &raw, 8);
                    out.v = d;
                } else {
                    throw UnsupportedObjectType(marker);
                }
                return out;
            }
            case 0x3: {  // date: 8-byte big-endian double
                if (nibble != 0x3) throw UnsupportedObjectType(marker);
                auto raw = be_uint(pos, 8);
                double d;
                std::memcpy(&d, &raw, 8);
                out.v = PlistDate{d};
                return out;
            }
            case 0x4: {  // data
                auto n = read_count(pos, nibble);
                if (pos + n > b_.size()) throw TruncatedPlist("data runs past end");
                out.v = PlistValue::Data(u8() + pos, u8() + pos + n);
                return out;
            }
            case 0x5: {  // ascii string
                auto n = read_count(pos, nibble);
                if (pos + n > b_.size()) throw TruncatedPlist("string runs past end");
                out.v = std::string(b_.substr(pos, n));
                return out;
            }
            case 0x6: {  // utf16-be string, n characters
                auto n = read_count(pos, nibble);
                if (pos + 2 * n > b_.size()) throw TruncatedPlist("string runs past end");
                out.v = utf16be_to_utf8(u8() + pos, 2 * n);
                return out;
            }
            case 0xA: {  // array
                auto n = read_count(pos, nibble);
                if (pos + n * object_ref_size_ > b_.size() - 32)
                    throw TruncatedPlist("array refs run past end");
                PlistValue::Array items;
                items.reserve(n);
                for (std::uint64_t i = 0; i < n; ++i)
                    items.push_back(object(be_uint(pos + i * object_ref_size_, object_ref_size_),
                                           depth + 1));
                out.v = std::move(items);
                return out;
            }
            case 0xD: {  // dict: n key refs then n value refs
                auto n = read_count(pos, nibble);
                if (pos + 2 * n * object_ref_size_ > b_.size() - 32)
                    throw TruncatedPlist("dict refs run past end");
                PlistValue::Dict dict;
                dict.reserve(n);
                for (std::uint64_t i = 0; i < n; ++i) {
                    auto key = object(be_uint(pos + i * object_ref_size_, object_ref_size_),
                                      depth + 1);
                    auto val = object(
                        be_uint(pos + (n + i) * object_ref_size_, object_ref_size_), depth + 1);
                    const auto* ks = std::get_if<std::string>(&key.v);
                    if (!ks) throw TruncatedPlist("non-string dictionary key");
                    dict.push_back({*ks, std::move(val)});
                }
                out.v = std::move(dict);
                return out;
            }
            default:
                throw UnsupportedObjectType(marker);
        }
    }
};

// ---- XML decoding -------------------------------------------------------

PlistValue xml_value(const xml::Node& node);

PlistValue xml_dict(const xml::Node& node) {
    PlistValue out;
    PlistValue::Dict dict;
    std::optional<std::string> pending_key;
    for (const auto& child : node.children) {
        if (child.local_name() == "key") {
            pending_key = child.text;
        } else {
            if (!pending_key) throw NotPlist("dict value without preceding <key>");
            dict.push_back({*pending_key, xml_value(child)});
            pending_key.reset();
        }
    }
    if (pending_key) throw NotPlist("trailing <key> without value");
    out.v = std::move(dict);
    return out;
}

PlistValue xml_value(const xml::Node& node) {
    PlistValue out;
    auto name = node.local_name();
    if (name == "dict") return xml_dict(node);
    if (name == "array") {
        PlistValue::Array items;
        for (const auto& child : node.children) items.push_back(xml_value(child));
        out.v = std::move(items);
        return out;
    }
    if (name == "string") {
        out.v = node.text;
        return out;
    }
    if (name == "integer") {
        auto i = parse_i64(node.text);
        if (!i) throw NotPlist("bad <integer> value: " + node.text);
        out.v = *i;
        return out;
    }
    if (name == "real") {
        try {
            out.v = std::stod(node.text);
        } catch (...) {
            throw NotPlist("bad <real> value: " + node.text);
        }
        return out;
    }
    if (name == "true") {
        out.v = true;
        return out;
    }
    if (name == "false") {
        out.v = false;
        return out;
    }
    if (name == "date") {
        auto t = try_normalize_timestamp(node.text, TimeHint::Iso8601Z);
        if (!t) throw NotPlist("bad <date> value: " + node.text);
        auto unix_ms = t->instant.time_since_epoch().count();
        out.v = PlistDate{static_cast<double>(unix_ms) / 1000.0 - kAppleEpochOffset};
        return out;
    }
    if (name == "data") {
        std::string compact;
        for (char c : node.text)
            if (c != ' ' && c != '\n' && c != '\r' && c != '\t') compact.push_back(c);
        auto bytes = base64_decode(compact);
        if (!bytes) throw NotPlist("bad <data> payload");
        out.v = std::move(*bytes);
        return out;
    }
    throw NotPlist("unknown element <" + std::string(name) + ">");
}

void flatten_into(const PlistValue& value, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& out) {
    if (const auto* dict = value.as_dict()) {
        for (const auto& entry : *dict) {
            auto key = prefix.empty() ? entry.key : prefix + "." + entry.key;
            flatten_into(entry.value, key, out);
        }
        return;
    }
    std::string text;
    if (const auto* s = std::get_if<std::string>(&value.v)) text = *s;
    else if (const auto* i = std::get_if<std::int64_t>(&value.v)) text = std::to_string(*i);
    else if (const auto* b = std::get_if<bool>(&value.v)) text = *b ? "true" : "false";
    else if (const auto* d = std::get_if<double>(&value.v)) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", *d);
        text = buf;
    } else if (const auto* date = std::get_if<PlistDate>(&value.v)) {
        text = date->to_timestamp().iso8601();
    } else {
        return;  // arrays / data are not identity material
    }
    if (!prefix.empty()) out.emplace_back(prefix, std::move(text));
}

}  // namespace

Timestamp PlistDate::to_timestamp() const {
    Timestamp t;
    double unix_ms = (apple_seconds + kAppleEpochOffset) * 1000.0;
    t.instant = SysMillis{std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(unix_ms)))};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", apple_seconds);
    t.raw = buf;
    return t;
}

bool PlistValue::is_dict() const { return std::holds_alternative<Dict>(v); }

const PlistValue::Dict* PlistValue::as_dict() const { return std::get_if<Dict>(&v); }

const PlistValue* PlistValue::find(std::string_view key) const {
    if (const auto* dict = as_dict())
        for (const auto& entry : *dict)
            if (entry.key == key) return &entry.value;
    return nullptr;
}

const std::string* PlistValue::as_string() const { return std::get_if<std::string>(&v); }

bool operator==(const PlistValue& a, const PlistValue& b) { return a.v == b.v; }

PlistValue parse_plist_bytes(std::string_view bytes) {
    if (bytes.size() >= 7 && bytes.compare(0, 7, "bplist0") == 0) {
        BinaryReader reader(bytes);
        return reader.top();
    }
    // XML route: require a plist-looking document.
    std::size_t probe_end = std::min<std::size_t>(bytes.size(), 512);
    auto head = bytes.substr(0, probe_end);
    if (head.find("<plist") == std::string_view::npos &&
        head.find("<?xml") == std::string_view::npos)
        throw NotPlist("neither bplist00 magic nor an XML declaration");
    xml::Node root;
    try {
        root = xml::parse(bytes);
    } catch (const xml::MalformedXml& e) {
        throw NotPlist(e.what());
    }
    if (root.local_name() == "plist") {
        if (root.children.empty()) throw NotPlist("<plist> has no value");
        return xml_value(root.children.front());
    }
    return xml_value(root);
}

PlistValue parse_plist(const std::filesystem::path& file) {
    return parse_plist_bytes(read_file_bytes(file));
}

std::vector<std::pair<std::string, std::string>> flatten_plist_strings(const PlistValue& root) {
    std::vector<std::pair<std::string, std::string>> out;
    flatten_into(root, "", out);
    return out;
}

}  // namespace cloudme
