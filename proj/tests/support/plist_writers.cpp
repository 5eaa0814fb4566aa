// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "support/plist_writers.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <stdexcept>
#include <variant>

namespace fixtures {

using cloudme::PlistDate;
using cloudme::PlistValue;

namespace {

constexpr double kAppleEpoch = 978307200.0;

// ---- binary writer --------------------------------------------------------

struct FlatObject {
    const PlistValue* value;
    std::vector<std::size_t> children;  // arrays: items; dicts: keys then values
    std::vector<std::string> keys;      // dict keys (encoded as string objects)
};

struct Flattener {
    std::vector<FlatObject> objects;
    std::vector<std::string> key_storage;

    std::size_t add(const PlistValue& v) {
        std::size_t index = objects.size();
        objects.push_back({&v, {}, {}});
        if (const auto* arr = std::get_if<PlistValue::Array>(&v.v)) {
            std::vector<std::size_t> kids;
            for (const auto& item : *arr) kids.push_back(add(item));
            objects[index].children = std::move(kids);
        } else if (const auto* dict = std::get_if<PlistValue::Dict>(&v.v)) {
            std::vector<std::size_t> kids;
            std::vector<std::string> keys;
            for (const auto& entry : *dict) {
                keys.push_back(entry.key);
                kids.push_back(SIZE_MAX);  // placeholder: key objects appended below
            }
            // key objects first, then value objects, refs stored in order
            std::vector<std::size_t> key_ids, val_ids;
            for (const auto& entry : *dict) {
                std::size_t kid = objects.size();
                objects.push_back({nullptr, {}, {}});
                objects[kid].keys.push_back(entry.key);  // marks a key-string object
                key_ids.push_back(kid);
                val_ids.push_back(add(entry.value));
            }
            std::vector<std::size_t> all = key_ids;
            all.insert(all.end(), val_ids.begin(), val_ids.end());
            objects[index].children = std::move(all);
        }
        return index;
    }
};

void be_bytes(std::vector<std::uint8_t>& out, std::uint64_t v, unsigned n) {
    for (unsigned i = 0; i < n; ++i)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * (n - 1 - i))) & 0xFF));
}

unsigned int_width(std::uint64_t v) {
    if (v <= 0xFF) return 1;
    if (v <= 0xFFFF) return 2;
    if (v <= 0xFFFFFFFFULL) return 4;
    return 8;
}

void write_marker_count(std::vector<std::uint8_t>& out, unsigned type, std::uint64_t count) {
    if (count < 15) {
        out.push_back(static_cast<std::uint8_t>((type << 4) | count));
        return;
    }
    out.push_back(static_cast<std::uint8_t>((type << 4) | 0xF));
    unsigned w = int_width(count);
    if (w == 1) out.push_back(0x10);
    else if (w == 2) out.push_back(0x11);
    else if (w == 4) out.push_back(0x12);
    else out.push_back(0x13);
    be_bytes(out, count, w);
}

bool is_ascii(const std::string& s) {
    for (unsigned char c : s)
        if (c >= 0x80) return false;
    return true;
}

// Minimal UTF-8 to UTF-16BE for the test writer.
std::vector<std::uint16_t> to_utf16_units(const std::string& s) {
    std::vector<std::uint16_t> units;
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        std::uint32_t cp = 0xFFFD;
        std::size_t len = 1;
        if (c < 0x80) {
            cp = c;
        } else if ((c >> 5) == 0x6 && i + 1 < s.size()) {
            cp = ((c & 0x1F) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
            len = 2;
        } else if ((c >> 4) == 0xE && i + 2 < s.size()) {
            cp = ((c & 0x0F) << 12) | ((static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6) |
                 (static_cast<unsigned char>(s[i + 2]) & 0x3F);
            len = 3;
        } else if ((c >> 3) == 0x1E && i + 3 < s.size()) {
            cp = ((c & 0x07) << 18) | ((static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12) |
                 ((static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6) |
                 (static_cast<unsigned char>(s[i + 3]) & 0x3F);
            len = 4;
        }
        if (cp >= 0x10000) {
            cp -= 0x10000;
            units.push_back(static_cast<std::uint16_t>(0xD800 + (cp >> 10)));
            units.push_back(static_cast<std::uint16_t>(0xDC00 + (cp & 0x3FF)));
        } else {
            units.push_back(static_cast<std::uint16_t>(cp));
        }
        i += len;
    }
    return units;
}

void encode_string(std::vector<std::uint8_t>& out, const std::string& s) {
    if (is_ascii(s)) {
        write_marker_count(out, 0x5, s.size());
        out.insert(out.end(), s.begin(), s.end());
    } else {
        auto units = to_utf16_units(s);
        write_marker_count(out, 0x6, units.size());
        for (auto u : units) {
            out.push_back(static_cast<std::uint8_t>(u >> 8));
            out.push_back(static_cast<std::uint8_t>(u & 0xFF));
        }
    }
}

void encode_scalar(std::vector<std::uint8_t>& out, const PlistValue& v) {
    if (std::holds_alternative<std::nullptr_t>(v.v)) {
        out.push_back(0x00);
    } else if (const auto* b = std::get_if<bool>(&v.v)) {
        out.push_back(*b ? 0x09 : 0x08);
    } else if (const auto* i = std::get_if<std::int64_t>(&v.v)) {
        if (*i < 0) {
            out.push_back(0x13);
            be_bytes(out, static_cast<std::uint64_t>(*i), 8);
        } else {
            unsigned w = int_width(static_cast<std::uint64_t>(*i));
            out.push_back(w == 1 ? 0x10 : w == 2 ? 0x11 : w == 4 ? 0x12 : 0x13);
            be_bytes(out, static_cast<std::uint64_t>(*i), w);
        }
    } else if (const auto* d = std::get_if<double>(&v.v)) {
        out.push_back(0x23);
        std::uint64_t bits;
        std::memcpy(&bits, d, 8);
        be_bytes(out, bits, 8);
    } else if (const auto* s = std::get_if<std::string>(&v.v)) {
        encode_string(out, *s);
    } else if (const auto* data = std::get_if<PlistValue::Data>(&v.v)) {
        write_marker_count(out, 0x4, data->size());
        out.insert(out.end(), data->begin(), data->end());
    } else if (const auto* date = std::get_if<PlistDate>(&v.v)) {
        out.push_back(0x33);
        std::uint64_t bits;
        std::memcpy(&bits, &date->apple_seconds, 8);
        be_bytes(out, bits, 8);
    } else {
        throw std::logic_error("encode_scalar on a container");
    }
}

}  // namespace

std::vector<std::uint8_t> write_binary_plist(const PlistValue& root) {
    Flattener flat;
    flat.add(root);
    const std::size_t count = flat.objects.size();
    unsigned ref_size = count <= 0xFF ? 1 : count <= 0xFFFF ? 2 : 4;

    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'b', 'p', 'l', 'i', 's', 't', '0', '0'});
    std::vector<std::uint64_t> offsets(count);

    for (std::size_t i = 0; i < count; ++i) {
        offsets[i] = out.size();
        const auto& obj = flat.objects[i];
        if (!obj.value) {
            encode_string(out, obj.keys.front());  // dict key object
            continue;
        }
        const auto& v = *obj.value;
        if (std::holds_alternative<PlistValue::Array>(v.v)) {
            write_marker_count(out, 0xA, obj.children.size());
            for (auto child : obj.children) be_bytes(out, child, ref_size);
        } else if (std::holds_alternative<PlistValue::Dict>(v.v)) {
            write_marker_count(out, 0xD, obj.children.size() / 2);
            for (auto child : obj.children) be_bytes(out, child, ref_size);
        } else {
            encode_scalar(out, v);
        }
    }

    std::uint64_t table_offset = out.size();
    unsigned offset_size = int_width(table_offset);
    for (auto off : offsets) be_bytes(out, off, offset_size);

    // trailer
    for (int i = 0; i < 6; ++i) out.push_back(0);
    out.push_back(static_cast<std::uint8_t>(offset_size));
    out.push_back(static_cast<std::uint8_t>(ref_size));
    be_bytes(out, count, 8);
    be_bytes(out, 0, 8);  // top object
    be_bytes(out, table_offset, 8);
    return out;
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string base64_encode(const std::vector<std::uint8_t>& data) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    std::size_t i = 0;
    while (i + 2 < data.size()) {
        std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out.push_back(alphabet[(v >> 6) & 63]);
        out.push_back(alphabet[v & 63]);
        i += 3;
    }
    if (i + 1 == data.size()) {
        std::uint32_t v = data[i] << 16;
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out += "==";
    } else if (i + 2 == data.size()) {
        std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out.push_back(alphabet[(v >> 6) & 63]);
        out += "=";
    }
    return out;
}

std::string iso_from_apple_seconds(double apple) {
    auto unix_seconds = static_cast<std::time_t>(std::llround(apple + kAppleEpoch));
    std::tm tm{};
    gmtime_r(&unix_seconds, &tm);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

void write_xml_value(std::string& out, const PlistValue& v, int indent) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (std::holds_alternative<std::nullptr_t>(v.v)) {
        out += pad + "<string></string>\n";  // XML plists have no null element
    } else if (const auto* b = std::get_if<bool>(&v.v)) {
        out += pad + (*b ? "<true/>\n" : "<false/>\n");
    } else if (const auto* i = std::get_if<std::int64_t>(&v.v)) {
        out += pad + "<integer>" + std::to_string(*i) + "</integer>\n";
    } else if (const auto* d = std::get_if<double>(&v.v)) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", *d);
        out += pad + "<real>" + buf + "</real>\n";
    } else if (const auto* s = std::get_if<std::string>(&v.v)) {
        out += pad + "<string>" + xml_escape(*s) + "</string>\n";
    } else if (const auto* data = std::get_if<PlistValue::Data>(&v.v)) {
        out += pad + "<data>" + base64_encode(*data) + "</data>\n";
    } else if (const auto* date = std::get_if<PlistDate>(&v.v)) {
        out += pad + "<date>" + iso_from_apple_seconds(date->apple_seconds) + "</date>\n";
    } else if (const auto* arr = std::get_if<PlistValue::Array>(&v.v)) {
        out += pad + "<array>\n";
        for (const auto& item : *arr) write_xml_value(out, item, indent + 1);
        out += pad + "</array>\n";
    } else if (const auto* dict = std::get_if<PlistValue::Dict>(&v.v)) {
        out += pad + "<dict>\n";
        for (const auto& entry : *dict) {
            out += pad + "  <key>" + xml_escape(entry.key) + "</key>\n";
            write_xml_value(out, entry.value, indent + 1);
        }
        out += pad + "</dict>\n";
    }
}

}  // namespace

std::string write_xml_plist(const PlistValue& root) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<plist version=\"1.0\">\n";
    write_xml_value(out, root, 1);
    out += "</plist>\n";
    return out;
}

cloudme::PlistValue random_plist_tree(std::mt19937_64& rng, int max_depth) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    PlistValue v;
    int choice = max_depth > 0 ? pick(9) : pick(7);
    switch (choice) {
        case 0: {  // ascii string
            std::string s;
            int len = pick(12);
            for (int i = 0; i < len; ++i) s.push_back(static_cast<char>('a' + pick(26)));
            v.v = s;
            break;
        }
        case 1: {  // string with non-ascii
            std::string s = "caf\xC3\xA9-";
            int len = pick(6);
            for (int i = 0; i < len; ++i) s.push_back(static_cast<char>('0' + pick(10)));
            v.v = s;
            break;
        }
        case 2: {  // integer across widths, negatives included
            std::uint64_t raw = rng();
            int width = pick(4);
            std::int64_t val = static_cast<std::int64_t>(
                width == 0 ? raw & 0x7F : width == 1 ? raw & 0x7FFF
                : width == 2 ? raw & 0x7FFFFFFF : raw & 0x7FFFFFFFFFFFFFFF);
            if (pick(4) == 0) val = -val;
            v.v = val;
            break;
        }
        case 3: {  // real
            double d = static_cast<double>(static_cast<std::int64_t>(rng() % 2000000) - 1000000) /
                       64.0;
            v.v = d;
            break;
        }
        case 4:
            v.v = (rng() & 1) == 0;
            break;
        case 5: {  // data
            PlistValue::Data data;
            int len = pick(16);
            for (int i = 0; i < len; ++i) data.push_back(static_cast<std::uint8_t>(rng()));
            v.v = data;
            break;
        }
        case 6: {  // date, whole seconds so the ISO form is exact
            double apple = static_cast<double>(rng() % 700000000);
            v.v = PlistDate{apple};
            break;
        }
        case 7: {  // array
            PlistValue::Array items;
            int len = pick(4);
            for (int i = 0; i < len; ++i) items.push_back(random_plist_tree(rng, max_depth - 1));
            v.v = std::move(items);
            break;
        }
        default: {  // dict
            PlistValue::Dict dict;
            int len = pick(4);
            for (int i = 0; i < len; ++i) {
                std::string key = "k" + std::to_string(i) + "_" + std::to_string(pick(1000));
                dict.push_back({key, random_plist_tree(rng, max_depth - 1)});
            }
            v.v = std::move(dict);
            break;
        }
    }
    return v;
}

}  // namespace fixtures
