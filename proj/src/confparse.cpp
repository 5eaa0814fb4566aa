// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/confparse.hpp"

#include "cloudme/util.hpp"
#include "cloudme/xmlmini.hpp"

namespace cloudme {

namespace {

constexpr std::string_view kClientIdSuffix = "_xClientId";

std::string transcode_if_utf16(std::string_view bytes) {
    if (bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0xFF &&
        static_cast<unsigned char>(bytes[1]) == 0xFE)
        return utf16le_to_utf8(reinterpret_cast<const std::uint8_t*>(bytes.data()) + 2,
                               bytes.size() - 2);
    if (bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0xFE &&
        static_cast<unsigned char>(bytes[1]) == 0xFF)
        return utf16be_to_utf8(reinterpret_cast<const std::uint8_t*>(bytes.data()) + 2,
                               bytes.size() - 2);
    return std::string(bytes);
}

std::string_view trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

// "name"="value" with \\ and \" escapes; also @="value".
bool parse_reg_value_line(std::string_view line, std::string& name, std::string& value) {
    line = trim(line);
    if (line.empty()) return false;
    std::size_t pos = 0;
    if (line[0] == '@') {
        name = "@";
        pos = 1;
    } else if (line[0] == '"') {
        std::string n;
        pos = 1;
        while (pos < line.size() && line[pos] != '"') {
            if (line[pos] == '\\' && pos + 1 < line.size()) ++pos;
            n.push_back(line[pos++]);
        }
        if (pos >= line.size()) return false;
        ++pos;
        name = std::move(n);
    } else {
        return false;
    }
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size() || line[pos] != '=') return false;
    ++pos;
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size() || line[pos] != '"') return false;  // dword:/hex: not needed
    std::string v;
    ++pos;
    while (pos < line.size() && line[pos] != '"') {
        if (line[pos] == '\\' && pos + 1 < line.size()) ++pos;
        v.push_back(line[pos++]);
    }
    if (pos >= line.size()) return false;
    value = std::move(v);
    return true;
}

std::optional<std::string> sid_of_section(const std::string& section) {
    auto lower = to_lower_ascii(section);
    if (lower.rfind("hkey_users\\", 0) != 0) return std::nullopt;
    auto rest = section.substr(11);
    auto backslash = rest.find('\\');
    return backslash == std::string::npos ? rest : rest.substr(0, backslash);
}

bool section_is_cloudme_sync(const std::string& section) {
    return to_lower_ascii(section).find("\\software\\cloudme\\sync") != std::string::npos;
}

bool section_is_startup(const std::string& section) {
    auto lower = to_lower_ascii(section);
    return lower.size() >= 8 && lower.compare(lower.size() - 8, 8, "\\startup") == 0;
}

}  // namespace

std::vector<IdentityFact> parse_reg_export(std::string_view bytes, const EvidenceRef& source) {
    auto text = transcode_if_utf16(bytes);
    // strip UTF-8 BOM if present
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);

    auto lines = split(text, '\n');
    std::size_t first = 0;
    while (first < lines.size() && trim(lines[first]).empty()) ++first;
    if (first >= lines.size()) throw NotRegExport("empty file");
    auto header = trim(lines[first]);
    if (header.find("Windows Registry Editor") == std::string::npos && header != "REGEDIT4")
        throw NotRegExport("missing editor header line");

    std::vector<IdentityFact> facts;
    std::string section;
    for (std::size_t i = first + 1; i < lines.size(); ++i) {
        auto line = trim(lines[i]);
        if (line.empty() || line[0] == ';') continue;
        if (line.front() == '[') {
            auto close = line.rfind(']');
            if (close != std::string::npos && close > 0) section = line.substr(1, close - 1);
            continue;
        }
        if (!section_is_cloudme_sync(section)) continue;
        std::string name, value;
        if (!parse_reg_value_line(line, name, value)) continue;

        if (name == "me" && section_is_startup(section)) {
            IdentityFact f;
            f.username = value;
            f.sid = sid_of_section(section);
            f.source = source;
            facts.push_back(std::move(f));
        } else if (name.size() > kClientIdSuffix.size() &&
                   name.compare(name.size() - kClientIdSuffix.size(), kClientIdSuffix.size(),
                                kClientIdSuffix) == 0) {
            IdentityFact f;
            f.username = name.substr(0, name.size() - kClientIdSuffix.size());
            f.client_id = value;
            f.sid = sid_of_section(section);
            f.source = source;
            facts.push_back(std::move(f));
        }
    }
    return facts;
}

std::vector<IdentityFact> parse_sync_conf(std::string_view bytes, const EvidenceRef& source) {
    auto text = transcode_if_utf16(bytes);
    std::vector<IdentityFact> facts;
    std::string section;
    for (const auto& raw : split(text, '\n')) {
        auto line = trim(raw);
        if (line.empty() || line[0] == ';' || line[0] == '#') continue;
        if (line.front() == '[') {
            auto close = line.rfind(']');
            if (close != std::string::npos && close > 0) section = line.substr(1, close - 1);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));

        if (key == "me" && iequals_ascii(section, "startup")) {
            IdentityFact f;
            f.username = value;
            f.source = source;
            facts.push_back(std::move(f));
        } else if (key == "_xClientId" && !section.empty() &&
                   !iequals_ascii(section, "startup")) {
            IdentityFact f;
            f.username = section;
            f.client_id = value;
            f.source = source;
            facts.push_back(std::move(f));
        } else if (key.size() > kClientIdSuffix.size() &&
                   key.compare(key.size() - kClientIdSuffix.size(), kClientIdSuffix.size(),
                               kClientIdSuffix) == 0) {
            IdentityFact f;
            f.username = key.substr(0, key.size() - kClientIdSuffix.size());
            f.client_id = value;
            f.source = source;
            facts.push_back(std::move(f));
        }
    }
    return facts;
}

std::vector<std::pair<std::string, std::string>> parse_user_data_xml(std::string_view bytes) {
    auto root = xml::parse(bytes);
    std::vector<std::pair<std::string, std::string>> out;
    std::vector<const xml::Node*> nodes;
    for (const auto& child : root.children) nodes.push_back(&child);
    for (const auto* n : nodes) {
        const auto* name = n->attribute_local("name");
        if (!name) continue;
        if (const auto* value = n->attribute_local("value")) {
            out.emplace_back(*name, *value);  // boolean/int entries
        } else {
            out.emplace_back(*name, n->text);
        }
    }
    return out;
}

IdentityFact extract_mobile_credentials(
    const std::vector<std::pair<std::string, std::string>>& entries, CredentialOrigin origin,
    const EvidenceRef& source) {
    IdentityFact fact;
    fact.source = source;
    for (const auto& [key, value] : entries) {
        if (iequals_ascii(key, "username")) fact.username = value;
        else if (iequals_ascii(key, "password")) fact.password = value;
    }
    if (!fact.username && !fact.password) throw NoCredentialKeys();

    if (origin == CredentialOrigin::IosPlist && fact.username) {
        auto upload_key = *fact.username + "_LastUploadTime";
        for (const auto& [key, value] : entries) {
            if (key == upload_key) {
                fact.last_upload = try_normalize_any(value);
                break;
            }
        }
    }
    return fact;
}

std::optional<IdentityFact> extract_desktop_identity(const PlistValue& tree,
                                                     const EvidenceRef& source) {
    auto entries = flatten_plist_strings(tree);
    IdentityFact fact;
    fact.source = source;
    for (const auto& [key, value] : entries)
        if (key == "startup.me") fact.username = value;
    for (const auto& [key, value] : entries) {
        // "<Username>.xClientId" when a username is known, any ".xClientId"
        // or "_xClientId" suffix otherwise.
        if (fact.username && key == *fact.username + ".xClientId") {
            fact.client_id = value;
            break;
        }
        if (!fact.client_id && (key.size() > 10)) {
            auto tail = key.substr(key.size() - 10);
            if (tail == ".xClientId" || tail == "_xClientId") fact.client_id = value;
        }
    }
    if (!fact.username && !fact.client_id) return std::nullopt;
    return fact;
}

std::vector<ForensicEvent> events_from_identity_facts(const std::vector<IdentityFact>& facts) {
    std::vector<ForensicEvent> events;
    for (const auto& f : facts) {
        ForensicEvent e;
        e.kind = f.password ? EventKind::CredentialFound : EventKind::IdentityFound;
        e.time = f.last_upload;  // the only dated identity material
        e.actor = f.username;
        if (f.client_id) set_attribute(e, "client_id", *f.client_id);
        if (f.device_name) set_attribute(e, "device_name", *f.device_name);
        if (f.password) set_attribute(e, "password", *f.password);
        if (f.last_upload) set_attribute(e, "last_upload", f.last_upload->iso8601());
        if (f.sid) set_attribute(e, "sid", *f.sid);
        e.source = f.source;
        events.push_back(std::move(e));
    }
    return events;
}

}  // namespace cloudme
