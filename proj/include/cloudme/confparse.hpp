// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cloudme/model.hpp"
#include "cloudme/plist.hpp"

namespace cloudme {

struct NotRegExport : Error {
    explicit NotRegExport(const std::string& why)
        : Error("not a registry export: " + why) {}
};

struct NoCredentialKeys : Error {
    NoCredentialKeys() : Error("no username/password keys present") {}
};

/// Identity or credential material from a configuration artefact. client_id
/// is opaque (32-char alphanumeric or brace-GUID) and preserved verbatim.
struct IdentityFact {
    std::optional<std::string> username;
    std::optional<std::string> client_id;
    std::optional<std::string> device_name;
    std::optional<std::string> password;  // plaintext, masked on output
    std::optional<Timestamp> last_upload;
    std::optional<std::string> sid;  // registry exports only
    EvidenceRef source;

    friend bool operator==(const IdentityFact&, const IdentityFact&) = default;
};

/// Windows "Registry Editor" text export (UTF-16LE or 8-bit). Extracts the
/// startup 'me' username and any <name>_xClientId value under CloudMe keys.
/// Throws NotRegExport when the header is missing.
std::vector<IdentityFact> parse_reg_export(std::string_view bytes, const EvidenceRef& source);

/// Ubuntu Sync.conf INI: [startup] me=..., plus _xClientId either inside a
/// [<username>] section or as a <username>_xClientId key.
std::vector<IdentityFact> parse_sync_conf(std::string_view bytes, const EvidenceRef& source);

/// Android shared_prefs user_data.xml: <string name="...">value</string>
/// entries (also accepts value="..." attribute form).
std::vector<std::pair<std::string, std::string>> parse_user_data_xml(std::string_view bytes);

enum class CredentialOrigin { IosPlist, AndroidUserDataXml };

/// Pull username/password (and the iOS <username>_LastUploadTime) out of a
/// flattened key/value tree. Throws NoCredentialKeys when neither key exists.
IdentityFact extract_mobile_credentials(
    const std::vector<std::pair<std::string, std::string>>& entries, CredentialOrigin origin,
    const EvidenceRef& source);

/// Desktop com.CloudMe.Sync.plist: 'startup.me' and '<Username>.xClientId'
/// (dotted or nested), mirroring the registry layout.
std::optional<IdentityFact> extract_desktop_identity(const PlistValue& tree,
                                                     const EvidenceRef& source);

/// One IdentityFound or CredentialFound event per fact (CredentialFound
/// when a password is present).
std::vector<ForensicEvent> events_from_identity_facts(const std::vector<IdentityFact>& facts);

}  // namespace cloudme
