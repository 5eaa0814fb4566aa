// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cloudme/model.hpp"

namespace cloudme::xml {

struct MalformedXml : Error {
    MalformedXml(std::size_t offset, const std::string& why)
        : Error("malformed xml at byte " + std::to_string(offset) + ": " + why),
          offset(offset) {}
    std::size_t offset;
};

/// Minimal DOM node. Attribute order is preserved exactly as written;
/// CloudMe documents mix namespaced and plain elements, so matching is
/// usually done on the local name.
struct Node {
    std::string name;  // qualified, e.g. "fs:folder"
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Node> children;
    std::string text;  // concatenated character data of this element

    std::string_view local_name() const;
    const std::string* attribute(std::string_view name) const;          // exact match
    const std::string* attribute_local(std::string_view local) const;   // local-name match
    const Node* first_child(std::string_view local) const;
    std::vector<const Node*> children_named(std::string_view local) const;
    /// Depth-first collection of all descendants (including self) whose
    /// local name matches.
    void collect(std::string_view local, std::vector<const Node*>& out) const;
};

/// Parse a standalone XML document. Handles the prolog, comments, CDATA,
/// DOCTYPE, character/entity references and UTF-16 input (by BOM sniff).
/// Throws MalformedXml.
Node parse(std::string_view bytes);

/// Root element local name without parsing the whole document, or nullopt
/// when the input does not look like XML. Used to dispatch cache bodies.
std::optional<std::string> sniff_root_name(std::string_view bytes);

}  // namespace cloudme::xml
