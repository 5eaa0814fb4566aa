// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/csv.hpp"

namespace cloudme {

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        const std::string& f = fields[i];
        bool needs_quote = f.find_first_of(",\"\r\n") != std::string::npos;
        if (!needs_quote) {
            out += f;
            continue;
        }
        out.push_back('"');
        for (char c : f) {
            if (c == '"') out.push_back('"');
            out.push_back(c);
        }
        out.push_back('"');
    }
    return out;
}

}  // namespace cloudme
