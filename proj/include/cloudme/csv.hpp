// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#pragma once

#include <string>
#include <vector>

namespace cloudme {

/// RFC 4180 field quoting: fields containing comma, quote, CR or LF are
/// quoted and embedded quotes doubled. No trailing newline.
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace cloudme
