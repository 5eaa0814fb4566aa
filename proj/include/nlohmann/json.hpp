// SPDX-License-Identifier: Apache-2.0
// Forwarder to the vendored single-header nlohmann/json.
#pragma once
#include <json.hpp>
