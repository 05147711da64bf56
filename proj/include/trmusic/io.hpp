// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <string>

namespace trmusic {

/// Shortest round-trip decimal form of a double ("%.17g" trimmed); used for
/// every CSV/JSON number so repeated runs produce byte-identical files.
std::string format_double(double v);

std::uint64_t fnv1a64(const std::string& data);

/// 16-hex-digit form of fnv1a64, used as the config hash embedded in outputs.
std::string hash_hex(const std::string& data);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace trmusic
