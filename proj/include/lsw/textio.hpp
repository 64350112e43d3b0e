// Copyright 2026 The lsw Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lsw::textio {

/// "%.17g": enough digits for an exact double round trip.
std::string fmt17(double v);

std::vector<std::string> split_ws(std::string_view line);
std::vector<std::string> split(std::string_view text, char sep);

/// Parses a whole token as a double; throws kParse mentioning `line_no`.
double parse_double(std::string_view token, int line_no);
long long parse_int(std::string_view token, int line_no);

/// Collects `key=value` tokens; non key=value tokens are reported via `rest`.
std::map<std::string, std::string> parse_fields(
    const std::vector<std::string>& tokens, std::size_t first, int line_no);

const std::string& field(const std::map<std::string, std::string>& fields,
                         const std::string& key, int line_no);

/// Checks a `MAGIC vN ...` header line; kVersionMismatch on a different
/// version, kParse on a different magic.
void expect_header(const std::vector<std::string>& tokens,
                   std::string_view magic, std::string_view version,
                   int line_no);

[[noreturn]] void parse_error(int line_no, const std::string& what);

}  // namespace lsw::textio
