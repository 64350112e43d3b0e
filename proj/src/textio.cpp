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

#include "lsw/textio.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "lsw/error.hpp"

namespace lsw::textio {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void parse_error(int line_no, const std::string& what) {
  fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + what);
}

double parse_double(std::string_view token, int line_no) {
  const std::string s(token);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    parse_error(line_no, "expected a number, got '" + s + "'");
  }
  return v;
}

long long parse_int(std::string_view token, int line_no) {
  const std::string s(token);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    parse_error(line_no, "expected an integer, got '" + s + "'");
  }
  return v;
}

std::map<std::string, std::string> parse_fields(
    const std::vector<std::string>& tokens, std::size_t first, int line_no) {
  std::map<std::string, std::string> out;
  for (std::size_t i = first; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string::npos || eq == 0) {
      parse_error(line_no, "expected key=value, got '" + tokens[i] + "'");
    }
    out[tokens[i].substr(0, eq)] = tokens[i].substr(eq + 1);
  }
  return out;
}

const std::string& field(const std::map<std::string, std::string>& fields,
                         const std::string& key, int line_no) {
  const auto it = fields.find(key);
  if (it == fields.end()) parse_error(line_no, "missing field '" + key + "'");
  return it->second;
}

void expect_header(const std::vector<std::string>& tokens,
                   std::string_view magic, std::string_view version,
                   int line_no) {
  if (tokens.empty() || tokens[0] != magic) {
    parse_error(line_no, "expected '" + std::string(magic) + "' header");
  }
  if (tokens.size() < 2 || tokens[1] != version) {
    fail(ErrorCode::kVersionMismatch,
         "line " + std::to_string(line_no) + ": " + std::string(magic) +
             " version '" + (tokens.size() < 2 ? std::string() : tokens[1]) +
             "' is not supported (expected " + std::string(version) + ")");
  }
}

}  // namespace lsw::textio
