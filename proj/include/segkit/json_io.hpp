/* Copyright 2026 The segkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SEGKIT_JSON_IO_HPP_
#define SEGKIT_JSON_IO_HPP_

#include <string>

#include "json.hpp"
#include "segkit/error.hpp"

namespace segkit {

// Parses a JSON file. Unreadable files and syntax errors raise InputError
// whose message starts with "path:line:column:".
nlohmann::json read_json_file(const std::string& path);

// Writes `text` to `path`, replacing any existing file.
void write_text_file(const std::string& path, const std::string& text);

// Two-space indented dump plus a trailing newline.
std::string dump_json(const nlohmann::json& j);

// Reads `path` and converts it with fn, re-raising conversion failures as
// InputError prefixed with the path.
template <typename Fn>
auto load_json_as(const std::string& path, Fn&& fn) {
  const nlohmann::json j = read_json_file(path);
  try {
    return fn(j);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace segkit

#endif  // SEGKIT_JSON_IO_HPP_
