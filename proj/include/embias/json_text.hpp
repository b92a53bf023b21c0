// Copyright 2026 The embias Authors.
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

#ifndef EMBIAS_JSON_TEXT_HPP_
#define EMBIAS_JSON_TEXT_HPP_

#include <filesystem>
#include <string>

#include "json.hpp"

namespace embias {

// Pretty-printed JSON where every floating-point number carries 17
// significant digits, so persisted results read back bit-exact.
std::string DumpJson(const nlohmann::ordered_json& doc);

void WriteJsonFile(const nlohmann::ordered_json& doc,
                   const std::filesystem::path& path);
nlohmann::ordered_json ReadJsonFile(const std::filesystem::path& path);

}  // namespace embias

#endif  // EMBIAS_JSON_TEXT_HPP_
