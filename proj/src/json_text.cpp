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

#include "embias/json_text.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "embias/error.hpp"

namespace embias {
namespace {

void Indent(std::string& out, int depth) { out.append(2 * depth, ' '); }

void Dump(const nlohmann::ordered_json& node, std::string& out, int depth) {
  switch (node.type()) {
    case nlohmann::ordered_json::value_t::object: {
      if (node.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = node.begin(); it != node.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        Indent(out, depth + 1);
        out += nlohmann::ordered_json(it.key()).dump();
        out += ": ";
        Dump(it.value(), out, depth + 1);
      }
      out += '\n';
      Indent(out, depth);
      out += '}';
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      if (node.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : node) {
        if (!first) out += ",\n";
        first = false;
        Indent(out, depth + 1);
        Dump(item, out, depth + 1);
      }
      out += '\n';
      Indent(out, depth);
      out += ']';
      return;
    }
    case nlohmann::ordered_json::value_t::number_float: {
      double value = node.get<double>();
      if (!std::isfinite(value)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", value);
      out += buf;
      return;
    }
    default:
      out += node.dump();
  }
}

}  // namespace

std::string DumpJson(const nlohmann::ordered_json& doc) {
  std::string out;
  Dump(doc, out, 0);
  out += '\n';
  return out;
}

void WriteJsonFile(const nlohmann::ordered_json& doc,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) ThrowData("cannot write " + path.string());
  out << DumpJson(doc);
  if (!out.flush()) ThrowData("write failure on " + path.string());
}

nlohmann::ordered_json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowData("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return nlohmann::ordered_json::parse(buffer.str());
  } catch (const nlohmann::ordered_json::exception& e) {
    ThrowData(path.string() + ": invalid JSON: " + e.what());
  }
}

}  // namespace embias
