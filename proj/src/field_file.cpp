/*
 * Copyright 2026 The ndham Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include "ndham/field.hpp"
#include "ndham/report.hpp"

namespace ndham {

namespace {

std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

// "Xq12" -> 12; nullopt if the suffix is not a positive decimal index.
std::optional<std::size_t> component_index(std::string_view key, std::string_view prefix) {
  if (key.size() <= prefix.size() || key.substr(0, prefix.size()) != prefix) return std::nullopt;
  const std::string_view digits = key.substr(prefix.size());
  if (digits.front() == '0' || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return std::nullopt;
  return static_cast<std::size_t>(std::stoul(std::string(digits)));
}

}  // namespace

PhaseVectorField parse_field_file(std::istream& in) {
  std::optional<std::size_t> dim;
  Constants constants;
  std::map<std::size_t, std::string> xq;
  std::map<std::size_t, std::string> xp;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) -> InvalidArgument {
    return InvalidArgument("field file line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw fail("expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (value.empty()) throw fail("empty value for '" + key + "'");

    if (key == "d") {
      if (dim) throw fail("duplicate 'd'");
      const double v = parse_double(value);
      if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) throw fail("d must be a positive integer");
      dim = static_cast<std::size_t>(v);
    } else if (key.rfind("const", 0) == 0 && key.size() > 5 && std::isspace(static_cast<unsigned char>(key[5]))) {
      const std::string name = trim(std::string_view(key).substr(5));
      if (!is_identifier(name)) throw fail("invalid constant name '" + name + "'");
      if (constants.contains(name)) throw fail("duplicate constant '" + name + "'");
      try {
        constants[name] = parse_double(value);
      } catch (const InvalidArgument&) {
        throw fail("constant '" + name + "' needs a real number");
      }
    } else if (auto i = component_index(key, "Xq")) {
      if (!xq.emplace(*i, value).second) throw fail("duplicate '" + key + "'");
    } else if (auto j = component_index(key, "Xp")) {
      if (!xp.emplace(*j, value).second) throw fail("duplicate '" + key + "'");
    } else {
      throw fail("unknown key '" + key + "'");
    }
  }
  if (!dim) throw InvalidArgument("field file: missing 'd'");
  std::vector<std::string> eq;
  std::vector<std::string> ep;
  for (std::size_t i = 1; i <= *dim; ++i) {
    if (!xq.contains(i)) throw InvalidArgument("field file: missing Xq" + std::to_string(i));
    if (!xp.contains(i)) throw InvalidArgument("field file: missing Xp" + std::to_string(i));
    eq.push_back(xq[i]);
    ep.push_back(xp[i]);
  }
  if (xq.size() != *dim || xp.size() != *dim) throw InvalidArgument("field file: component index exceeds d");
  return PhaseVectorField::parse(eq, ep, std::move(constants));
}

PhaseVectorField load_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open field file '" + path + "'");
  return parse_field_file(in);
}

}  // namespace ndham
