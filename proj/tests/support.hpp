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

// Helpers shared by the unit tests: seeded draws and a small JSON Schema
// checker (type, required, properties, additionalProperties, items, enum,
// minimum) good enough for the report schemas in schemas/.

#ifndef NDHAM_TESTS_SUPPORT_HPP
#define NDHAM_TESTS_SUPPORT_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <span>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

namespace ndham::testing {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Polynomial in z = (q1..qd, p1..pd) with exact derivatives, used to build
/// Hamiltonian fields X = (dH/dp, -dH/dq) whose expressions are known in closed form.
struct Polynomial {
  struct Term {
    double c;
    std::vector<int> e;  // one exponent per coordinate of z
  };

  std::size_t d = 1;
  std::vector<Term> terms;

  static std::string coordinate(std::size_t d, std::size_t j) {
    return (j < d ? "q" : "p") + std::to_string(j % d + 1);
  }

  std::string str() const {
    if (terms.empty()) return "0";
    std::string out;
    for (const auto& t : terms) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", t.c);
      if (!out.empty()) out += " + ";
      out += "(" + std::string(buf) + ")";
      for (std::size_t j = 0; j < t.e.size(); ++j) {
        if (t.e[j] == 0) continue;
        out += "*" + coordinate(d, j);
        if (t.e[j] > 1) out += "^" + std::to_string(t.e[j]);
      }
    }
    return out;
  }

  Polynomial derivative(std::size_t j) const {
    Polynomial out{d, {}};
    for (const auto& t : terms) {
      if (t.e[j] == 0) continue;
      Term dt = t;
      dt.c *= t.e[j];
      --dt.e[j];
      out.terms.push_back(dt);
    }
    return out;
  }

  std::complex<double> operator()(std::span<const std::complex<double>> z) const {
    std::complex<double> s{};
    for (const auto& t : terms) {
      std::complex<double> m = t.c;
      for (std::size_t j = 0; j < t.e.size(); ++j)
        for (int k = 0; k < t.e[j]; ++k) m *= z[j];
      s += m;
    }
    return s;
  }

  /// Xq_i = dH/dp_i, Xp_i = -dH/dq_i as expression strings.
  std::pair<std::vector<std::string>, std::vector<std::string>> hamiltonian_field() const {
    std::vector<std::string> xq;
    std::vector<std::string> xp;
    for (std::size_t i = 0; i < d; ++i) {
      xq.push_back(derivative(d + i).str());
      xp.push_back("-(" + derivative(i).str() + ")");
    }
    return {xq, xp};
  }
};

/// Random polynomial with `count` terms of total degree 1..max_degree, so H(0) = 0.
inline Polynomial random_polynomial(Draw& draw, std::size_t d, std::size_t count, int max_degree = 4) {
  Polynomial poly{d, {}};
  for (std::size_t k = 0; k < count; ++k) {
    Polynomial::Term t{draw.uniform(-1, 1), std::vector<int>(2 * d, 0)};
    const int degree = draw.integer(1, max_degree);
    for (int j = 0; j < degree; ++j) ++t.e[static_cast<std::size_t>(draw.integer(0, static_cast<int>(2 * d) - 1))];
    poly.terms.push_back(t);
  }
  return poly;
}

inline nlohmann::json load_schema(const std::string& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

inline bool json_type_is(const nlohmann::json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "integer") return v.is_number_integer() || (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
  if (type == "number") return v.is_number();
  if (type == "null") return v.is_null();
  return false;
}

/// Appends one message per violation; empty means valid.
inline void validate_schema(const nlohmann::json& schema, const nlohmann::json& v, const std::string& where,
                            std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = false;
    if (t.is_string()) ok = json_type_is(v, t.get<std::string>());
    else
      for (const auto& alt : t) ok = ok || json_type_is(v, alt.get<std::string>());
    if (!ok) {
      errors.push_back(where + ": expected type " + t.dump() + ", got " + v.dump());
      return;
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || e == v;
    if (!found) errors.push_back(where + ": value " + v.dump() + " not in enum");
  }
  if (schema.contains("minimum") && v.is_number() && v.get<double>() < schema["minimum"].get<double>())
    errors.push_back(where + ": below minimum");
  if (v.is_object()) {
    if (schema.contains("required"))
      for (const auto& r : schema["required"])
        if (!v.contains(r.get<std::string>())) errors.push_back(where + ": missing '" + r.get<std::string>() + "'");
    const bool closed = schema.contains("additionalProperties") && schema["additionalProperties"] == false;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (schema.contains("properties") && schema["properties"].contains(it.key()))
        validate_schema(schema["properties"][it.key()], it.value(), where + "." + it.key(), errors);
      else if (closed)
        errors.push_back(where + ": unexpected property '" + it.key() + "'");
    }
  }
  if (v.is_array() && schema.contains("items"))
    for (std::size_t i = 0; i < v.size(); ++i)
      validate_schema(schema["items"], v[i], where + "[" + std::to_string(i) + "]", errors);
}

inline std::vector<std::string> schema_errors(const nlohmann::json& schema, const nlohmann::json& v) {
  std::vector<std::string> errors;
  validate_schema(schema, v, "$", errors);
  return errors;
}

}  // namespace ndham::testing

#endif  // NDHAM_TESTS_SUPPORT_HPP
