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

#ifndef NDHAM_REPORT_HPP
#define NDHAM_REPORT_HPP

#include <complex>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

namespace ndham {

using Json = nlohmann::ordered_json;

/// %.17g, locale independent.
std::string format_double(double v);

/// Strict decimal parse of the whole string; throws InvalidArgument.
double parse_double(std::string_view text);

/// Serializes with insertion-ordered keys and every floating-point number
/// printed with 17 significant digits. Non-finite numbers become null.
void write_json(std::ostream& out, const Json& value, int indent = 2);
std::string dump_json(const Json& value, int indent = 2);

}  // namespace ndham

#endif  // NDHAM_REPORT_HPP
