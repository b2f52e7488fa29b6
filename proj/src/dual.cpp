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

#include "ndham/dual.hpp"

#include <algorithm>

namespace ndham {

namespace {

using C = std::complex<double>;

// result = scale * a.partials
DualValue chain(C value, const DualValue& a, C scale) {
  DualValue r(value, a.partials.size());
  for (std::size_t i = 0; i < a.partials.size(); ++i) r.partials[i] = scale * a.partials[i];
  return r;
}

}  // namespace

bool DualValue::has_partials() const {
  return std::any_of(partials.begin(), partials.end(), [](C c) { return c != C{}; });
}

DualValue operator+(const DualValue& a, const DualValue& b) {
  DualValue r(a.value + b.value, a.partials.size());
  for (std::size_t i = 0; i < r.partials.size(); ++i) r.partials[i] = a.partials[i] + b.partials[i];
  return r;
}

DualValue operator-(const DualValue& a, const DualValue& b) {
  DualValue r(a.value - b.value, a.partials.size());
  for (std::size_t i = 0; i < r.partials.size(); ++i) r.partials[i] = a.partials[i] - b.partials[i];
  return r;
}

DualValue operator*(const DualValue& a, const DualValue& b) {
  DualValue r(a.value * b.value, a.partials.size());
  for (std::size_t i = 0; i < r.partials.size(); ++i)
    r.partials[i] = a.partials[i] * b.value + a.value * b.partials[i];
  return r;
}

DualValue operator/(const DualValue& a, const DualValue& b) {
  const C q = a.value / b.value;
  DualValue r(q, a.partials.size());
  for (std::size_t i = 0; i < r.partials.size(); ++i)
    r.partials[i] = (a.partials[i] - q * b.partials[i]) / b.value;
  return r;
}

DualValue operator-(const DualValue& a) { return chain(-a.value, a, -1.0); }

DualValue sin(const DualValue& a) { return chain(std::sin(a.value), a, std::cos(a.value)); }

DualValue cos(const DualValue& a) { return chain(std::cos(a.value), a, -std::sin(a.value)); }

DualValue exp(const DualValue& a) {
  const C e = std::exp(a.value);
  return chain(e, a, e);
}

DualValue log(const DualValue& a) { return chain(std::log(a.value), a, 1.0 / a.value); }

DualValue sqrt(const DualValue& a) {
  const C s = std::sqrt(a.value);
  return chain(s, a, 0.5 / s);
}

DualValue ipow(const DualValue& a, long n) {
  if (n < 0) return DualValue(1.0, a.partials.size()) / ipow(a, -n);
  DualValue result(1.0, a.partials.size());
  DualValue base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

DualValue pow(const DualValue& a, const DualValue& b) {
  if (!b.has_partials()) {
    const C v = std::exp(b.value * std::log(a.value));
    return chain(v, a, b.value * v / a.value);
  }
  return exp(b * log(a));
}

}  // namespace ndham
