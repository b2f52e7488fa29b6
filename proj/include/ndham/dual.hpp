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

#ifndef NDHAM_DUAL_HPP
#define NDHAM_DUAL_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace ndham {

/// First-order truncated Taylor number: a value together with its partial
/// derivatives with respect to a fixed list of seeded variables.
struct DualValue {
  std::complex<double> value;
  std::vector<std::complex<double>> partials;

  DualValue() = default;
  DualValue(std::complex<double> v, std::size_t n) : value(v), partials(n) {}

  static DualValue seed(std::complex<double> v, std::size_t n, std::size_t index) {
    DualValue d(v, n);
    d.partials[index] = 1.0;
    return d;
  }

  bool has_partials() const;
};

DualValue operator+(const DualValue& a, const DualValue& b);
DualValue operator-(const DualValue& a, const DualValue& b);
DualValue operator*(const DualValue& a, const DualValue& b);
DualValue operator/(const DualValue& a, const DualValue& b);
DualValue operator-(const DualValue& a);

DualValue sin(const DualValue& a);
DualValue cos(const DualValue& a);
DualValue exp(const DualValue& a);
DualValue log(const DualValue& a);
DualValue sqrt(const DualValue& a);

/// a^n for integer n by repeated squaring (exact product rule).
DualValue ipow(const DualValue& a, long n);
/// a^b = exp(b log a); the log term is skipped when b carries no partials.
DualValue pow(const DualValue& a, const DualValue& b);

}  // namespace ndham

#endif  // NDHAM_DUAL_HPP
