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

#ifndef NDHAM_SIGNALS_HPP
#define NDHAM_SIGNALS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

#include "ndham/errors.hpp"

namespace ndham {

/// n equally spaced nodes on [a, b], endpoints included.
struct UniformGrid {
  double a = 0.0;
  double b = 1.0;
  std::size_t n = 2;

  UniformGrid() = default;
  UniformGrid(double a, double b, std::size_t n);

  double step() const noexcept { return (b - a) / static_cast<double>(n - 1); }
  /// Node k; the last node is b exactly.
  double node(std::size_t k) const noexcept {
    return k + 1 == n ? b : a + static_cast<double>(k) * step();
  }

  friend bool operator==(const UniformGrid&, const UniformGrid&) = default;
};

/// Finite complex samples of a function on a uniform grid.
class SampledPath {
 public:
  SampledPath(UniformGrid grid, std::vector<Complex> values);

  const UniformGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double step() const noexcept { return grid_.step(); }
  double t(std::size_t k) const noexcept { return grid_.node(k); }
  const Complex& operator[](std::size_t k) const noexcept { return values_[k]; }
  const std::vector<Complex>& values() const noexcept { return values_; }

 private:
  UniformGrid grid_;
  std::vector<Complex> values_;
};

struct HolderParams {
  double alpha;
  double c;

  HolderParams(double alpha, double c);
};

/// Truncated Weierstrass series sum_{k=0}^{K} a^k cos(b^k pi t), K the smallest
/// index with a^K < 1e-16. Requires 0 < a < 1, b odd >= 3 and a*b > 1.
double weierstrass(double a_coef, int b_freq, double t);

/// Number of the last retained term of the series above.
int weierstrass_terms(double a_coef);

/// Known Holder exponent ln(1/a)/ln(b) of the Weierstrass function.
double weierstrass_exponent(double a_coef, int b_freq);

SampledPath sample(const std::function<Complex(double)>& f, double a, double b, std::size_t n);

/// Seeded Gaussian random walk started at 0, increments N(0, h). Exponent ~ 1/2.
SampledPath random_walk(std::uint64_t seed, double a, double b, std::size_t n);

struct HolderEstimate {
  double alpha;      ///< slope clamped to (0, 1]
  double raw_slope;  ///< unclamped regression slope
  bool smooth;       ///< degenerate path or Lipschitz-like slope
  std::size_t lags;  ///< number of lags used in the fit
};

/// Least-squares slope of log(max increment at lag l) against log(l*h) over
/// dyadic lags 1, 2, 4, ..., n/8. Requires n >= 64.
HolderEstimate holder_exponent_estimate(const SampledPath& path);

/// CSV with header `t,re,im`, 17 significant digits.
void write_path_csv(std::ostream& out, const SampledPath& path);
SampledPath read_path_csv(std::istream& in);

}  // namespace ndham

#endif  // NDHAM_SIGNALS_HPP
