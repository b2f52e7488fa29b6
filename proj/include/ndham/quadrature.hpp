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

#ifndef NDHAM_QUADRATURE_HPP
#define NDHAM_QUADRATURE_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ndham {

/// Gauss-Legendre rule on [-1, 1]. Nodes ascend; the rule integrates
/// polynomials of degree 2n-1 exactly.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights by Newton iteration on the Legendre recurrence. Cached per n.
const GaussLegendreRule& gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre over [lo, hi]: `panels` equal panels of `order` nodes.
std::complex<double> integrate_gauss_legendre(const std::function<std::complex<double>(double)>& f, double lo,
                                              double hi, std::size_t order, std::size_t panels = 1);

/// Trapezoid rule over uniformly spaced samples with spacing h.
std::complex<double> trapezoid(std::span<const std::complex<double>> samples, double h);

}  // namespace ndham

#endif  // NDHAM_QUADRATURE_HPP
