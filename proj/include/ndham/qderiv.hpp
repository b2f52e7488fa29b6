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

#ifndef NDHAM_QDERIV_HPP
#define NDHAM_QDERIV_HPP

#include <array>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "ndham/errors.hpp"
#include "ndham/signals.hpp"

namespace ndham {

enum class Side { Left, Right };

/// The five admissible values of mu in the scale derivative.
enum class Mu { MinusOne, One, Zero, MinusI, I };

inline constexpr std::array<Mu, 5> kAllMu{Mu::MinusOne, Mu::One, Mu::Zero, Mu::MinusI, Mu::I};

Complex mu_value(Mu mu) noexcept;
std::string to_string(Mu mu);
/// Accepts "-1", "1", "0", "-i", "i" (also "+1", "+i").
Mu parse_mu(std::string_view text);

class ScaleParams {
 public:
  explicit ScaleParams(double epsilon, Mu mu = Mu::One);

  double epsilon() const noexcept { return epsilon_; }
  Mu mu() const noexcept { return mu_; }

 private:
  double epsilon_;
  Mu mu_;
};

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double t) const noexcept { return t >= lo && t <= hi; }
};

/// A complex-valued function of time with the interval it may be sampled on.
class Signal {
 public:
  template <typename F>
    requires std::invocable<const F&, double> && (!std::same_as<std::remove_cvref_t<F>, Signal>)
  Signal(F f, Interval domain = {})  // NOLINT(google-explicit-constructor)
      : fn_([f = std::move(f)](double t) -> Complex { return Complex(f(t)); }), domain_(domain) {}

  Complex operator()(double t) const { return fn_(t); }
  const Interval& domain() const noexcept { return domain_; }

 private:
  std::function<Complex(double)> fn_;
  Interval domain_;
};

/// Strictly decreasing positive scales, at least four of them.
class EpsilonSweep {
 public:
  explicit EpsilonSweep(std::vector<double> epsilons);

  /// start * ratio^k, k = 0..count-1.
  static EpsilonSweep geometric(double start, double ratio, std::size_t count);
  /// 1e-2 * 2^-k, k = 0..7.
  static EpsilonSweep standard();
  /// Whole multiples of a grid step, e.g. {8, 4, 2, 1} * h.
  static EpsilonSweep grid(double step, std::span<const std::size_t> multiples);
  static EpsilonSweep grid(double step, std::initializer_list<std::size_t> multiples = {8, 4, 2, 1});

  const std::vector<double>& values() const noexcept { return eps_; }
  std::size_t size() const noexcept { return eps_.size(); }
  double largest() const noexcept { return eps_.front(); }
  double smallest() const noexcept { return eps_.back(); }

 private:
  std::vector<double> eps_;
};

struct EpsilonFamily {
  std::vector<double> epsilons;
  std::vector<Complex> values;

  /// Throws InvalidArgument unless epsilons are strictly decreasing and
  /// positive, lengths agree and there are at least four entries.
  void validate() const;
};

/// Numerical stand-in for the epsilon -> 0 extraction: a least-squares fit of
/// value + slope*eps + curvature*eps^2 over the four smallest scales.
/// `value` is only trustworthy when `converged` is set.
struct ExtractionResult {
  Complex value;
  bool converged = false;
  double fit_residual = 0.0;
  Complex divergent_slope;
  Complex curvature;
};

inline constexpr double kDefaultExtractionTol = 1e-3;

ExtractionResult extract(const EpsilonFamily& family, double tol = kDefaultExtractionTol);

// -------- function inputs

Complex sided_derivative(const Signal& f, double t, double epsilon, Side side);
Complex scale_derivative(const Signal& f, double t, const ScaleParams& sp);
/// (sigma/eps) * integral of f over [t, t + sigma*eps], 16-point Gauss-Legendre.
Complex epsilon_mean(const Signal& f, double t, double epsilon, Side side);
ExtractionResult extract_scale_derivative(const Signal& f, double t, const EpsilonSweep& sweep, Mu mu,
                                          double tol = kDefaultExtractionTol);

// -------- sampled inputs (epsilon must be a whole number of grid steps)

/// Whole number of grid steps equal to epsilon; throws StencilError otherwise.
std::size_t grid_multiple(const UniformGrid& grid, double epsilon);
/// Index of the node at time t; throws StencilError if t is not a node.
std::size_t grid_index(const UniformGrid& grid, double t);

Complex sided_derivative(const SampledPath& f, std::size_t node, std::size_t multiple, Side side);
Complex sided_derivative(const SampledPath& f, double t, double epsilon, Side side);
Complex scale_derivative(const SampledPath& f, std::size_t node, std::size_t multiple, Mu mu);
Complex scale_derivative(const SampledPath& f, double t, const ScaleParams& sp);
ExtractionResult extract_scale_derivative(const SampledPath& f, std::size_t node, const EpsilonSweep& sweep, Mu mu,
                                          double tol = kDefaultExtractionTol);

/// Derivative values on the interior window [first, first + values.size()).
struct PathDerivative {
  std::size_t first = 0;
  std::vector<Complex> values;
  std::vector<bool> converged;
  std::size_t nonconverged = 0;
};

PathDerivative scale_derivative_path(const SampledPath& f, const ScaleParams& sp);
PathDerivative extracted_derivative_path(const SampledPath& f, const EpsilonSweep& sweep, Mu mu,
                                         double tol = kDefaultExtractionTol);

// -------- calculus identities

struct LeibnizReport {
  double residual = 0.0;
  double worst_t = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;
};

/// max over the grid of |<box(fg)> - <box f> g - f <box g>| using extracted
/// derivatives; points where any extraction fails are excluded and counted.
LeibnizReport leibniz_residual(const Signal& f, const Signal& g, std::span<const double> grid,
                               const EpsilonSweep& sweep, Mu mu, double tol = kDefaultExtractionTol);

/// Same defect at a single fixed epsilon, without extraction.
double leibniz_raw_defect(const Signal& f, const Signal& g, std::span<const double> grid, const ScaleParams& sp);

struct FtcReport {
  double residual = 0.0;
  Complex expected;             ///< f(b) - f(a)
  ExtractionResult extracted;   ///< limit of the integral family
  std::vector<Complex> integrals;  ///< one per sweep entry
  std::size_t nodes = 0;
};

/// Trapezoid-integrates the scale derivative over `nodes` points of [a, b] for
/// every epsilon and extracts the epsilon -> 0 limit. When extraction does not
/// converge the residual is taken against the finest-epsilon integral.
FtcReport ftc_residual(const Signal& f, double a, double b, const EpsilonSweep& sweep, Mu mu,
                       std::size_t nodes = 10000, double tol = kDefaultExtractionTol);

}  // namespace ndham

#endif  // NDHAM_QDERIV_HPP
