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

#include "ndham/qderiv.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "ndham/quadrature.hpp"
#include "ndham/report.hpp"

namespace ndham {

Complex mu_value(Mu mu) noexcept {
  switch (mu) {
    case Mu::MinusOne: return {-1.0, 0.0};
    case Mu::One: return {1.0, 0.0};
    case Mu::Zero: return {0.0, 0.0};
    case Mu::MinusI: return {0.0, -1.0};
    case Mu::I: return {0.0, 1.0};
  }
  return {};
}

std::string to_string(Mu mu) {
  switch (mu) {
    case Mu::MinusOne: return "-1";
    case Mu::One: return "1";
    case Mu::Zero: return "0";
    case Mu::MinusI: return "-i";
    case Mu::I: return "i";
  }
  return "?";
}

Mu parse_mu(std::string_view text) {
  if (text == "-1") return Mu::MinusOne;
  if (text == "1" || text == "+1") return Mu::One;
  if (text == "0") return Mu::Zero;
  if (text == "-i") return Mu::MinusI;
  if (text == "i" || text == "+i") return Mu::I;
  throw InvalidArgument("mu must be one of -1, 1, 0, -i, i (got '" + std::string(text) + "')");
}

ScaleParams::ScaleParams(double epsilon, Mu mu) : epsilon_(epsilon), mu_(mu) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be positive and finite");
}

// ---------------------------------------------------------------- sweeps

EpsilonSweep::EpsilonSweep(std::vector<double> epsilons) : eps_(std::move(epsilons)) {
  if (eps_.size() < 4) throw InvalidArgument("epsilon sweep needs at least four scales");
  for (std::size_t k = 0; k < eps_.size(); ++k) {
    if (!(eps_[k] > 0.0) || !std::isfinite(eps_[k])) throw InvalidArgument("epsilon sweep entries must be positive");
    if (k > 0 && !(eps_[k] < eps_[k - 1])) throw InvalidArgument("epsilon sweep must be strictly decreasing");
  }
}

EpsilonSweep EpsilonSweep::geometric(double start, double ratio, std::size_t count) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("geometric sweep ratio must lie in (0, 1)");
  std::vector<double> eps(count);
  double e = start;
  for (std::size_t k = 0; k < count; ++k) {
    eps[k] = e;
    e *= ratio;
  }
  return EpsilonSweep(std::move(eps));
}

EpsilonSweep EpsilonSweep::standard() { return geometric(1e-2, 0.5, 8); }

EpsilonSweep EpsilonSweep::grid(double step, std::span<const std::size_t> multiples) {
  std::vector<double> eps;
  for (std::size_t m : multiples) eps.push_back(static_cast<double>(m) * step);
  return EpsilonSweep(std::move(eps));
}

EpsilonSweep EpsilonSweep::grid(double step, std::initializer_list<std::size_t> multiples) {
  return grid(step, std::span<const std::size_t>(multiples.begin(), multiples.size()));
}

void EpsilonFamily::validate() const {
  if (epsilons.size() != values.size()) throw InvalidArgument("epsilon family lengths differ");
  EpsilonSweep check(epsilons);
  (void)check;
}

// ---------------------------------------------------------------- extraction

ExtractionResult extract(const EpsilonFamily& family, double tol) {
  family.validate();
  constexpr std::size_t kPoints = 4;
  const std::size_t n = family.epsilons.size();
  const double eps_min = family.epsilons.back();
  Eigen::Matrix<double, kPoints, 3> design;
  Eigen::Matrix<double, kPoints, 2> rhs;
  for (std::size_t j = 0; j < kPoints; ++j) {
    const std::size_t idx = n - kPoints + j;
    const double x = family.epsilons[idx] / eps_min;
    design(static_cast<Eigen::Index>(j), 0) = 1.0;
    design(static_cast<Eigen::Index>(j), 1) = x;
    design(static_cast<Eigen::Index>(j), 2) = x * x;
    rhs(static_cast<Eigen::Index>(j), 0) = family.values[idx].real();
    rhs(static_cast<Eigen::Index>(j), 1) = family.values[idx].imag();
  }
  const Eigen::Matrix<double, 3, 2> coef = design.colPivHouseholderQr().solve(rhs);
  const Eigen::Matrix<double, kPoints, 2> fitted = design * coef;
  ExtractionResult r;
  r.value = {coef(0, 0), coef(0, 1)};
  r.divergent_slope = Complex(coef(1, 0), coef(1, 1)) / eps_min;
  r.curvature = Complex(coef(2, 0), coef(2, 1)) / (eps_min * eps_min);
  for (std::size_t j = 0; j < kPoints; ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    r.fit_residual = std::max(r.fit_residual, std::hypot(rhs(row, 0) - fitted(row, 0), rhs(row, 1) - fitted(row, 1)));
  }
  r.converged = r.fit_residual <= tol && std::abs(r.divergent_slope * eps_min) <= tol;
  return r;
}

// ---------------------------------------------------------------- function inputs

namespace {

// Applies the scale combination to the real and imaginary parts separately.
Complex combine(Complex d_plus, Complex d_minus, Mu mu) {
  const Complex im = Complex(0.0, 1.0) * mu_value(mu);
  const Complex re_part = 0.5 * ((d_plus.real() + d_minus.real()) + im * (d_plus.real() - d_minus.real()));
  const Complex im_part = 0.5 * ((d_plus.imag() + d_minus.imag()) + im * (d_plus.imag() - d_minus.imag()));
  return re_part + Complex(0.0, 1.0) * im_part;
}

void require_in_domain(const Signal& f, double t) {
  if (!f.domain().contains(t))
    throw StencilError("stencil point " + format_double(t) + " lies outside [" + format_double(f.domain().lo) + ", " +
                       format_double(f.domain().hi) + "]");
}

}  // namespace

Complex sided_derivative(const Signal& f, double t, double epsilon, Side side) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  require_in_domain(f, t);
  if (side == Side::Right) {
    require_in_domain(f, t + epsilon);
    return (f(t + epsilon) - f(t)) / epsilon;
  }
  require_in_domain(f, t - epsilon);
  return (f(t) - f(t - epsilon)) / epsilon;
}

Complex scale_derivative(const Signal& f, double t, const ScaleParams& sp) {
  return combine(sided_derivative(f, t, sp.epsilon(), Side::Right), sided_derivative(f, t, sp.epsilon(), Side::Left),
                 sp.mu());
}

Complex epsilon_mean(const Signal& f, double t, double epsilon, Side side) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  const double lo = side == Side::Right ? t : t - epsilon;
  const double hi = side == Side::Right ? t + epsilon : t;
  require_in_domain(f, lo);
  require_in_domain(f, hi);
  const Complex integral = integrate_gauss_legendre([&](double s) { return f(s); }, lo, hi, 16);
  return integral / epsilon;
}

ExtractionResult extract_scale_derivative(const Signal& f, double t, const EpsilonSweep& sweep, Mu mu, double tol) {
  EpsilonFamily fam{sweep.values(), {}};
  fam.values.reserve(sweep.size());
  for (double e : sweep.values()) fam.values.push_back(scale_derivative(f, t, ScaleParams(e, mu)));
  return extract(fam, tol);
}

// ---------------------------------------------------------------- sampled inputs

std::size_t grid_multiple(const UniformGrid& grid, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  const double ratio = epsilon / grid.step();
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw StencilError("epsilon " + format_double(epsilon) + " is not a whole number of grid steps (" +
                       format_double(grid.step()) + ")");
  return static_cast<std::size_t>(rounded);
}

std::size_t grid_index(const UniformGrid& grid, double t) {
  const double pos = (t - grid.a) / grid.step();
  const double rounded = std::round(pos);
  if (rounded < 0.0 || rounded > static_cast<double>(grid.n - 1) ||
      std::abs(pos - rounded) > 1e-9 * std::max(1.0, std::abs(pos)))
    throw StencilError("t = " + format_double(t) + " is not a grid node");
  return static_cast<std::size_t>(rounded);
}

Complex sided_derivative(const SampledPath& f, std::size_t node, std::size_t multiple, Side side) {
  if (multiple == 0) throw InvalidArgument("epsilon must span at least one grid step");
  if (node >= f.size()) throw StencilError("node index out of range");
  const double eps = static_cast<double>(multiple) * f.step();
  if (side == Side::Right) {
    if (node + multiple >= f.size()) throw StencilError("right stencil leaves the sampled interval");
    return (f[node + multiple] - f[node]) / eps;
  }
  if (node < multiple) throw StencilError("left stencil leaves the sampled interval");
  return (f[node] - f[node - multiple]) / eps;
}

Complex sided_derivative(const SampledPath& f, double t, double epsilon, Side side) {
  return sided_derivative(f, grid_index(f.grid(), t), grid_multiple(f.grid(), epsilon), side);
}

Complex scale_derivative(const SampledPath& f, std::size_t node, std::size_t multiple, Mu mu) {
  return combine(sided_derivative(f, node, multiple, Side::Right), sided_derivative(f, node, multiple, Side::Left), mu);
}

Complex scale_derivative(const SampledPath& f, double t, const ScaleParams& sp) {
  return scale_derivative(f, grid_index(f.grid(), t), grid_multiple(f.grid(), sp.epsilon()), sp.mu());
}

namespace {

std::vector<std::size_t> multiples_of(const SampledPath& f, const EpsilonSweep& sweep) {
  std::vector<std::size_t> m;
  m.reserve(sweep.size());
  for (double e : sweep.values()) m.push_back(grid_multiple(f.grid(), e));
  return m;
}

ExtractionResult extract_at(const SampledPath& f, std::size_t node, const std::vector<std::size_t>& multiples,
                            const EpsilonSweep& sweep, Mu mu, double tol) {
  EpsilonFamily fam{sweep.values(), {}};
  fam.values.reserve(multiples.size());
  for (std::size_t m : multiples) fam.values.push_back(scale_derivative(f, node, m, mu));
  return extract(fam, tol);
}

}  // namespace

ExtractionResult extract_scale_derivative(const SampledPath& f, std::size_t node, const EpsilonSweep& sweep, Mu mu,
                                          double tol) {
  return extract_at(f, node, multiples_of(f, sweep), sweep, mu, tol);
}

PathDerivative scale_derivative_path(const SampledPath& f, const ScaleParams& sp) {
  const std::size_t m = grid_multiple(f.grid(), sp.epsilon());
  if (2 * m >= f.size()) throw StencilError("epsilon leaves no interior window");
  PathDerivative out;
  out.first = m;
  out.values.reserve(f.size() - 2 * m);
  for (std::size_t k = m; k + m < f.size(); ++k) out.values.push_back(scale_derivative(f, k, m, sp.mu()));
  out.converged.assign(out.values.size(), true);
  return out;
}

PathDerivative extracted_derivative_path(const SampledPath& f, const EpsilonSweep& sweep, Mu mu, double tol) {
  const auto multiples = multiples_of(f, sweep);
  const std::size_t m = multiples.front();
  if (2 * m >= f.size()) throw StencilError("epsilon sweep leaves no interior window");
  PathDerivative out;
  out.first = m;
  for (std::size_t k = m; k + m < f.size(); ++k) {
    const ExtractionResult r = extract_at(f, k, multiples, sweep, mu, tol);
    out.values.push_back(r.value);
    out.converged.push_back(r.converged);
    if (!r.converged) ++out.nonconverged;
  }
  return out;
}

// ---------------------------------------------------------------- identities

namespace {

Signal product(const Signal& f, const Signal& g) {
  const Interval dom{std::max(f.domain().lo, g.domain().lo), std::min(f.domain().hi, g.domain().hi)};
  return Signal([f, g](double t) { return f(t) * g(t); }, dom);
}

}  // namespace

LeibnizReport leibniz_residual(const Signal& f, const Signal& g, std::span<const double> grid,
                               const EpsilonSweep& sweep, Mu mu, double tol) {
  const Signal fg = product(f, g);
  LeibnizReport rep;
  for (double t : grid) {
    const ExtractionResult dfg = extract_scale_derivative(fg, t, sweep, mu, tol);
    const ExtractionResult df = extract_scale_derivative(f, t, sweep, mu, tol);
    const ExtractionResult dg = extract_scale_derivative(g, t, sweep, mu, tol);
    if (!dfg.converged || !df.converged || !dg.converged) {
      ++rep.excluded;
      continue;
    }
    ++rep.used;
    const double defect = std::abs(dfg.value - df.value * g(t) - f(t) * dg.value);
    if (rep.used == 1 || defect > rep.residual) {
      rep.residual = defect;
      rep.worst_t = t;
    }
  }
  if (rep.used == 0) throw NumericalError("Leibniz check: no grid point had converged extractions");
  return rep;
}

double leibniz_raw_defect(const Signal& f, const Signal& g, std::span<const double> grid, const ScaleParams& sp) {
  const Signal fg = product(f, g);
  double worst = 0.0;
  for (double t : grid)
    worst = std::max(worst, std::abs(scale_derivative(fg, t, sp) - scale_derivative(f, t, sp) * g(t) -
                                     f(t) * scale_derivative(g, t, sp)));
  return worst;
}

FtcReport ftc_residual(const Signal& f, double a, double b, const EpsilonSweep& sweep, Mu mu, std::size_t nodes,
                       double tol) {
  const UniformGrid grid(a, b, nodes);
  FtcReport rep;
  rep.nodes = nodes;
  rep.expected = f(b) - f(a);
  std::vector<Complex> integrand(nodes);
  for (double e : sweep.values()) {
    const ScaleParams sp(e, mu);
    for (std::size_t k = 0; k < nodes; ++k) integrand[k] = scale_derivative(f, grid.node(k), sp);
    rep.integrals.push_back(trapezoid(integrand, grid.step()));
  }
  rep.extracted = extract(EpsilonFamily{sweep.values(), rep.integrals}, tol);
  const Complex limit = rep.extracted.converged ? rep.extracted.value : rep.integrals.back();
  rep.residual = std::abs(limit - rep.expected);
  return rep;
}

}  // namespace ndham
