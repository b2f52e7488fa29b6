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

#include "ndham/signals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "ndham/report.hpp"

namespace ndham {

UniformGrid::UniformGrid(double a_, double b_, std::size_t n_) : a(a_), b(b_), n(n_) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) throw InvalidArgument("grid needs finite a < b");
  if (n < 2) throw InvalidArgument("grid needs at least two nodes");
}

SampledPath::SampledPath(UniformGrid grid, std::vector<Complex> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n) throw InvalidArgument("sample count does not match grid");
  for (const Complex& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalError("non-finite sample in path");
}

HolderParams::HolderParams(double alpha_, double c_) : alpha(alpha_), c(c_) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("Holder exponent must lie in (0, 1)");
  if (!(c > 0.0)) throw InvalidArgument("Holder constant must be positive");
}

namespace {

void check_weierstrass(double a, int b) {
  if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("Weierstrass coefficient must lie in (0, 1)");
  if (b < 3 || b % 2 == 0) throw InvalidArgument("Weierstrass frequency must be an odd integer >= 3");
  if (!(a * b > 1.0)) throw InvalidArgument("Weierstrass parameters need a*b > 1");
}

}  // namespace

int weierstrass_terms(double a_coef) {
  int k = 0;
  double ak = 1.0;
  while (ak >= 1e-16) {
    ak *= a_coef;
    ++k;
  }
  return k;
}

double weierstrass(double a_coef, int b_freq, double t) {
  check_weierstrass(a_coef, b_freq);
  const int terms = weierstrass_terms(a_coef);
  double sum = 0.0;
  double ak = 1.0;
  double bk = 1.0;
  for (int k = 0; k <= terms; ++k) {
    sum += ak * std::cos(bk * std::numbers::pi * t);
    ak *= a_coef;
    bk *= b_freq;
  }
  return sum;
}

double weierstrass_exponent(double a_coef, int b_freq) {
  check_weierstrass(a_coef, b_freq);
  return std::log(1.0 / a_coef) / std::log(static_cast<double>(b_freq));
}

SampledPath sample(const std::function<Complex(double)>& f, double a, double b, std::size_t n) {
  const UniformGrid grid(a, b, n);
  std::vector<Complex> values(n);
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = f(grid.node(k));
    if (!std::isfinite(values[k].real()) || !std::isfinite(values[k].imag()))
      throw NumericalError("non-finite sample at t = " + format_double(grid.node(k)));
  }
  return SampledPath(grid, std::move(values));
}

SampledPath random_walk(std::uint64_t seed, double a, double b, std::size_t n) {
  const UniformGrid grid(a, b, n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(grid.step()));
  std::vector<Complex> values(n);
  for (std::size_t k = 1; k < n; ++k) values[k] = values[k - 1] + normal(rng);
  return SampledPath(grid, std::move(values));
}

HolderEstimate holder_exponent_estimate(const SampledPath& path) {
  const std::size_t n = path.size();
  if (n < 64) throw InvalidArgument("Holder estimate needs at least 64 samples");
  const auto& v = path.values();
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t lag = 1; lag <= n / 8; lag *= 2) {
    double m = 0.0;
    for (std::size_t k = 0; k + lag < n; ++k) m = std::max(m, std::abs(v[k + lag] - v[k]));
    if (m > 0.0) {
      xs.push_back(std::log(static_cast<double>(lag) * path.step()));
      ys.push_back(std::log(m));
    }
  }
  if (xs.size() < 2) return {1.0, 1.0, true, xs.size()};
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  // Slopes within 1e-6 of one are Lipschitz paths up to rounding.
  const bool smooth = slope >= 1.0 - 1e-6;
  const double alpha = std::clamp(slope, std::numeric_limits<double>::min(), 1.0);
  return {alpha, slope, smooth, xs.size()};
}

void write_path_csv(std::ostream& out, const SampledPath& path) {
  out << "t,re,im\n";
  for (std::size_t k = 0; k < path.size(); ++k)
    out << format_double(path.t(k)) << ',' << format_double(path[k].real()) << ','
        << format_double(path[k].imag()) << '\n';
}

SampledPath read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty path CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,re,im") throw InvalidArgument("path CSV header must be 't,re,im'");
  std::vector<double> ts;
  std::vector<Complex> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 3> cols{};
    std::size_t start = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      const std::size_t end = c < 2 ? line.find(',', start) : line.size();
      if (end == std::string::npos) throw InvalidArgument("path CSV row " + std::to_string(row) + " needs 3 columns");
      cols[c] = parse_double(line.substr(start, end - start));
      start = end + 1;
    }
    ts.push_back(cols[0]);
    values.emplace_back(cols[1], cols[2]);
  }
  if (ts.size() < 2) throw InvalidArgument("path CSV needs at least two rows");
  const UniformGrid grid(ts.front(), ts.back(), ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k)
    if (std::abs(ts[k] - grid.node(k)) > 1e-9 * std::max(1.0, grid.step() * static_cast<double>(grid.n)))
      throw InvalidArgument("path CSV times are not uniformly spaced");
  return SampledPath(grid, std::move(values));
}

}  // namespace ndham
