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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numeric>
#include <numbers>
#include <sstream>

#include "ndham/signals.hpp"
#include "support.hpp"

namespace ndham {
namespace {

using testing::Draw;

TEST(Grid, Validation) {
  EXPECT_THROW(UniformGrid(1.0, 1.0, 3), InvalidArgument);
  EXPECT_THROW(UniformGrid(0.0, 1.0, 1), InvalidArgument);
  const UniformGrid g(0.0, 1.0, 3);
  EXPECT_EQ(g.step(), 0.5);
  EXPECT_EQ(g.node(2), 1.0);
}

TEST(Sample, Identity) {
  const SampledPath s = sample([](double t) { return Complex(t); }, 0, 1, 3);
  EXPECT_EQ(s.values(), (std::vector<Complex>{0.0, 0.5, 1.0}));
}

TEST(Sample, Constant) {
  const SampledPath s = sample([](double) { return Complex(1.0); }, 0, 1, 5);
  for (const auto& v : s.values()) EXPECT_EQ(v, Complex(1.0));
}

TEST(Sample, NonFiniteIsAnError) {
  EXPECT_THROW(sample([](double t) { return Complex(1.0 / t); }, 0, 1, 5), NumericalError);
  EXPECT_THROW(SampledPath(UniformGrid(0, 1, 2), {1.0, std::nan("")}), NumericalError);
}

TEST(Sample, ExactAtNodes) {
  auto f = [](double t) { return Complex(std::sin(7 * t), std::exp(t)); };
  const SampledPath s = sample(f, -0.3, 2.1, 1001);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Complex again = f(s.t(k));
    EXPECT_EQ(std::memcmp(&again, &s[k], sizeof again), 0);
  }
}

TEST(Weierstrass, ValueAtZeroIsTheGeometricSum) {
  // Independent count of the retained terms.
  int k = 0;
  double ak = 1.0;
  while (!(ak < 1e-16)) {
    ak *= 0.5;
    ++k;
  }
  EXPECT_EQ(weierstrass_terms(0.5), k);
  EXPECT_NEAR(weierstrass(0.5, 3, 0.0), 2.0 * (1.0 - std::pow(0.5, k + 1)), 1e-15);
  EXPECT_NEAR(weierstrass(0.5, 3, 0.0), 2.0, 1e-15);
}

TEST(Weierstrass, ParameterChecks) {
  EXPECT_THROW(weierstrass(0.0, 3, 0.1), InvalidArgument);
  EXPECT_THROW(weierstrass(1.0, 3, 0.1), InvalidArgument);
  EXPECT_THROW(weierstrass(0.5, 4, 0.1), InvalidArgument);
  EXPECT_THROW(weierstrass(0.5, 1, 0.1), InvalidArgument);
  EXPECT_THROW(weierstrass(0.3, 3, 0.1), InvalidArgument);  // a*b < 1
}

TEST(Weierstrass, SampledPathIsBounded) {
  const SampledPath s = sample([](double t) { return Complex(weierstrass(0.5, 3, t)); }, 0, 1, 4097);
  for (const auto& v : s.values()) {
    EXPECT_TRUE(std::isfinite(v.real()));
    EXPECT_LE(std::abs(v), 2.0);
  }
}

TEST(WeierstrassProperty, TruncationBound) {
  Draw draw(11);
  for (int trial = 0; trial < 40; ++trial) {
    const double a = draw.uniform(0.34, 0.9);
    const int k = weierstrass_terms(a);
    const double bound = std::pow(a, k + 1) / (1.0 - a);
    EXPECT_LT(bound, 1e-15) << a;
    // At t = 0 every cosine is 1, so the neglected tail is the geometric remainder.
    long double tail = 0.0L;
    for (int j = k + 1; j < k + 2000; ++j) tail += std::pow(static_cast<long double>(a), j);
    EXPECT_LE(static_cast<double>(tail), bound * (1 + 1e-12));
  }
}

TEST(Weierstrass, KnownExponent) {
  EXPECT_NEAR(weierstrass_exponent(0.5, 3), std::log(2.0) / std::log(3.0), 1e-15);
}

TEST(Holder, WeierstrassEstimateNearKnownExponent) {
  const SampledPath s = sample([](double t) { return Complex(weierstrass(0.5, 3, t)); }, 0, 1, 65537);
  const HolderEstimate est = holder_exponent_estimate(s);
  EXPECT_NEAR(est.alpha, std::log(2.0) / std::log(3.0), 0.05);
  EXPECT_FALSE(est.smooth);
}

TEST(Holder, LinearPathIsSmooth) {
  const SampledPath s = sample([](double t) { return Complex(t); }, 0, 1, 1025);
  const HolderEstimate est = holder_exponent_estimate(s);
  EXPECT_NEAR(est.alpha, 1.0, 1e-12);
  EXPECT_TRUE(est.smooth);
}

TEST(Holder, ConstantPathIsSmooth) {
  const SampledPath s = sample([](double) { return Complex(3.0); }, 0, 1, 128);
  const HolderEstimate est = holder_exponent_estimate(s);
  EXPECT_EQ(est.alpha, 1.0);
  EXPECT_TRUE(est.smooth);
}

TEST(Holder, TooFewSamples) {
  EXPECT_THROW(holder_exponent_estimate(sample([](double t) { return Complex(t); }, 0, 1, 63)), InvalidArgument);
}

TEST(Holder, RandomWalkNearOneHalf) {
  const HolderEstimate est = holder_exponent_estimate(random_walk(42, 0, 1, 1 << 16));
  EXPECT_NEAR(est.alpha, 0.5, 0.1);
}

TEST(HolderProperty, ScaleInvariant) {
  Draw draw(17);
  const std::vector<SampledPath> paths{
      sample([](double t) { return Complex(weierstrass(0.5, 3, t)); }, 0, 1, 4097),
      sample([](double t) { return Complex(weierstrass(0.7, 5, t)); }, -1, 1, 2049),
      random_walk(9, 0, 2, 8192),
  };
  for (const auto& p : paths) {
    const double base = holder_exponent_estimate(p).raw_slope;
    for (int trial = 0; trial < 6; ++trial) {
      const Complex c = trial == 5 ? Complex(0.0, -2.5) : Complex(draw.uniform(-1e3, 1e3));
      std::vector<Complex> v = p.values();
      for (auto& x : v) x *= c;
      const double scaled = holder_exponent_estimate(SampledPath(p.grid(), v)).raw_slope;
      EXPECT_LT(std::abs(scaled - base), 1e-12) << c;
    }
  }
}

// Regression-estimated (c, alpha) from increments on a fine grid bound the
// increment at a much smaller lag.
TEST(Weierstrass, IncrementBelowFittedHolderEnvelope) {
  const double a = 0.9;
  const int b = 7;
  const std::size_t n = 1 << 14;
  const SampledPath s = sample([&](double t) { return Complex(weierstrass(a, b, t)); }, 0, 1, n + 1);
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t lag = 1; lag <= n / 8; lag *= 2) {
    double m = 0.0;
    for (std::size_t k = 0; k + lag < s.size(); ++k) m = std::max(m, std::abs(s[k + lag] - s[k]));
    lx.push_back(std::log(static_cast<double>(lag) * s.step()));
    ly.push_back(std::log(m));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double alpha = sxy / sxx;
  double c = 0.0;  // smallest constant putting every fitted point under the envelope
  for (std::size_t i = 0; i < lx.size(); ++i) c = std::max(c, std::exp(ly[i] - alpha * lx[i]));
  ASSERT_GT(alpha, 0.0);
  for (double t : {0.1, 0.25, 0.5, 0.77, 0.9}) {
    const double inc = std::abs(weierstrass(a, b, t + 1e-9) - weierstrass(a, b, t));
    EXPECT_LT(inc, c * std::pow(1e-9, alpha)) << t;
  }
}

TEST(HolderParams, Validation) {
  EXPECT_NO_THROW(HolderParams(0.5, 1.0));
  EXPECT_THROW(HolderParams(1.0, 1.0), InvalidArgument);
  EXPECT_THROW(HolderParams(0.0, 1.0), InvalidArgument);
  EXPECT_THROW(HolderParams(0.5, 0.0), InvalidArgument);
}

TEST(RandomWalk, SeededAndReproducible) {
  const SampledPath a = random_walk(5, 0, 1, 1000);
  const SampledPath b = random_walk(5, 0, 1, 1000);
  const SampledPath c = random_walk(6, 0, 1, 1000);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_NE(a.values(), c.values());
  EXPECT_EQ(a[0], Complex(0.0));
}

TEST(Csv, RoundTripIsExact) {
  const SampledPath s = sample([](double t) { return Complex(std::sin(t), 1.0 / 3.0 * t); }, -1, 2, 101);
  std::stringstream io;
  write_path_csv(io, s);
  const std::string text = io.str();
  EXPECT_EQ(text.substr(0, 8), "t,re,im\n");
  const SampledPath back = read_path_csv(io);
  EXPECT_EQ(back.values(), s.values());
  EXPECT_EQ(back.grid().n, s.grid().n);
  EXPECT_EQ(back.grid().a, s.grid().a);
  EXPECT_EQ(back.grid().b, s.grid().b);
}

TEST(Csv, RejectsBadInput) {
  std::stringstream bad_header("x,y\n0,1\n");
  EXPECT_THROW(read_path_csv(bad_header), InvalidArgument);
  std::stringstream uneven("t,re,im\n0,1,0\n0.1,1,0\n0.5,1,0\n");
  EXPECT_THROW(read_path_csv(uneven), InvalidArgument);
}

}  // namespace
}  // namespace ndham
