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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ndham/dynamics.hpp"
#include "ndham/field.hpp"
#include "ndham/helmholtz.hpp"
#include "ndham/qderiv.hpp"
#include "ndham/signals.hpp"
#include "support.hpp"

namespace {

using namespace ndham;
using ndham::testing::Draw;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds, 0 = none
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

PhaseVectorField linear_field(double a, double b, double c, double d) {
  const std::vector<std::string> xq{"alpha*q1 + beta*p1"};
  const std::vector<std::string> xp{"gamma*q1 + delta*p1"};
  return PhaseVectorField::parse(xq, xp, {{"alpha", a}, {"beta", b}, {"gamma", c}, {"delta", d}});
}

PhaseVectorField newton_field(double m, const std::string& du, Constants c = {}) {
  const std::vector<std::string> xq{"p1/m"};
  const std::vector<std::string> xp{"-(" + du + ")"};
  c["m"] = m;
  return PhaseVectorField::parse(xq, xp, c);
}

// ---- tolerances
constexpr double kHcTol = 1e-12;
constexpr double kClosedFormTol = 1e-10;
constexpr double kGradientTol = 1e-6;
constexpr double kRoundTripTol = 1e-9;
constexpr double kScaleExactTol = 1e-13;
constexpr double kFtcTol = 1e-8;
constexpr double kLeibnizTol = 1e-8;
constexpr double kRawDefectFloor = 1e-5;
constexpr double kSaPassTol = 1e-6;
constexpr double kSaFailFloor = 1e-2;
constexpr double kOrderFloor = 1.0;
constexpr double kNonconvergedShare = 0.9;
constexpr double kDriftTol = 1e-6;
constexpr double kDetTol = 1e-12;

Outcome linear_theorem() {
  Draw draw(101);
  double worst_true = 0.0, worst_hc1 = 0.0;
  bool ok = true;
  for (int k = 0; k < 100; ++k) {
    const double a = draw.uniform(-2, 2), b = draw.uniform(-2, 2), c = draw.uniform(-2, 2);
    const HelmholtzReport r = check_conditions(linear_field(a, b, c, -a));
    ok = ok && r.verdict;
    worst_true = std::max({worst_true, r.hc1_residual, r.hc2_residual});
  }
  for (int k = 0; k < 100; ++k) {
    const double a = draw.uniform(-2, 2), b = draw.uniform(-2, 2), c = draw.uniform(-2, 2);
    const double gap = (draw.coin() ? 1.0 : -1.0) * draw.uniform(0.1, 2.0);
    const double d = -a + gap;
    const HelmholtzReport r = check_conditions(linear_field(a, b, c, d));
    ok = ok && !r.verdict;
    worst_hc1 = std::max(worst_hc1, std::abs(r.hc1_residual - std::abs(a + d)));
  }
  ok = ok && worst_true <= kHcTol && worst_hc1 <= kHcTol;
  return {ok, fmt("max residual when a+d=0: %.3g; max |hc1 - |a+d||: %.3g", worst_true, worst_hc1)};
}

Outcome linear_formula() {
  Draw draw(202);
  const auto grid = phase_grid(1, 21, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double a = draw.uniform(-2, 2), b = draw.uniform(-2, 2), c = draw.uniform(-2, 2);
    const ReconstructedHamiltonian h = reconstruct_hamiltonian(linear_field(a, b, c, -a));
    for (const auto& z : grid) {
      const double q = z.q[0].real(), p = z.p[0].real();
      worst = std::max(worst, std::abs(h(z) - (0.5 * (b * p * p - c * q * q) + a * q * p)));
    }
  }
  return {worst <= kClosedFormTol, fmt("max error %.3g over 20 tuples x 441 points", worst)};
}

Outcome newton_formula() {
  const auto grid = phase_grid(1, 21, 1.0);
  double worst = 0.0, worst_grad = 0.0;
  for (double m : {1.0, 2.0, 5.0}) {
    for (int u = 0; u < 3; ++u) {
      const double k = u == 0 ? 1.0 : 5.0;
      const PhaseVectorField f = u < 2 ? newton_field(m, "k*q1", {{"k", k}}) : newton_field(m, "q1^3");
      const ReconstructedHamiltonian h = reconstruct_hamiltonian(f);
      for (const auto& z : grid) {
        const double q = z.q[0].real(), p = z.p[0].real();
        const double pot = u < 2 ? 0.5 * k * q * q : q * q * q * q / 4;
        worst = std::max(worst, std::abs(h(z) - (p * p / (2 * m) + pot)));
      }
      const GradientResiduals g = verify_gradients(h, f, grid);
      worst_grad = std::max({worst_grad, g.p_residual, g.q_residual});
    }
  }
  return {worst <= kClosedFormTol && worst_grad <= kGradientTol,
          fmt("max H error %.3g; max gradient residual %.3g", worst, worst_grad)};
}

Outcome round_trip() {
  Draw draw(404);
  double worst = 0.0;
  bool hc = true;
  std::size_t points = 0;
  for (int k = 0; k < 50; ++k) {
    const std::size_t d = static_cast<std::size_t>(1 + k % 3);
    const testing::Polynomial h0 = testing::random_polynomial(draw, d, 6, 4);
    const auto [xq, xp] = h0.hamiltonian_field();
    const PhaseVectorField field = PhaseVectorField::parse(xq, xp);
    hc = hc && check_conditions(field).verdict;
    const ReconstructedHamiltonian h = reconstruct_hamiltonian(field, {64, false, true, {}});
    // 7 per axis for d <= 2, 5 per axis for d = 3.
    const auto grid = phase_grid(d, d < 3 ? 7 : 5, 1.0);
    for (const auto& z : grid) worst = std::max(worst, std::abs(h(z) - h0(z.flat())));
    points += grid.size();
  }
  return {hc && worst <= kRoundTripTol,
          std::string(hc ? "HC passed for all" : "HC FAILED for some") + fmt("; max error %.3g over %.0f points", worst,
                                                                             static_cast<double>(points))};
}

Outcome scale_exactness() {
  Draw draw(505);
  const Signal square([](double t) { return t * t; });
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double t = draw.uniform(-1, 1), e = draw.uniform(1e-2, 0.5);
    const Mu mu = draw.coin() ? Mu::One : Mu::MinusOne;
    const double m = mu == Mu::One ? 1.0 : -1.0;
    const Complex want(2 * t, m * e);
    worst = std::max(worst, std::abs(scale_derivative(square, t, ScaleParams(e, mu)) - want));
  }
  return {worst <= kScaleExactTol, fmt("max error %.3g over 1000 triples", worst)};
}

Outcome quantum_ftc() {
  const std::vector<Signal> corpus{Signal([](double t) { return t * t; }), Signal([](double t) { return std::sin(t); }),
                                   Signal([](double t) { return std::exp(t); })};
  double worst = 0.0;
  bool converged = true;
  for (const auto& f : corpus) {
    for (Mu mu : kAllMu) {
      const FtcReport r = ftc_residual(f, 0, 1, EpsilonSweep::standard(), mu, 10000);
      worst = std::max(worst, r.residual);
      converged = converged && r.extracted.converged;
    }
  }
  return {worst <= kFtcTol, fmt("max residual %.3g over 3 functions x 5 mu", worst) +
                                (converged ? "; all extractions converged" : "; some extractions flagged")};
}

Outcome quantum_leibniz() {
  const std::vector<Signal> corpus{Signal([](double t) { return t; }), Signal([](double t) { return t * t; }),
                                   Signal([](double t) { return std::sin(t); }),
                                   Signal([](double t) { return std::exp(t); })};
  std::vector<double> grid;
  for (int k = 0; k <= 100; ++k) grid.push_back(0.1 + 0.8 * k / 100.0);
  const EpsilonSweep sweep = EpsilonSweep::geometric(1e-2, 0.5, 7);
  double worst = 0.0;
  std::size_t excluded = 0;
  for (const auto& f : corpus)
    for (const auto& g : corpus)
      for (Mu mu : kAllMu) {
        const LeibnizReport r = leibniz_residual(f, g, grid, sweep, mu);
        worst = std::max(worst, r.residual);
        excluded += r.excluded;
      }
  const double raw = leibniz_raw_defect(corpus[1], corpus[1], grid, ScaleParams(1e-2, Mu::One));
  return {worst <= kLeibnizTol && raw >= kRawDefectFloor,
          fmt("max extracted residual %.3g; raw defect for t^2 * t^2 at eps=1e-2: %.3g", worst, raw) +
              "; excluded points " + std::to_string(excluded)};
}

Outcome self_adjointness() {
  const PhasePath path =
      PhasePath::from_function(UniformGrid(0, 1, 2001), [](double t) { return PhasePoint({std::cos(t)}, {-std::sin(t)}); });
  const double newton = self_adjointness_residual(newton_field(1, "q1"), path).residual;
  const double hamiltonian = self_adjointness_residual(linear_field(2, 1, 4, -2), path).residual;
  const double defective = self_adjointness_residual(linear_field(1, 2, 3, 1), path).residual;
  return {newton <= kSaPassTol && hamiltonian <= kSaPassTol && defective >= kSaFailFloor,
          fmt("Newton %.3g, Hamiltonian linear %.3g", newton, hamiltonian) + fmt(", alpha=delta=1 %.3g", defective)};
}

Outcome nd_residual_order() {
  const PhasePath path =
      PhasePath::from_function(UniformGrid(0, 1, 4097), [](double t) { return PhasePoint({std::cos(t)}, {-std::sin(t)}); });
  const double h = path.grid().step();
  std::vector<double> res;
  std::size_t nonconverged = 0;
  for (int level = 3; level >= 0; --level) {
    const std::size_t s = std::size_t{1} << level;
    const NdHamiltonReport r = nd_hamilton_residual(newton_field(1, "q1"), path, EpsilonSweep::grid(h, {8 * s, 4 * s, 2 * s, s}));
    res.push_back(std::max(r.q_residual, r.p_residual));
    nonconverged += r.nonconverged;
  }
  double min_order = 1e300;
  for (std::size_t k = 1; k < res.size(); ++k) min_order = std::min(min_order, std::log2(res[k - 1] / res[k]));
  std::string detail = "residuals";
  for (double r : res) detail += fmt(" %.3g", r);
  detail += fmt("; min observed order %.3g", min_order) + "; non-converged nodes " + std::to_string(nonconverged);
  return {min_order >= kOrderFloor && nonconverged == 0, detail};
}

Outcome weierstrass_nonconvergence() {
  const std::size_t n = (std::size_t{1} << 16) + 1;
  const SampledPath w = sample([](double t) { return weierstrass(0.5, 3, t); }, 0, 1, n);
  const double h = w.step();
  std::vector<std::size_t> multiples;
  for (int k = 0; k <= 5; ++k) multiples.push_back(std::size_t{1} << (9 - k));
  const EpsilonSweep sweep = EpsilonSweep::grid(h, std::span<const std::size_t>(multiples));
  const std::size_t margin = multiples.front();
  const std::size_t probes = 1000;
  std::size_t failed = 0;
  for (std::size_t k = 0; k < probes; ++k) {
    const std::size_t node = margin + (k * (n - 1 - 2 * margin)) / (probes - 1);
    if (!extract_scale_derivative(w, node, sweep, Mu::One).converged) ++failed;
  }
  const double share = static_cast<double>(failed) / probes;
  return {share >= kNonconvergedShare, fmt("non-converged at %.1f%% of %.0f probes", 100 * share, probes)};
}

Outcome energy_conservation() {
  const PhaseVectorField f = newton_field(1, "k*q1", {{"k", 1.0}});
  const Trajectory tr = integrate_symplectic(f, PhasePoint({1.0}, {0.0}), 1e-3, 10000);
  double drift = 0.0;
  for (const auto& z : tr.states)
    drift = std::max(drift, std::abs(0.5 * (std::norm(z.q[0]) + std::norm(z.p[0])) - 0.5));
  double det = 0.0;
  for (std::size_t k = 0; k < tr.states.size(); k += 1000)
    det = std::max(det, std::abs(step_jacobian(f, tr.states[k], 1e-3).determinant() - 1.0));
  return {drift <= kDriftTol && det <= kDetTol, fmt("max |H drift| %.3g; max |det - 1| %.3g", drift, det)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "linear-case theorem", 1.0, linear_theorem},
      {2, "linear Hamiltonian formula", 1.0, linear_formula},
      {3, "Newton Hamiltonian", 0.0, newton_formula},
      {4, "polynomial round trip", 30.0, round_trip},
      {5, "scale derivative of t^2", 0.0, scale_exactness},
      {6, "quantum FTC", 0.0, quantum_ftc},
      {7, "quantum Leibniz rule", 0.0, quantum_leibniz},
      {8, "self-adjointness dichotomy", 5.0, self_adjointness},
      {9, "nd Hamilton residual order", 0.0, nd_residual_order},
      {10, "Weierstrass non-convergence", 0.0, weierstrass_nonconvergence},
      {11, "energy conservation", 0.0, energy_conservation},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.pass;
    std::string timing = fmt("%.2f s", secs);
    if (c.time_limit > 0.0) {
      timing += fmt(" (limit %.0f s)", c.time_limit);
      pass = pass && secs < c.time_limit;
    }
    std::printf("%s %2d %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), timing.c_str());
    if (!pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
