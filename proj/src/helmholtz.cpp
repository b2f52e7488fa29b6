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

#include "ndham/helmholtz.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ndham/quadrature.hpp"
#include "ndham/report.hpp"

namespace ndham {

std::vector<PhasePoint> sample_phase_points(std::size_t d, std::size_t count, double box, std::uint64_t seed,
                                            bool complex_p) {
  if (d == 0 || count == 0) throw InvalidArgument("point cloud needs d >= 1 and at least one point");
  if (!(box > 0.0) || !std::isfinite(box)) throw InvalidArgument("box half-width must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-box, box);
  std::vector<PhasePoint> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    PhasePoint z = PhasePoint::zero(d);
    for (auto& q : z.q) q = u(rng);
    for (auto& p : z.p) p = u(rng);
    if (complex_p)
      for (auto& p : z.p) p += Complex(0.0, u(rng));
    pts.push_back(std::move(z));
  }
  return pts;
}

std::vector<PhasePoint> phase_grid(std::size_t d, std::size_t per_axis, double box) {
  if (d == 0 || per_axis < 2) throw InvalidArgument("phase grid needs d >= 1 and at least two nodes per axis");
  if (!(box > 0.0) || !std::isfinite(box)) throw InvalidArgument("box half-width must be positive");
  const UniformGrid axis(-box, box, per_axis);
  std::vector<std::size_t> idx(2 * d, 0);
  std::vector<PhasePoint> pts;
  while (true) {
    PhasePoint z = PhasePoint::zero(d);
    for (std::size_t i = 0; i < d; ++i) {
      z.q[i] = axis.node(idx[i]);
      z.p[i] = axis.node(idx[d + i]);
    }
    pts.push_back(std::move(z));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return pts;
}

// ---------------------------------------------------------------- conditions

HelmholtzReport check_conditions(const PhaseVectorField& field, std::span<const PhasePoint> points, double tol) {
  if (points.empty()) throw InvalidArgument("Helmholtz check needs at least one point");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  HelmholtzReport rep;
  rep.tol = tol;
  rep.worst_point = points.front();
  double worst = -1.0;
  for (const PhasePoint& z : points) {
    JacobianBlocks jb;
    try {
      jb = field.jacobian(z);
    } catch (const NumericalError& e) {
      rep.failures.push_back({z, e.what()});
      continue;
    }
    const double hc1 = (jb.dxq_dq + jb.dxp_dp.transpose()).cwiseAbs().maxCoeff();
    const double hc2 = std::max((jb.dxq_dp - jb.dxq_dp.transpose()).cwiseAbs().maxCoeff(),
                                (jb.dxp_dq - jb.dxp_dq.transpose()).cwiseAbs().maxCoeff());
    for (const auto* m : {&jb.dxq_dq, &jb.dxq_dp, &jb.dxp_dq, &jb.dxp_dp})
      rep.jacobian_scale = std::max(rep.jacobian_scale, m->cwiseAbs().maxCoeff());
    rep.hc1_residual = std::max(rep.hc1_residual, hc1);
    rep.hc2_residual = std::max(rep.hc2_residual, hc2);
    if (std::max(hc1, hc2) > worst) {
      worst = std::max(hc1, hc2);
      rep.worst_point = z;
    }
    ++rep.points_checked;
  }
  if (rep.jacobian_scale > 0.0) {
    rep.hc1_normalized = rep.hc1_residual / rep.jacobian_scale;
    rep.hc2_normalized = rep.hc2_residual / rep.jacobian_scale;
  }
  rep.verdict = rep.failures.empty() && rep.points_checked > 0 && rep.hc1_normalized <= tol &&
                rep.hc2_normalized <= tol;
  return rep;
}

HelmholtzReport check_conditions(const PhaseVectorField& field, const CheckOptions& options) {
  const auto pts = sample_phase_points(field.dim(), options.points, options.box, options.seed, options.complex_p);
  return check_conditions(field, pts, options.tol);
}

// ---------------------------------------------------------------- reconstruction

ReconstructedHamiltonian::ReconstructedHamiltonian(PhaseVectorField field, std::size_t nodes, bool auto_nodes)
    : field_(std::move(field)), nodes_(nodes), auto_(auto_nodes) {
  if (nodes_ == 0 || nodes_ > kMaxReconstructionNodes)
    throw InvalidArgument("quadrature node count must be in [1, " + std::to_string(kMaxReconstructionNodes) + "]");
}

Complex ReconstructedHamiltonian::integrate(const PhasePoint& z, std::size_t nodes) const {
  const std::size_t d = field_.dim();
  const auto flat = z.flat();
  std::vector<Complex> scaled(2 * d);
  std::vector<Complex> x(2 * d);
  auto integrand = [&](double lambda) {
    for (std::size_t j = 0; j < 2 * d; ++j) scaled[j] = lambda * flat[j];
    try {
      field_.evaluate(scaled, x);
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " at lambda = " + format_double(lambda), e.node());
    }
    Complex s{};
    for (std::size_t i = 0; i < d; ++i) s += z.p[i] * x[i] - z.q[i] * x[d + i];
    return s;
  };
  constexpr std::size_t kPanelOrder = 16;
  if (nodes % kPanelOrder == 0) return integrate_gauss_legendre(integrand, 0.0, 1.0, kPanelOrder, nodes / kPanelOrder);
  return integrate_gauss_legendre(integrand, 0.0, 1.0, nodes, 1);
}

ReconstructedHamiltonian::Value ReconstructedHamiltonian::evaluate(const PhasePoint& z) const {
  if (z.dim() != field_.dim()) throw InvalidArgument("phase point dimension mismatch");
  const bool origin = std::all_of(z.q.begin(), z.q.end(), [](Complex c) { return c == Complex{}; }) &&
                      std::all_of(z.p.begin(), z.p.end(), [](Complex c) { return c == Complex{}; });
  if (origin) return {Complex{}, 0};
  Complex h = integrate(z, nodes_);
  if (!auto_) return {h, nodes_};
  std::size_t n = nodes_;
  while (n * 2 <= kMaxReconstructionNodes) {
    n *= 2;
    const Complex next = integrate(z, n);
    const bool settled = std::abs(next - h) < 1e-13;
    h = next;
    if (settled) break;
  }
  return {h, n};
}

ReconstructedHamiltonian reconstruct_hamiltonian(const PhaseVectorField& field, const ReconstructOptions& options) {
  if (!options.force) {
    const HelmholtzReport rep = check_conditions(field, options.check);
    if (!rep.verdict)
      throw NotHamiltonian("field fails the Helmholtz conditions (hc1 = " + format_double(rep.hc1_residual) +
                           ", hc2 = " + format_double(rep.hc2_residual) + ")");
  }
  return ReconstructedHamiltonian(field, options.nodes, options.auto_nodes);
}

// ---------------------------------------------------------------- gradients

namespace {

template <typename Grad>
GradientResiduals gradient_residuals(const PhaseVectorField& field, std::span<const PhasePoint> points, Grad grad) {
  if (points.empty()) throw InvalidArgument("gradient check needs at least one point");
  const std::size_t d = field.dim();
  GradientResiduals rep;
  for (const PhasePoint& z : points) {
    if (z.dim() != d) throw InvalidArgument("phase point dimension mismatch");
    try {
      const std::vector<Complex> g = grad(z);  // [dH/dq..., dH/dp...]
      const auto [xq, xp] = field.evaluate(z);
      for (std::size_t i = 0; i < d; ++i) {
        rep.p_residual = std::max(rep.p_residual, std::abs(g[d + i] - xq[i]));
        rep.q_residual = std::max(rep.q_residual, std::abs(g[i] + xp[i]));
      }
      ++rep.points_checked;
    } catch (const NumericalError& e) {
      rep.failures.push_back({z, e.what()});
    }
  }
  return rep;
}

}  // namespace

GradientResiduals verify_gradients(const ReconstructedHamiltonian& h, const PhaseVectorField& field,
                                   std::span<const PhasePoint> points, double step) {
  if (!(step > 0.0)) throw InvalidArgument("difference step must be positive");
  return gradient_residuals(field, points, [&](const PhasePoint& z) {
    std::vector<Complex> flat = z.flat();
    std::vector<Complex> g(flat.size());
    for (std::size_t j = 0; j < flat.size(); ++j) {
      const Complex keep = flat[j];
      flat[j] = keep + step;
      const Complex up = h(PhasePoint::from_flat(flat));
      flat[j] = keep - step;
      const Complex down = h(PhasePoint::from_flat(flat));
      flat[j] = keep;
      g[j] = (up - down) / (2.0 * step);
    }
    return g;
  });
}

GradientResiduals verify_gradients(const Expr& h, const PhaseVectorField& field, std::span<const PhasePoint> points,
                                   const Constants& constants) {
  const std::size_t d = field.dim();
  SlotMap slots;
  for (std::size_t i = 0; i < d; ++i) {
    slots.emplace(q_name(i), i);
    slots.emplace(p_name(i), d + i);
  }
  const CompiledExpr ch = h.compile(slots, constants);
  std::vector<std::size_t> wrt(2 * d);
  for (std::size_t j = 0; j < wrt.size(); ++j) wrt[j] = j;
  return gradient_residuals(field, points, [&](const PhasePoint& z) {
    const auto flat = z.flat();
    return ch.eval_grad(flat, wrt).partials;
  });
}

}  // namespace ndham
