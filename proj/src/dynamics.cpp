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

#include "ndham/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "ndham/helmholtz.hpp"
#include "ndham/quadrature.hpp"
#include "ndham/report.hpp"

namespace ndham {

Integrator choose_integrator(const PhaseVectorField& field) {
  return field.separable() ? Integrator::Leapfrog : Integrator::ImplicitMidpoint;
}

namespace {

using Vec = std::vector<Complex>;

Vec eval_field(const PhaseVectorField& field, const Vec& z) {
  Vec out(z.size());
  field.evaluate(z, out);
  return out;
}

void require_finite(const Vec& z) {
  for (const Complex& c : z)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw NumericalError("integration produced a non-finite state");
}

// Kick-drift-kick. X_p reads only q and X_q reads only p, so each half
// updates one block with the other held fixed.
Vec leapfrog(const PhaseVectorField& field, Vec z, double dt) {
  const std::size_t d = field.dim();
  Vec x = eval_field(field, z);
  for (std::size_t i = 0; i < d; ++i) z[d + i] += 0.5 * dt * x[d + i];
  x = eval_field(field, z);
  for (std::size_t i = 0; i < d; ++i) z[i] += dt * x[i];
  x = eval_field(field, z);
  for (std::size_t i = 0; i < d; ++i) z[d + i] += 0.5 * dt * x[d + i];
  return z;
}

// z' = z + dt X((z + z') / 2) by fixed-point iteration.
Vec midpoint(const PhaseVectorField& field, const Vec& z, double dt, const MidpointOptions& options) {
  Vec next = z;
  Vec mid(z.size());
  const Vec x0 = eval_field(field, z);
  for (std::size_t j = 0; j < z.size(); ++j) next[j] = z[j] + dt * x0[j];
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    for (std::size_t j = 0; j < z.size(); ++j) mid[j] = 0.5 * (z[j] + next[j]);
    const Vec x = eval_field(field, mid);
    double change = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      const Complex updated = z[j] + dt * x[j];
      change = std::max(change, std::abs(updated - next[j]));
      next[j] = updated;
    }
    if (change <= options.tol) return next;
  }
  throw ConvergenceError("implicit midpoint iteration did not converge in " + std::to_string(options.max_iterations) +
                         " iterations");
}

}  // namespace

PhasePoint symplectic_step(const PhaseVectorField& field, const PhasePoint& z, double dt,
                           const MidpointOptions& options) {
  if (z.dim() != field.dim()) throw InvalidArgument("phase point dimension mismatch");
  if (!std::isfinite(dt) || dt == 0.0) throw InvalidArgument("time step must be finite and nonzero");
  Vec next = choose_integrator(field) == Integrator::Leapfrog ? leapfrog(field, z.flat(), dt)
                                                              : midpoint(field, z.flat(), dt, options);
  require_finite(next);
  return PhasePoint::from_flat(next);
}

Eigen::MatrixXcd step_jacobian(const PhaseVectorField& field, const PhasePoint& z, double dt,
                               const MidpointOptions& options) {
  const std::size_t d = field.dim();
  const auto n = static_cast<Eigen::Index>(2 * d);
  const auto dd = static_cast<Eigen::Index>(d);
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);
  if (choose_integrator(field) == Integrator::ImplicitMidpoint) {
    const Vec next = midpoint(field, z.flat(), dt, options);
    Vec mid(next.size());
    const Vec flat = z.flat();
    for (std::size_t j = 0; j < mid.size(); ++j) mid[j] = 0.5 * (flat[j] + next[j]);
    const Eigen::MatrixXcd a = field.jacobian_matrix(mid);
    return (eye - 0.5 * dt * a).partialPivLu().solve(eye + 0.5 * dt * a);
  }
  // Each sub-step moves one block by dt_k * X_block(z); its Jacobian is the
  // identity plus dt_k times the matching rows of the field Jacobian.
  auto substep = [&](const Vec& at, double h, bool p_block) {
    const Eigen::MatrixXcd a = field.jacobian_matrix(at);
    Eigen::MatrixXcd m = eye;
    if (p_block)
      m.bottomRows(dd) += h * a.bottomRows(dd);
    else
      m.topRows(dd) += h * a.topRows(dd);
    return m;
  };
  Vec s = z.flat();
  const Eigen::MatrixXcd k1 = substep(s, 0.5 * dt, true);
  Vec x = eval_field(field, s);
  for (std::size_t i = 0; i < d; ++i) s[d + i] += 0.5 * dt * x[d + i];
  const Eigen::MatrixXcd dr = substep(s, dt, false);
  x = eval_field(field, s);
  for (std::size_t i = 0; i < d; ++i) s[i] += dt * x[i];
  const Eigen::MatrixXcd k2 = substep(s, 0.5 * dt, true);
  return k2 * dr * k1;
}

Trajectory integrate_symplectic(const PhaseVectorField& field, const PhasePoint& z0, double dt, std::size_t steps,
                                bool force, const MidpointOptions& options) {
  if (z0.dim() != field.dim()) throw InvalidArgument("initial state dimension mismatch");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (steps == 0) throw InvalidArgument("steps must be positive");
  for (const Complex& c : z0.flat())
    if (c.imag() != 0.0) throw InvalidArgument("initial state must be real");
  if (!force) {
    const HelmholtzReport rep = check_conditions(field);
    if (!rep.verdict) throw NotHamiltonian("symplectic integration needs a field that passes the Helmholtz check");
  }
  Trajectory traj;
  traj.grid = UniformGrid(0.0, dt * static_cast<double>(steps), steps + 1);
  traj.integrator = choose_integrator(field);
  traj.states.reserve(steps + 1);
  traj.states.push_back(z0);
  for (std::size_t k = 0; k < steps; ++k) traj.states.push_back(symplectic_step(field, traj.states.back(), dt, options));
  return traj;
}

void write_trajectory_csv(std::ostream& out, const PhasePath& path) {
  const std::size_t d = path.dim();
  bool imag = false;
  for (std::size_t i = 0; i < d && !imag; ++i)
    for (std::size_t k = 0; k < path.size() && !imag; ++k)
      imag = path.q(i)[k].imag() != 0.0 || path.p(i)[k].imag() != 0.0;
  out << "t";
  for (std::size_t i = 0; i < d; ++i) out << "," << q_name(i);
  for (std::size_t i = 0; i < d; ++i) out << "," << p_name(i);
  if (imag) {
    for (std::size_t i = 0; i < d; ++i) out << "," << q_name(i) << "_im";
    for (std::size_t i = 0; i < d; ++i) out << "," << p_name(i) << "_im";
  }
  out << "\n";
  for (std::size_t k = 0; k < path.size(); ++k) {
    out << format_double(path.grid().node(k));
    for (std::size_t i = 0; i < d; ++i) out << "," << format_double(path.q(i)[k].real());
    for (std::size_t i = 0; i < d; ++i) out << "," << format_double(path.p(i)[k].real());
    if (imag) {
      for (std::size_t i = 0; i < d; ++i) out << "," << format_double(path.q(i)[k].imag());
      for (std::size_t i = 0; i < d; ++i) out << "," << format_double(path.p(i)[k].imag());
    }
    out << "\n";
  }
}

// ---------------------------------------------------------------- residuals

NdHamiltonReport nd_hamilton_residual(const PhaseVectorField& field, const PhasePath& trajectory,
                                      const EpsilonSweep& sweep, Mu mu, double tol) {
  if (trajectory.dim() != field.dim()) throw InvalidArgument("trajectory dimension mismatch");
  const std::size_t d = field.dim();
  const UniformGrid& grid = trajectory.grid();
  std::vector<PathDerivative> dq;
  std::vector<PathDerivative> dp;
  for (std::size_t i = 0; i < d; ++i) {
    dq.push_back(extracted_derivative_path(trajectory.q(i), sweep, mu, tol));
    dp.push_back(extracted_derivative_path(trajectory.p(i), sweep, mu, tol));
  }
  const std::size_t first = dq.front().first;
  const std::size_t count = dq.front().values.size();

  NdHamiltonReport rep;
  rep.window_lo = grid.node(first);
  rep.window_hi = grid.node(first + count - 1);
  rep.epsilons = sweep.values();
  rep.q_residual_fixed.assign(sweep.size(), 0.0);
  rep.p_residual_fixed.assign(sweep.size(), 0.0);
  std::vector<std::size_t> multiples;
  for (double e : sweep.values()) multiples.push_back(grid_multiple(grid, e));

  double q_all = 0.0;
  double p_all = 0.0;
  std::vector<Complex> z(2 * d);
  std::vector<Complex> x(2 * d);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t node = first + k;
    for (std::size_t i = 0; i < d; ++i) {
      z[i] = trajectory.q(i)[node];
      z[d + i] = trajectory.p(i)[node];
    }
    field.evaluate(z, x);
    bool ok = true;
    double qr = 0.0;
    double pr = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      ok = ok && dq[i].converged[k] && dp[i].converged[k];
      qr = std::max(qr, std::abs(dq[i].values[k] - x[i]));
      pr = std::max(pr, std::abs(dp[i].values[k] - x[d + i]));
      for (std::size_t s = 0; s < multiples.size(); ++s) {
        rep.q_residual_fixed[s] =
            std::max(rep.q_residual_fixed[s], std::abs(scale_derivative(trajectory.q(i), node, multiples[s], mu) - x[i]));
        rep.p_residual_fixed[s] = std::max(
            rep.p_residual_fixed[s], std::abs(scale_derivative(trajectory.p(i), node, multiples[s], mu) - x[d + i]));
      }
    }
    q_all = std::max(q_all, qr);
    p_all = std::max(p_all, pr);
    ++rep.points;
    if (!ok) {
      ++rep.nonconverged;
      continue;
    }
    rep.q_residual = std::max(rep.q_residual, qr);
    rep.p_residual = std::max(rep.p_residual, pr);
  }
  rep.flagged = 2 * rep.nonconverged > rep.points;
  if (rep.nonconverged == rep.points) {
    // Nothing trustworthy; report the raw fitted values, flagged.
    rep.q_residual = q_all;
    rep.p_residual = p_all;
  }
  return rep;
}

EmbeddedFunctionalReport embedded_functional(const HamiltonianFn& h, const PhasePath& trajectory,
                                             const ScaleParams& sp, const EpsilonSweep& sweep, double tol) {
  const UniformGrid& grid = trajectory.grid();
  const std::size_t d = trajectory.dim();
  auto integral = [&](std::size_t m, Mu mu) {
    if (2 * m + 1 >= grid.n) throw StencilError("epsilon leaves an empty window");
    std::vector<Complex> integrand;
    integrand.reserve(grid.n - 2 * m);
    for (std::size_t k = m; k + m < grid.n; ++k) {
      Complex s{};
      for (std::size_t i = 0; i < d; ++i) s += trajectory.p(i)[k] * scale_derivative(trajectory.q(i), k, m, mu);
      integrand.push_back(s - h(trajectory.state(k)));
    }
    return trapezoid(integrand, grid.step());
  };
  EmbeddedFunctionalReport rep;
  const std::size_t m = grid_multiple(grid, sp.epsilon());
  rep.epsilon = sp.epsilon();
  rep.fixed_value = integral(m, sp.mu());
  rep.window_lo = grid.node(m);
  rep.window_hi = grid.node(grid.n - 1 - m);
  rep.epsilons = sweep.values();
  for (double e : sweep.values()) rep.values.push_back(integral(grid_multiple(grid, e), sp.mu()));
  rep.extracted = extract(EpsilonFamily{rep.epsilons, rep.values}, tol);
  return rep;
}

ElReport el_residual(const Expr& lagrangian, std::span<const SampledPath> path, const EpsilonSweep& sweep, Mu mu,
                     double tol, const Constants& constants) {
  const std::size_t d = path.size();
  if (d == 0) throw InvalidArgument("Euler-Lagrange residual needs at least one path component");
  const UniformGrid& grid = path.front().grid();
  for (const auto& c : path)
    if (!(c.grid() == grid)) throw InvalidArgument("path components use different grids");
  const CompiledExpr code = lagrangian.compile(lagrangian_slots(d), constants);
  std::vector<std::size_t> x_slots(d);
  std::vector<std::size_t> v_slots(d);
  for (std::size_t i = 0; i < d; ++i) {
    x_slots[i] = 1 + i;
    v_slots[i] = 1 + d + i;
  }

  // Inner: <box x> on [M, n-1-M].
  std::vector<PathDerivative> inner;
  for (const auto& c : path) inner.push_back(extracted_derivative_path(c, sweep, mu, tol));
  const std::size_t m = inner.front().first;
  const std::size_t count = inner.front().values.size();
  if (count <= 2 * m) throw StencilError("epsilon sweep leaves no window for the nested derivative");
  const UniformGrid inner_grid(grid.node(m), grid.node(m + count - 1), count);

  std::vector<Complex> slots(1 + 2 * d);
  auto bind = [&](std::size_t node, std::size_t k) {
    slots[0] = grid.node(node);
    for (std::size_t i = 0; i < d; ++i) {
      slots[1 + i] = path[i][node];
      slots[1 + d + i] = inner[i].values[k];
    }
  };
  std::vector<std::vector<Complex>> momentum(d, std::vector<Complex>(count));
  for (std::size_t k = 0; k < count; ++k) {
    bind(m + k, k);
    const DualValue g = code.eval_grad(slots, v_slots);
    for (std::size_t i = 0; i < d; ++i) momentum[i][k] = g.partials[i];
  }

  // Outer: <box P> on [2M, n-1-2M].
  std::vector<PathDerivative> outer;
  for (std::size_t i = 0; i < d; ++i)
    outer.push_back(extracted_derivative_path(SampledPath(inner_grid, momentum[i]), sweep, mu, tol));
  const std::size_t first = outer.front().first;  // relative to the inner grid
  const std::size_t outer_count = outer.front().values.size();

  ElReport rep;
  rep.window_lo = inner_grid.node(first);
  rep.window_hi = inner_grid.node(first + outer_count - 1);
  double worst = -1.0;
  for (std::size_t k = 0; k < outer_count; ++k) {
    const std::size_t ik = first + k;
    const std::size_t node = m + ik;
    bool ok = true;
    for (std::size_t i = 0; i < d; ++i) ok = ok && inner[i].converged[ik] && outer[i].converged[k];
    ++rep.points;
    if (!ok) {
      ++rep.nonconverged;
      continue;
    }
    bind(node, ik);
    const DualValue g = code.eval_grad(slots, x_slots);
    double r = 0.0;
    for (std::size_t i = 0; i < d; ++i) r = std::max(r, std::abs(outer[i].values[k] - g.partials[i]));
    if (r > worst) {
      worst = r;
      rep.worst_t = grid.node(node);
    }
  }
  rep.residual = std::max(worst, 0.0);
  rep.flagged = 2 * rep.nonconverged > rep.points;
  if (rep.nonconverged == rep.points) throw ConvergenceError("no node of the Euler-Lagrange check converged");
  return rep;
}

ElReport el_residual(const Expr& lagrangian, const SampledPath& path, const EpsilonSweep& sweep, Mu mu, double tol,
                     const Constants& constants) {
  return el_residual(lagrangian, std::span<const SampledPath>(&path, 1), sweep, mu, tol, constants);
}

}  // namespace ndham
