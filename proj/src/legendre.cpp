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

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "ndham/helmholtz.hpp"
#include "ndham/report.hpp"

namespace ndham {

SlotMap lagrangian_slots(std::size_t d) {
  SlotMap slots{{"t", 0}};
  for (std::size_t i = 0; i < d; ++i) {
    slots.emplace("x" + std::to_string(i + 1), 1 + i);
    slots.emplace("v" + std::to_string(i + 1), 1 + d + i);
  }
  if (d == 1) {
    slots.emplace("x", 1);
    slots.emplace("v", 2);
  }
  return slots;
}

namespace {

struct Lagrangian {
  CompiledExpr code;
  std::vector<Complex> slots;
  std::vector<std::size_t> v_slots;
  std::size_t d;

  Eigen::VectorXcd grad_v(const Eigen::VectorXcd& v) {
    for (std::size_t i = 0; i < d; ++i) slots[1 + d + i] = v(static_cast<Eigen::Index>(i));
    const DualValue g = code.eval_grad(slots, v_slots);
    Eigen::VectorXcd out(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) out(static_cast<Eigen::Index>(i)) = g.partials[i];
    return out;
  }

  // Central differences of the exact gradient.
  Eigen::MatrixXcd hessian_v(const Eigen::VectorXcd& v) {
    const auto n = static_cast<Eigen::Index>(d);
    Eigen::MatrixXcd h(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double step = 1e-6 * std::max(1.0, std::abs(v(k)));
      Eigen::VectorXcd up = v;
      Eigen::VectorXcd down = v;
      up(k) += step;
      down(k) -= step;
      h.col(k) = (grad_v(up) - grad_v(down)) / (2.0 * step);
    }
    return h;
  }
};

std::string describe(const Eigen::VectorXcd& v) {
  std::ostringstream s;
  s << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s << ", ";
    s << format_double(v(i).real());
    if (v(i).imag() != 0.0) s << (v(i).imag() < 0 ? " - " : " + ") << format_double(std::abs(v(i).imag())) << "i";
  }
  return s.str() + "]";
}

}  // namespace

LegendreResult legendre_transform(const Expr& lagrangian, double t, std::span<const Complex> q,
                                  std::span<const Complex> p, const LegendreOptions& options) {
  const std::size_t d = q.size();
  if (d == 0 || p.size() != d) throw InvalidArgument("Legendre transform needs matching q and p of length >= 1");
  Lagrangian lag{lagrangian.compile(lagrangian_slots(d), options.constants), std::vector<Complex>(1 + 2 * d), {}, d};
  lag.slots[0] = t;
  for (std::size_t i = 0; i < d; ++i) {
    lag.slots[1 + i] = q[i];
    lag.v_slots.push_back(1 + d + i);
  }
  Eigen::VectorXcd target(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) target(static_cast<Eigen::Index>(i)) = p[i];

  auto singular = [&](const Eigen::MatrixXcd& h) {
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(h).singularValues().minCoeff();
  };

  Eigen::VectorXcd v = target;
  Eigen::VectorXcd r = lag.grad_v(v) - target;
  double res = r.cwiseAbs().maxCoeff();
  std::size_t it = 0;
  while (res > options.tol) {
    if (it == options.max_iterations)
      throw ConvergenceError("Legendre Newton iteration did not converge: v = " + describe(v) +
                             ", residual = " + format_double(res));
    const Eigen::MatrixXcd h = lag.hessian_v(v);
    if (singular(h) < options.degeneracy)
      throw LegendreDegenerate("d2L/dv2 is singular at v = " + describe(v));
    const Eigen::VectorXcd step = h.partialPivLu().solve(r);
    double damping = 1.0;
    Eigen::VectorXcd trial = v - step;
    Eigen::VectorXcd r_trial = lag.grad_v(trial) - target;
    for (int halvings = 0; halvings < 30 && !(r_trial.cwiseAbs().maxCoeff() < res); ++halvings) {
      damping *= 0.5;
      trial = v - damping * step;
      r_trial = lag.grad_v(trial) - target;
    }
    v = trial;
    r = r_trial;
    res = r.cwiseAbs().maxCoeff();
    ++it;
  }
  if (singular(lag.hessian_v(v)) < options.degeneracy)
    throw LegendreDegenerate("d2L/dv2 is singular at v = " + describe(v));

  LegendreResult out;
  for (std::size_t i = 0; i < d; ++i) lag.slots[1 + d + i] = v(static_cast<Eigen::Index>(i));
  const Complex l = lag.code.eval(lag.slots);
  Complex pv{};
  for (std::size_t i = 0; i < d; ++i) {
    pv += p[i] * v(static_cast<Eigen::Index>(i));
    out.velocity.push_back(v(static_cast<Eigen::Index>(i)));
  }
  out.hamiltonian = pv - l;
  out.iterations = it;
  out.residual = res;
  return out;
}

}  // namespace ndham
