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

#include "ndham/field.hpp"

#include "ndham/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ndham {

PhasePoint::PhasePoint(std::vector<Complex> q_, std::vector<Complex> p_) : q(std::move(q_)), p(std::move(p_)) {
  if (q.size() != p.size()) throw InvalidArgument("phase point q and p dimensions differ");
}

PhasePoint PhasePoint::zero(std::size_t d) { return PhasePoint(std::vector<Complex>(d), std::vector<Complex>(d)); }

PhasePoint PhasePoint::from_flat(std::span<const Complex> z) {
  if (z.size() % 2 != 0) throw InvalidArgument("flat phase point needs an even length");
  const std::size_t d = z.size() / 2;
  return PhasePoint({z.begin(), z.begin() + static_cast<std::ptrdiff_t>(d)},
                    {z.begin() + static_cast<std::ptrdiff_t>(d), z.end()});
}

std::vector<Complex> PhasePoint::flat() const {
  std::vector<Complex> z(q);
  z.insert(z.end(), p.begin(), p.end());
  return z;
}

std::string q_name(std::size_t i) { return "q" + std::to_string(i + 1); }
std::string p_name(std::size_t i) { return "p" + std::to_string(i + 1); }

// ---------------------------------------------------------------- PhaseVectorField

namespace {

SlotMap phase_slots(std::size_t d) {
  SlotMap slots;
  for (std::size_t i = 0; i < d; ++i) {
    slots.emplace(q_name(i), i);
    slots.emplace(p_name(i), d + i);
  }
  return slots;
}

}  // namespace

PhaseVectorField::PhaseVectorField(std::vector<Expr> xq, std::vector<Expr> xp, Constants constants)
    : xq_(std::move(xq)), xp_(std::move(xp)), constants_(std::move(constants)) {
  const std::size_t d = xq_.size();
  if (d == 0) throw InvalidArgument("vector field dimension must be positive");
  if (xp_.size() != d) throw InvalidArgument("X_q and X_p must have the same number of components");
  const SlotMap slots = phase_slots(d);
  for (const auto& [name, value] : constants_) {
    if (slots.contains(name) || name == "t" || name == "i")
      throw InvalidArgument("constant name '" + name + "' is reserved");
    if (!std::isfinite(value)) throw InvalidArgument("constant '" + name + "' is not finite");
  }
  auto add = [&](const Expr& e, const std::string& label) {
    for (const auto& v : e.variables())
      if (!slots.contains(v) && !constants_.contains(v))
        throw InvalidArgument(label + " references unknown variable '" + v + "'");
    compiled_.push_back(e.compile(slots, constants_));
  };
  for (std::size_t i = 0; i < d; ++i) add(xq_[i], "Xq" + std::to_string(i + 1));
  for (std::size_t i = 0; i < d; ++i) add(xp_[i], "Xp" + std::to_string(i + 1));
}

PhaseVectorField PhaseVectorField::parse(std::span<const std::string> xq, std::span<const std::string> xp,
                                         Constants constants) {
  std::vector<Expr> eq;
  std::vector<Expr> ep;
  for (const auto& s : xq) eq.push_back(Expr::parse(s));
  for (const auto& s : xp) ep.push_back(Expr::parse(s));
  return PhaseVectorField(std::move(eq), std::move(ep), std::move(constants));
}

PhaseVectorField PhaseVectorField::zero(std::size_t d) {
  std::vector<Expr> z(d, Expr::constant(0.0));
  return PhaseVectorField(z, z);
}

void PhaseVectorField::evaluate(std::span<const Complex> z, std::span<Complex> out) const {
  if (z.size() != 2 * dim() || out.size() != 2 * dim()) throw InvalidArgument("phase point dimension mismatch");
  for (std::size_t i = 0; i < compiled_.size(); ++i) out[i] = compiled_[i].eval(z);
}

std::pair<std::vector<Complex>, std::vector<Complex>> PhaseVectorField::evaluate(const PhasePoint& z) const {
  const auto flat = z.flat();
  std::vector<Complex> out(2 * dim());
  evaluate(flat, out);
  const auto d = static_cast<std::ptrdiff_t>(dim());
  return {{out.begin(), out.begin() + d}, {out.begin() + d, out.end()}};
}

Eigen::MatrixXcd PhaseVectorField::jacobian_matrix(std::span<const Complex> z) const {
  const std::size_t n = 2 * dim();
  if (z.size() != n) throw InvalidArgument("phase point dimension mismatch");
  std::vector<std::size_t> wrt(n);
  for (std::size_t j = 0; j < n; ++j) wrt[j] = j;
  Eigen::MatrixXcd jac(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const DualValue d = compiled_[i].eval_grad(z, wrt);
    for (std::size_t j = 0; j < n; ++j) jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d.partials[j];
  }
  return jac;
}

JacobianBlocks PhaseVectorField::jacobian(const PhasePoint& z) const {
  if (z.dim() != dim()) throw InvalidArgument("phase point dimension mismatch");
  const auto full = jacobian_matrix(z.flat());
  const auto d = static_cast<Eigen::Index>(dim());
  return {full.topLeftCorner(d, d), full.topRightCorner(d, d), full.bottomLeftCorner(d, d),
          full.bottomRightCorner(d, d)};
}

bool PhaseVectorField::separable() const {
  const std::size_t d = dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (compiled_[i].reads_slot(j) || compiled_[d + i].reads_slot(d + j)) return false;
  return true;
}

PhaseVectorField PhaseVectorField::scaled(double factor) const {
  auto scale = [&](const std::vector<Expr>& v) {
    std::vector<Expr> out;
    for (const auto& e : v) out.push_back(Expr::binary(BinaryOp::Mul, Expr::constant(factor), e));
    return out;
  };
  return PhaseVectorField(scale(xq_), scale(xp_), constants_);
}

JacobianBlocks jacobian_blocks(const PhaseVectorField& field, const PhasePoint& z) { return field.jacobian(z); }

// ---------------------------------------------------------------- PhasePath

PhasePath::PhasePath(std::vector<SampledPath> q, std::vector<SampledPath> p) : q_(std::move(q)), p_(std::move(p)) {
  if (q_.empty() || q_.size() != p_.size()) throw InvalidArgument("phase path needs d >= 1 matching q and p components");
  const UniformGrid& g = q_.front().grid();
  for (std::size_t i = 0; i < q_.size(); ++i)
    if (!(q_[i].grid() == g) || !(p_[i].grid() == g)) throw InvalidArgument("phase path components use different grids");
}

PhasePath PhasePath::from_states(const UniformGrid& grid, std::span<const PhasePoint> states) {
  if (states.size() != grid.n) throw InvalidArgument("state count does not match grid");
  const std::size_t d = states.front().dim();
  std::vector<std::vector<Complex>> q(d, std::vector<Complex>(grid.n));
  std::vector<std::vector<Complex>> p(d, std::vector<Complex>(grid.n));
  for (std::size_t k = 0; k < grid.n; ++k) {
    if (states[k].dim() != d) throw InvalidArgument("states have different dimensions");
    for (std::size_t i = 0; i < d; ++i) {
      q[i][k] = states[k].q[i];
      p[i][k] = states[k].p[i];
    }
  }
  std::vector<SampledPath> qs;
  std::vector<SampledPath> ps;
  for (std::size_t i = 0; i < d; ++i) {
    qs.emplace_back(grid, std::move(q[i]));
    ps.emplace_back(grid, std::move(p[i]));
  }
  return PhasePath(std::move(qs), std::move(ps));
}

PhasePath PhasePath::from_function(const UniformGrid& grid, const std::function<PhasePoint(double)>& z) {
  std::vector<PhasePoint> states;
  states.reserve(grid.n);
  for (std::size_t k = 0; k < grid.n; ++k) states.push_back(z(grid.node(k)));
  return from_states(grid, states);
}

PhasePoint PhasePath::state(std::size_t k) const {
  PhasePoint z = PhasePoint::zero(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    z.q[i] = q_[i][k];
    z.p[i] = p_[i][k];
  }
  return z;
}

namespace {

UniformGrid window_grid(const UniformGrid& g, std::size_t first, std::size_t count) {
  return UniformGrid(g.node(first), g.node(first + count - 1), count);
}

SampledPath slice(const SampledPath& s, const UniformGrid& sub, std::size_t first) {
  const auto& v = s.values();
  return SampledPath(sub, std::vector<Complex>(v.begin() + static_cast<std::ptrdiff_t>(first),
                                               v.begin() + static_cast<std::ptrdiff_t>(first + sub.n)));
}

}  // namespace

PhasePath PhasePath::window(std::size_t first, std::size_t count) const {
  if (count < 2 || first + count > size()) throw InvalidArgument("window out of range");
  const UniformGrid sub = window_grid(grid(), first, count);
  std::vector<SampledPath> q;
  std::vector<SampledPath> p;
  for (std::size_t i = 0; i < dim(); ++i) {
    q.push_back(slice(q_[i], sub, first));
    p.push_back(slice(p_[i], sub, first));
  }
  return PhasePath(std::move(q), std::move(p));
}

DirectionPair::DirectionPair(PhasePath path) : path_(std::move(path)) {
  const std::size_t last = path_.size() - 1;
  for (std::size_t i = 0; i < path_.dim(); ++i)
    if (path_.q(i)[0] != Complex{} || path_.q(i)[last] != Complex{} || path_.p(i)[0] != Complex{} ||
        path_.p(i)[last] != Complex{})
      throw InvalidArgument("direction pair must vanish at both endpoints");
}

DirectionPair sine_series_directions(const UniformGrid& grid, std::size_t d, std::mt19937_64& rng, double amplitude,
                                     std::size_t modes) {
  std::uniform_real_distribution<double> coef(-amplitude, amplitude);
  auto component = [&] {
    std::vector<double> c(modes);
    for (double& ck : c) ck = coef(rng);
    std::vector<Complex> values(grid.n);
    for (std::size_t k = 1; k + 1 < grid.n; ++k) {
      const double s = (grid.node(k) - grid.a) / (grid.b - grid.a);
      double sum = 0.0;
      for (std::size_t m = 0; m < modes; ++m) sum += c[m] * std::sin(static_cast<double>(m + 1) * std::numbers::pi * s);
      values[k] = sum;
    }
    return SampledPath(grid, std::move(values));
  };
  std::vector<SampledPath> q;
  std::vector<SampledPath> p;
  for (std::size_t i = 0; i < d; ++i) q.push_back(component());
  for (std::size_t i = 0; i < d; ++i) p.push_back(component());
  return DirectionPair(PhasePath(std::move(q), std::move(p)));
}

// ---------------------------------------------------------------- operators

PhasePath quantum_derivative(const PhasePath& path, const DerivativeMode& mode, std::size_t* nonconverged) {
  std::size_t bad = 0;
  auto derive = [&](const SampledPath& s) {
    if (const auto* sp = std::get_if<ScaleParams>(&mode)) return scale_derivative_path(s, *sp);
    const auto& ex = std::get<ExtractedLimit>(mode);
    PathDerivative d = extracted_derivative_path(s, ex.sweep, ex.mu, ex.tol);
    bad += d.nonconverged;
    return d;
  };
  std::vector<SampledPath> q;
  std::vector<SampledPath> p;
  auto wrap = [&](PathDerivative&& d) {
    const UniformGrid sub = window_grid(path.grid(), d.first, d.values.size());
    return SampledPath(sub, std::move(d.values));
  };
  for (std::size_t i = 0; i < path.dim(); ++i) q.push_back(wrap(derive(path.q(i))));
  for (std::size_t i = 0; i < path.dim(); ++i) p.push_back(wrap(derive(path.p(i))));
  if (nonconverged != nullptr) *nonconverged = bad;
  return PhasePath(std::move(q), std::move(p));
}

namespace {

enum class Operator { Frechet, Adjoint };

PhasePath apply_operator(Operator which, const PhaseVectorField& field, const PhasePath& z_path,
                         const DirectionPair& dir, const DerivativeMode& mode) {
  const PhasePath& h = dir.path();
  if (!(z_path.grid() == h.grid())) throw InvalidArgument("trajectory and directions use different grids");
  if (z_path.dim() != field.dim() || h.dim() != field.dim()) throw InvalidArgument("dimension mismatch");
  const std::size_t d = field.dim();
  const PhasePath dh = quantum_derivative(h, mode);
  const std::size_t count = dh.size();
  const std::size_t first = (h.size() - count) / 2;
  std::vector<std::vector<Complex>> out_q(d, std::vector<Complex>(count));
  std::vector<std::vector<Complex>> out_p(d, std::vector<Complex>(count));
  Eigen::VectorXcd a(static_cast<Eigen::Index>(d));
  Eigen::VectorXcd b(static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t node = first + k;
    const JacobianBlocks jb = field.jacobian(z_path.state(node));
    for (std::size_t i = 0; i < d; ++i) {
      a(static_cast<Eigen::Index>(i)) = h.q(i)[node];
      b(static_cast<Eigen::Index>(i)) = h.p(i)[node];
    }
    Eigen::VectorXcd first_row;
    Eigen::VectorXcd second_row;
    if (which == Operator::Frechet) {
      first_row = -(jb.dxq_dq * a) - jb.dxq_dp * b;
      second_row = -(jb.dxp_dq * a) - jb.dxp_dp * b;
    } else {
      first_row = jb.dxp_dp.transpose() * a - jb.dxq_dp.transpose() * b;
      second_row = -(jb.dxp_dq.transpose() * a) + jb.dxq_dq.transpose() * b;
    }
    for (std::size_t i = 0; i < d; ++i) {
      out_q[i][k] = dh.q(i)[k] + first_row(static_cast<Eigen::Index>(i));
      out_p[i][k] = dh.p(i)[k] + second_row(static_cast<Eigen::Index>(i));
    }
  }
  std::vector<SampledPath> q;
  std::vector<SampledPath> p;
  for (std::size_t i = 0; i < d; ++i) {
    q.emplace_back(dh.grid(), std::move(out_q[i]));
    p.emplace_back(dh.grid(), std::move(out_p[i]));
  }
  return PhasePath(std::move(q), std::move(p));
}

}  // namespace

PhasePath frechet_apply(const PhaseVectorField& field, const PhasePath& z_path, const DirectionPair& dir,
                        const DerivativeMode& mode) {
  return apply_operator(Operator::Frechet, field, z_path, dir, mode);
}

PhasePath adjoint_apply(const PhaseVectorField& field, const PhasePath& z_path, const DirectionPair& dir,
                        const DerivativeMode& mode) {
  return apply_operator(Operator::Adjoint, field, z_path, dir, mode);
}

Complex symplectic_inner(const PhasePath& f, const PhasePath& g) {
  if (!(f.grid() == g.grid()) || f.dim() != g.dim()) throw InvalidArgument("symplectic product: grid mismatch");
  std::vector<Complex> pairing(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    Complex s{};
    for (std::size_t i = 0; i < f.dim(); ++i) s += f.q(i)[k] * g.p(i)[k] - f.p(i)[k] * g.q(i)[k];
    pairing[k] = s;
  }
  return trapezoid(pairing, f.grid().step());
}

namespace {

PhasePath difference(const PhasePath& a, const PhasePath& b) {
  std::vector<SampledPath> q;
  std::vector<SampledPath> p;
  auto sub = [](const SampledPath& x, const SampledPath& y) {
    std::vector<Complex> v(x.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = x[k] - y[k];
    return SampledPath(x.grid(), std::move(v));
  };
  for (std::size_t i = 0; i < a.dim(); ++i) {
    q.push_back(sub(a.q(i), b.q(i)));
    p.push_back(sub(a.p(i), b.p(i)));
  }
  return PhasePath(std::move(q), std::move(p));
}

struct TrialDefects {
  double self_adjoint;
  double adjoint_identity;
};

TrialDefects trial_defects(const PhaseVectorField& field, const PhasePath& z_path, const DirectionPair& uv,
                           const DirectionPair& wx, const DerivativeMode& mode) {
  const PhasePath do_uv = frechet_apply(field, z_path, uv, mode);
  const PhasePath dos_uv = adjoint_apply(field, z_path, uv, mode);
  const PhasePath dos_wx = adjoint_apply(field, z_path, wx, mode);
  const std::size_t count = do_uv.size();
  const std::size_t first = (uv.path().size() - count) / 2;
  const PhasePath uv_w = uv.path().window(first, count);
  const PhasePath wx_w = wx.path().window(first, count);
  return {std::abs(symplectic_inner(difference(do_uv, dos_uv), wx_w)),
          std::abs(symplectic_inner(do_uv, wx_w) - symplectic_inner(dos_wx, uv_w))};
}

}  // namespace

SelfAdjointReport self_adjointness_residual(const PhaseVectorField& field, const PhasePath& z_path,
                                            const SelfAdjointOptions& options) {
  if (options.trials == 0) throw InvalidArgument("self-adjointness check needs at least one trial");
  const UniformGrid& grid = z_path.grid();
  const EpsilonSweep sweep = EpsilonSweep::grid(grid.step(), options.multiples);
  const DerivativeMode extracted = ExtractedLimit{sweep, options.mu, options.tol};
  const DerivativeMode fixed = ScaleParams(sweep.smallest(), options.mu);

  SelfAdjointReport rep;
  rep.trials = options.trials;
  rep.seed = options.seed;
  rep.epsilon_min = sweep.smallest();
  const std::size_t margin = options.multiples.front();
  rep.window_lo = grid.node(margin);
  rep.window_hi = grid.node(grid.n - 1 - margin);

  std::mt19937_64 rng(options.seed);
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    const DirectionPair uv = sine_series_directions(grid, field.dim(), rng, options.amplitude, options.modes);
    const DirectionPair wx = sine_series_directions(grid, field.dim(), rng, options.amplitude, options.modes);
    std::size_t bad = 0;
    quantum_derivative(uv.path(), extracted, &bad);
    rep.nonconverged += bad;
    const TrialDefects ex = trial_defects(field, z_path, uv, wx, extracted);
    const TrialDefects fx = trial_defects(field, z_path, uv, wx, fixed);
    rep.residual = std::max(rep.residual, ex.self_adjoint);
    rep.adjoint_identity_residual = std::max(rep.adjoint_identity_residual, ex.adjoint_identity);
    rep.fixed_scale_residual = std::max(rep.fixed_scale_residual, fx.self_adjoint);
    rep.fixed_adjoint_identity_residual = std::max(rep.fixed_adjoint_identity_residual, fx.adjoint_identity);
  }
  return rep;
}

}  // namespace ndham
