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

#ifndef NDHAM_DYNAMICS_HPP
#define NDHAM_DYNAMICS_HPP

#include <cstddef>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ndham/expr.hpp"
#include "ndham/field.hpp"
#include "ndham/qderiv.hpp"

namespace ndham {

enum class Integrator { Leapfrog, ImplicitMidpoint };

/// Leapfrog for separable fields, implicit midpoint otherwise.
Integrator choose_integrator(const PhaseVectorField& field);

struct MidpointOptions {
  double tol = 1e-13;
  std::size_t max_iterations = 50;
};

/// One step of size dt (negative dt runs backwards).
PhasePoint symplectic_step(const PhaseVectorField& field, const PhasePoint& z, double dt,
                           const MidpointOptions& options = {});

/// Jacobian of the step map at z, assembled by the chain rule from exact field Jacobians.
Eigen::MatrixXcd step_jacobian(const PhaseVectorField& field, const PhasePoint& z, double dt,
                               const MidpointOptions& options = {});

struct Trajectory {
  UniformGrid grid;
  std::vector<PhasePoint> states;
  Integrator integrator = Integrator::Leapfrog;

  PhasePath path() const { return PhasePath::from_states(grid, states); }
};

/// `steps` steps from t = 0. Requires a real initial state; the Helmholtz gate
/// (default options) throws NotHamiltonian unless `force` is set.
Trajectory integrate_symplectic(const PhaseVectorField& field, const PhasePoint& z0, double dt, std::size_t steps,
                                bool force = false, const MidpointOptions& options = {});

void write_trajectory_csv(std::ostream& out, const PhasePath& path);

struct NdHamiltonReport {
  double q_residual = 0.0;  ///< max |<box q> - Xq(z)| over converged nodes
  double p_residual = 0.0;  ///< max |<box p> - Xp(z)|
  std::size_t points = 0;
  std::size_t nonconverged = 0;  ///< nodes with at least one failed extraction
  bool flagged = false;          ///< more than half of the nodes failed
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::vector<double> epsilons;
  std::vector<double> q_residual_fixed;  ///< per epsilon, without extraction
  std::vector<double> p_residual_fixed;
};

NdHamiltonReport nd_hamilton_residual(const PhaseVectorField& field, const PhasePath& trajectory,
                                      const EpsilonSweep& sweep, Mu mu = Mu::One,
                                      double tol = kDefaultExtractionTol);

using HamiltonianFn = std::function<Complex(const PhasePoint&)>;

struct EmbeddedFunctionalReport {
  Complex fixed_value;  ///< at sp.epsilon over [a + eps, b - eps]
  double epsilon = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::vector<double> epsilons;
  std::vector<Complex> values;  ///< one per sweep entry, each over its own window
  ExtractionResult extracted;
};

/// Trapezoid quadrature of p . box q - H(q, p) over [a + eps, b - eps].
EmbeddedFunctionalReport embedded_functional(const HamiltonianFn& h, const PhasePath& trajectory,
                                             const ScaleParams& sp, const EpsilonSweep& sweep,
                                             double tol = kDefaultExtractionTol);

struct ElReport {
  double residual = 0.0;
  std::size_t points = 0;
  std::size_t nonconverged = 0;
  bool flagged = false;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double worst_t = 0.0;
};

/// max |<box/box t [dL/dv(t, x, <box x>)]> - dL/dx(t, x, <box x>)| over nodes where
/// both the inner and the outer extraction converged. L reads t, x1..xd, v1..vd.
ElReport el_residual(const Expr& lagrangian, std::span<const SampledPath> path, const EpsilonSweep& sweep,
                     Mu mu = Mu::One, double tol = kDefaultExtractionTol, const Constants& constants = {});
ElReport el_residual(const Expr& lagrangian, const SampledPath& path, const EpsilonSweep& sweep, Mu mu = Mu::One,
                     double tol = kDefaultExtractionTol, const Constants& constants = {});

}  // namespace ndham

#endif  // NDHAM_DYNAMICS_HPP
