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

#ifndef NDHAM_HELMHOLTZ_HPP
#define NDHAM_HELMHOLTZ_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ndham/expr.hpp"
#include "ndham/field.hpp"

namespace ndham {

inline constexpr double kDefaultHelmholtzTol = 1e-9;

struct CheckOptions {
  std::size_t points = 256;
  double box = 1.0;
  double tol = kDefaultHelmholtzTol;
  std::uint64_t seed = 0;
  /// Also draw imaginary parts for p.
  bool complex_p = false;
};

/// Seeded uniform cloud in [-box, box]^{2d}.
std::vector<PhasePoint> sample_phase_points(std::size_t d, std::size_t count, double box, std::uint64_t seed,
                                            bool complex_p = false);

/// Tensor grid with `per_axis` nodes per coordinate on [-box, box]^{2d}.
std::vector<PhasePoint> phase_grid(std::size_t d, std::size_t per_axis, double box);

struct PointFailure {
  PhasePoint point;
  std::string reason;
};

struct HelmholtzReport {
  /// max |dXq/dq + (dXp/dp)^T| entry over the points.
  double hc1_residual = 0.0;
  /// max asymmetry entry of dXq/dp and of dXp/dq.
  double hc2_residual = 0.0;
  /// Largest Jacobian entry seen; residuals are divided by it for the verdict.
  double jacobian_scale = 0.0;
  double hc1_normalized = 0.0;
  double hc2_normalized = 0.0;
  double tol = kDefaultHelmholtzTol;
  bool verdict = false;
  std::size_t points_checked = 0;
  PhasePoint worst_point;
  std::vector<PointFailure> failures;
};

/// Points where evaluation fails are listed in `failures` and skipped; any
/// failure makes the verdict false.
HelmholtzReport check_conditions(const PhaseVectorField& field, std::span<const PhasePoint> points,
                                 double tol = kDefaultHelmholtzTol);
HelmholtzReport check_conditions(const PhaseVectorField& field, const CheckOptions& options = {});

struct ReconstructOptions {
  std::size_t nodes = 64;
  /// Double the node count from `nodes` until successive values agree to 1e-13 (cap 1024).
  bool auto_nodes = false;
  /// Skip the Helmholtz gate.
  bool force = false;
  CheckOptions check;
};

/// H(z) = int_0^1 [p . Xq(lambda z) - q . Xp(lambda z)] dlambda, so H(0) = 0.
class ReconstructedHamiltonian {
 public:
  struct Value {
    Complex h;
    std::size_t nodes;
  };

  ReconstructedHamiltonian(PhaseVectorField field, std::size_t nodes, bool auto_nodes);

  const PhaseVectorField& field() const noexcept { return field_; }
  std::size_t quadrature_nodes() const noexcept { return nodes_; }
  bool auto_nodes() const noexcept { return auto_; }

  Complex operator()(const PhasePoint& z) const { return evaluate(z).h; }
  Value evaluate(const PhasePoint& z) const;

 private:
  Complex integrate(const PhasePoint& z, std::size_t nodes) const;

  PhaseVectorField field_;
  std::size_t nodes_;
  bool auto_;
};

inline constexpr std::size_t kMaxReconstructionNodes = 1024;

/// Throws NotHamiltonian when the Helmholtz check fails and `force` is unset.
ReconstructedHamiltonian reconstruct_hamiltonian(const PhaseVectorField& field, const ReconstructOptions& options = {});

struct GradientResiduals {
  double p_residual = 0.0;  ///< max |dH/dp - Xq|
  double q_residual = 0.0;  ///< max |dH/dq + Xp|
  std::size_t points_checked = 0;
  std::vector<PointFailure> failures;
};

/// Central differences with step `step` on the quadrature-defined H.
GradientResiduals verify_gradients(const ReconstructedHamiltonian& h, const PhaseVectorField& field,
                                   std::span<const PhasePoint> points, double step = 1e-6);
/// Exact partials of an expression H over q1..qd, p1..pd and constants.
GradientResiduals verify_gradients(const Expr& h, const PhaseVectorField& field, std::span<const PhasePoint> points,
                                   const Constants& constants = {});

struct LegendreOptions {
  std::size_t max_iterations = 100;
  double tol = 1e-12;
  /// Smallest admissible singular value of d2L/dv2.
  double degeneracy = 1e-8;
  Constants constants;
};

struct LegendreResult {
  Complex hamiltonian;
  std::vector<Complex> velocity;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Solves p = dL/dv for v by damped Newton from v = p and returns p.v - L.
/// L reads t, x1..xd, v1..vd (x and v alone when d = 1).
LegendreResult legendre_transform(const Expr& lagrangian, double t, std::span<const Complex> q,
                                  std::span<const Complex> p, const LegendreOptions& options = {});

/// Slot map used for Lagrangians of dimension d: t, x1..xd, v1..vd.
SlotMap lagrangian_slots(std::size_t d);

}  // namespace ndham

#endif  // NDHAM_HELMHOLTZ_HPP
