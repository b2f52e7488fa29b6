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

#ifndef NDHAM_FIELD_HPP
#define NDHAM_FIELD_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ndham/expr.hpp"
#include "ndham/qderiv.hpp"
#include "ndham/signals.hpp"

namespace ndham {

/// z = (q, p) with q, p in C^d.
struct PhasePoint {
  std::vector<Complex> q;
  std::vector<Complex> p;

  PhasePoint() = default;
  PhasePoint(std::vector<Complex> q_, std::vector<Complex> p_);
  static PhasePoint zero(std::size_t d);
  /// Splits [q1..qd, p1..pd].
  static PhasePoint from_flat(std::span<const Complex> z);

  std::size_t dim() const noexcept { return q.size(); }
  std::vector<Complex> flat() const;
};

struct JacobianBlocks {
  Eigen::MatrixXcd dxq_dq;  ///< (i, j) = dXq_i / dq_j
  Eigen::MatrixXcd dxq_dp;
  Eigen::MatrixXcd dxp_dq;
  Eigen::MatrixXcd dxp_dp;
};

std::string q_name(std::size_t i);  ///< "q1", "q2", ... (0-based i)
std::string p_name(std::size_t i);

/// Time-independent phase-space vector field X = (X_q, X_p) given by
/// expressions in q1..qd, p1..pd and named real constants.
class PhaseVectorField {
 public:
  PhaseVectorField(std::vector<Expr> xq, std::vector<Expr> xp, Constants constants = {});

  static PhaseVectorField parse(std::span<const std::string> xq, std::span<const std::string> xp,
                                Constants constants = {});
  static PhaseVectorField zero(std::size_t d);

  std::size_t dim() const noexcept { return xq_.size(); }
  const std::vector<Expr>& xq() const noexcept { return xq_; }
  const std::vector<Expr>& xp() const noexcept { return xp_; }
  const Constants& constants() const noexcept { return constants_; }

  /// Writes [X_q(z), X_p(z)] for z = [q, p] flattened.
  void evaluate(std::span<const Complex> z, std::span<Complex> out) const;
  std::pair<std::vector<Complex>, std::vector<Complex>> evaluate(const PhasePoint& z) const;

  JacobianBlocks jacobian(const PhasePoint& z) const;
  /// Full 2d x 2d Jacobian of z -> X(z).
  Eigen::MatrixXcd jacobian_matrix(std::span<const Complex> z) const;

  /// X_q reads no q and X_p reads no p.
  bool separable() const;

  PhaseVectorField scaled(double factor) const;

 private:
  std::vector<Expr> xq_;
  std::vector<Expr> xp_;
  Constants constants_;
  std::vector<CompiledExpr> compiled_;
};

JacobianBlocks jacobian_blocks(const PhaseVectorField& field, const PhasePoint& z);

/// Field definition file: `d = <int>`, `const <name> = <real>`, `Xq<i> = <expr>`,
/// `Xp<i> = <expr>`; `#` starts a comment.
PhaseVectorField parse_field_file(std::istream& in);
PhaseVectorField load_field_file(const std::string& path);

/// A d-dimensional phase-space path sampled on a shared uniform grid.
class PhasePath {
 public:
  PhasePath(std::vector<SampledPath> q, std::vector<SampledPath> p);

  static PhasePath from_states(const UniformGrid& grid, std::span<const PhasePoint> states);
  static PhasePath from_function(const UniformGrid& grid, const std::function<PhasePoint(double)>& z);

  const UniformGrid& grid() const noexcept { return q_.front().grid(); }
  std::size_t dim() const noexcept { return q_.size(); }
  std::size_t size() const noexcept { return q_.front().size(); }
  const SampledPath& q(std::size_t i) const { return q_.at(i); }
  const SampledPath& p(std::size_t i) const { return p_.at(i); }
  PhasePoint state(std::size_t k) const;

  /// Nodes [first, first + count) as a path on the matching sub-grid.
  PhasePath window(std::size_t first, std::size_t count) const;

 private:
  std::vector<SampledPath> q_;
  std::vector<SampledPath> p_;
};

/// Test directions (u, v) vanishing exactly at both endpoint nodes.
class DirectionPair {
 public:
  explicit DirectionPair(PhasePath path);
  const PhasePath& path() const noexcept { return path_; }

 private:
  PhasePath path_;
};

/// Truncated sine series sum_{k=1..modes} c_k sin(k pi (t - a)/(b - a)) per
/// component with c_k uniform in [-amplitude, amplitude].
DirectionPair sine_series_directions(const UniformGrid& grid, std::size_t d, std::mt19937_64& rng,
                                     double amplitude = 1.0, std::size_t modes = 8);

/// Extraction of the epsilon -> 0 limit over a sweep of grid-aligned scales.
struct ExtractedLimit {
  EpsilonSweep sweep;
  Mu mu = Mu::One;
  double tol = kDefaultExtractionTol;
};

/// Either a fixed scale or the extracted limit.
using DerivativeMode = std::variant<ScaleParams, ExtractedLimit>;

/// Quantum derivative of every component on the interior window.
PhasePath quantum_derivative(const PhasePath& path, const DerivativeMode& mode, std::size_t* nonconverged = nullptr);

/// (box u - dXq/dq u - dXq/dp v, box v - dXp/dq u - dXp/dp v) on the interior window.
PhasePath frechet_apply(const PhaseVectorField& field, const PhasePath& z_path, const DirectionPair& dir,
                        const DerivativeMode& mode);

/// (box w + dXp/dp^T w - dXq/dp^T x, box x - dXp/dq^T w + dXq/dq^T x) on the interior window.
PhasePath adjoint_apply(const PhaseVectorField& field, const PhasePath& z_path, const DirectionPair& dir,
                        const DerivativeMode& mode);

/// Trapezoid quadrature of <F(t), J G(t)> = F_q . G_p - F_p . G_q (bilinear,
/// no conjugation).
Complex symplectic_inner(const PhasePath& f, const PhasePath& g);

struct SelfAdjointOptions {
  std::size_t trials = 16;
  std::uint64_t seed = 0;
  double amplitude = 1.0;
  std::size_t modes = 8;
  std::vector<std::size_t> multiples{8, 4, 2, 1};
  Mu mu = Mu::One;
  double tol = kDefaultExtractionTol;
};

struct SelfAdjointReport {
  /// max over trials of |<(DO - DO*)(u,v), (w,x)>| with extracted derivatives.
  double residual = 0.0;
  /// Same at the fixed smallest scale.
  double fixed_scale_residual = 0.0;
  /// max |<DO(u,v),(w,x)> - <DO*(w,x),(u,v)>|: integration-by-parts defect,
  /// extracted and fixed-scale. Diagnostic only.
  double adjoint_identity_residual = 0.0;
  double fixed_adjoint_identity_residual = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double epsilon_min = 0.0;
  std::size_t nonconverged = 0;
};

SelfAdjointReport self_adjointness_residual(const PhaseVectorField& field, const PhasePath& z_path,
                                            const SelfAdjointOptions& options = {});

}  // namespace ndham

#endif  // NDHAM_FIELD_HPP
