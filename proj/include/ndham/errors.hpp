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

#ifndef NDHAM_ERRORS_HPP
#define NDHAM_ERRORS_HPP

#include <complex>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>

namespace ndham {

using Complex = std::complex<double>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller input: out-of-range parameters, malformed files, shape mismatches.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Syntax error in an expression. `offset` is the 1-based byte position of the
/// offending token (one past the last byte at end of input).
class ParseError : public InvalidArgument {
 public:
  ParseError(std::size_t offset, std::set<std::string> expected, const std::string& what);

  std::size_t offset() const noexcept { return offset_; }
  const std::set<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::set<std::string> expected_;
};

class UnboundVariable : public InvalidArgument {
 public:
  explicit UnboundVariable(std::string name);
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Numerical failures: the computation was well posed but could not be
/// carried out (domain errors, non-convergence, stencils leaving the domain).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Evaluation hit an invalid argument (division by zero, log(0), ...).
/// `node` is the printed form of the offending subexpression.
class DomainError : public NumericalError {
 public:
  DomainError(const std::string& reason, std::string node);
  const std::string& node() const noexcept { return node_; }

 private:
  std::string node_;
};

/// A finite-difference stencil or integration window left the domain, or an
/// epsilon is not aligned with a sampling grid.
class StencilError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class LegendreDegenerate : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Raised when an operation requiring a Hamiltonian field gets one that fails
/// the integrability conditions.
class NotHamiltonian : public Error {
 public:
  using Error::Error;
};

}  // namespace ndham

#endif  // NDHAM_ERRORS_HPP
