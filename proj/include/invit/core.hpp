// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace invit {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Chemical precision, in Hartree.
inline constexpr double kChemicalPrecision = 1.6e-3;

// Base class; the subclasses map onto CLI exit codes and test expectations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument value outside the operation's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input structurally fine but inconsistent (bad config, non-eigenstate, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Requested object too large for dense treatment.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class IllConditionedError : public Error {
 public:
  using Error::Error;
};

class DegenerateGapError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace invit
