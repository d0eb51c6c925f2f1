// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "invit/core.hpp"

namespace invit {

// Unit-norm amplitude vector.
class StateVector {
 public:
  StateVector() = default;

  // Throws DomainError for a zero or non-finite vector.
  static StateVector normalized(CVector v);
  static StateVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return static_cast<std::size_t>(v_.size()); }
  const CVector& amplitudes() const { return v_; }
  cplx operator[](std::size_t i) const { return v_(static_cast<Eigen::Index>(i)); }

 private:
  explicit StateVector(CVector v) : v_(std::move(v)) {}
  CVector v_;
};

cplx inner(const StateVector& a, const StateVector& b);

// Dense Hermitian matrix with its eigendecomposition computed up front.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  // Throws ValidationError if m is not Hermitian to 1e-12 relative.
  explicit HermitianOperator(const CMatrix& m);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  const RVector& eigenvalues() const { return evals_; }
  const CMatrix& eigenvectors() const { return evecs_; }
  double shift_applied() const { return shift_; }
  // True when the matrix has no imaginary entries.
  bool is_real() const { return real_; }

  double min_eigenvalue() const { return evals_(0); }
  double max_eigenvalue() const { return evals_(evals_.size() - 1); }

  CVector to_eigenbasis(const CVector& v) const { return evecs_.adjoint() * v; }
  CVector from_eigenbasis(const CVector& w) const { return evecs_ * w; }

  double expectation(const StateVector& psi) const;
  CVector apply(const CVector& v) const { return m_ * v; }

  friend HermitianOperator shift(const HermitianOperator& op, double e0);

 private:
  CMatrix m_;
  RVector evals_;
  CMatrix evecs_;
  CMatrix base_m_;
  RVector base_evals_;
  double shift_ = 0.0;
  bool real_ = true;
};

// matrix + e0 I.  Eigenvectors are reused, eigenvalues offset.
HermitianOperator shift(const HermitianOperator& op, double e0);

// lambda_max / lambda_min; DomainError if the spectrum is not positive.
double condition_number(const HermitianOperator& op);

}  // namespace invit
