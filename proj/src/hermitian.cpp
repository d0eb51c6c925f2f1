// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include "invit/hermitian.hpp"

#include <cmath>
#include <string>

#include "invit/kernels.hpp"

namespace invit {

StateVector StateVector::normalized(CVector v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw DomainError("cannot normalize a zero or non-finite state");
  v /= n;
  return StateVector(std::move(v));
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim)
    throw DomainError("basis index " + std::to_string(index) +
                      " out of range for dimension " + std::to_string(dim));
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(v));
}

cplx inner(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw DomainError("inner product of unequal dimensions");
  return kernels::cdot({a.amplitudes().data(), a.dim()},
                       {b.amplitudes().data(), b.dim()});
}

HermitianOperator::HermitianOperator(const CMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ValidationError("operator matrix must be square and nonempty");
  const double scale = m.norm();
  const double asym = (m - m.adjoint()).norm();
  if (asym > 1e-12 * scale)
    throw ValidationError("matrix is not Hermitian (||M - M^dag|| = " +
                          std::to_string(asym) + ")");
  m_ = 0.5 * (m + m.adjoint());
  real_ = m_.imag().cwiseAbs().maxCoeff() == 0.0;
  if (real_) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_.real());
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_);
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
  }
  base_m_ = m_;
  base_evals_ = evals_;
}

double HermitianOperator::expectation(const StateVector& psi) const {
  if (psi.dim() != dim()) throw DomainError("state/operator dimension mismatch");
  const CVector hv = m_ * psi.amplitudes();
  return psi.amplitudes().dot(hv).real();
}

HermitianOperator shift(const HermitianOperator& op, double e0) {
  HermitianOperator out = op;
  if (e0 == 0.0) return out;
  // Offsets are applied to the unshifted data so that successive shifts
  // compose exactly.
  out.shift_ += e0;
  out.m_ = op.base_m_;
  out.m_.diagonal().array() += out.shift_;
  out.evals_ = op.base_evals_.array() + out.shift_;
  return out;
}

double condition_number(const HermitianOperator& op) {
  if (!(op.min_eigenvalue() > 0.0))
    throw DomainError("condition number needs a positive spectrum; shift the operator first "
                      "(lambda_min = " + std::to_string(op.min_eigenvalue()) + ")");
  return op.max_eigenvalue() / op.min_eigenvalue();
}

}  // namespace invit
