#pragma once

// Gaussian (power 2) correlation under the log10 parameterization
// theta_k = 10^beta_k, plus the spectral and Cholesky machinery the
// likelihood needs.

#include <cstddef>

#include "gpfit/common.hpp"

namespace gpfit {

/// Log10 inverse length-scales, one per input coordinate.
class CorrParams {
 public:
  CorrParams() = default;
  /// Throws DomainError on a non-finite entry.
  explicit CorrParams(Vector beta);

  const Vector& beta() const { return beta_; }
  Index size() const { return beta_.size(); }
  double operator[](Index k) const { return beta_[k]; }
  /// theta_k = 10^beta_k
  double theta(Index k) const;

 private:
  Vector beta_;
};

/// Symmetric correlation matrix with an (optional) nugget on the diagonal.
class CorrMatrix {
 public:
  /// `values` must already carry 1 + nugget on its diagonal.
  CorrMatrix(Matrix values, double nugget);

  const Matrix& values() const { return values_; }
  double nugget() const { return nugget_; }
  Index size() const { return values_.rows(); }

  /// Same correlations with the diagonal reset to exactly 1 + delta.
  CorrMatrix with_nugget(double delta) const;

 private:
  Matrix values_;
  double nugget_ = 0.0;
};

/// Per-coordinate squared differences |x_ik - x_jk|^2 for every pair i < j.
/// The design is fixed during a fit, so this is computed once and reused for
/// every beta the optimizer visits.
class SquaredDistances {
 public:
  explicit SquaredDistances(const DesignMatrix& X);

  Index points() const { return n_; }
  Index dim() const { return d_; }
  /// Row p holds the d squared differences of the p-th pair in (i, j>i) order.
  const Matrix& pairs() const { return pairs_; }

 private:
  Index n_ = 0;
  Index d_ = 0;
  Matrix pairs_;
};

CorrMatrix corr_matrix(const DesignMatrix& X, const CorrParams& beta);
CorrMatrix corr_matrix(const SquaredDistances& dist, const CorrParams& beta);

/// r_i(x*) for every design row; same arithmetic as the rows of corr_matrix.
Vector corr_vector(const DesignMatrix& X, const Vector& xstar, const CorrParams& beta);

/// Eigenvalues of a symmetric matrix, ascending. Cyclic Jacobi carried out in
/// extended precision so that the small end of the spectrum of an
/// ill-conditioned correlation matrix is resolved well below double epsilon.
Vector symmetric_eigenvalues(const Matrix& sym);

struct ConditionInfo {
  double kappa = 1.0;       ///< lambda_max / lambda_min
  double lambda_max = 1.0;  ///< largest eigenvalue (lambda_n in the bound)
  double lambda_min = 1.0;
};

/// L2 condition number of R (its nugget included). Throws ConditioningError
/// when lambda_min <= 1e-15 * lambda_max.
ConditionInfo condition_number(const CorrMatrix& R);

/// Smallest delta with kappa(R + delta I) <= e^a, zero when R already
/// satisfies the threshold:
///
///   delta_lb = max{ lambda_n (kappa - e^a) / (kappa (e^a - 1)), 0 }
///
/// evaluated as (lambda_max - e^a lambda_min) / (e^a - 1), which is the same
/// quantity and stays finite when R is exactly singular (duplicated design
/// rows). The result is rounded up to the next value that survives the
/// addition 1 + delta in double precision, so the diagonal actually stored
/// carries at least the requested nugget.
///
/// `R` must be nugget free. Throws DomainError for a <= 0 and
/// ConditioningError when R is not a usable correlation matrix.
double nugget_lower_bound(const CorrMatrix& R, double a);

/// Lower-triangular L with R_delta = L L^T.
class CholFactor {
 public:
  CholFactor(Matrix lower, double log_det) : lower_(std::move(lower)), log_det_(log_det) {}

  const Matrix& lower() const { return lower_; }
  /// log |R_delta| = 2 sum log L_ii
  double log_det() const { return log_det_; }
  Index size() const { return lower_.rows(); }

 private:
  Matrix lower_;
  double log_det_ = 0.0;
};

/// Throws ConditioningError carrying the failing pivot row when R is not
/// numerically positive definite.
CholFactor cholesky(const CorrMatrix& R);

/// L^{-1} b by forward substitution.
Vector forward_substitute(const CholFactor& F, const Vector& b);

/// R_delta^{-1} B via forward then back substitution.
Vector solve(const CholFactor& F, const Vector& b);
Matrix solve(const CholFactor& F, const Matrix& B);

}  // namespace gpfit
