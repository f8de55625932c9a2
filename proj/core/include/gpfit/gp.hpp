#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gpfit/common.hpp"
#include "gpfit/design.hpp"
#include "gpfit/kernel.hpp"
#include "gpfit/optimizer.hpp"

namespace gpfit {

/// Conservative default for the exponent a in kappa(R) <= e^a.
inline constexpr double kDefaultNuggetThreshold = 20.0;

struct MuSigma {
  double mu = 0.0;
  double sigma2 = 0.0;
};

/// Generalized least squares mean and the profile variance:
///   mu     = (1' R^-1 1)^-1 1' R^-1 Y
///   sigma2 = (Y - 1 mu)' R^-1 (Y - 1 mu) / n
MuSigma mu_sigma_hat(const CholFactor& F, const Vector& Y);

/// Deviance (negative twice the profile log-likelihood, up to a constant):
///   log|R_dlb| + n log[(Y - 1 mu)' R_dlb^-1 (Y - 1 mu)]
/// with delta_lb recomputed at this beta. Throws DegenerateOutputError for
/// constant Y and ConditioningError if R_dlb cannot be factored.
double deviance(const CorrParams& beta, const DesignMatrix& X, const Vector& Y, double a);

/// deviance() bound to one data set, with the pairwise squared distances
/// computed once.
class DevianceFunction {
 public:
  DevianceFunction(const DesignMatrix& X, Vector Y, double a);
  double operator()(const Vector& beta) const;
  double operator()(const CorrParams& beta) const;

 private:
  SquaredDistances dist_;
  Vector Y_;
  double a_;
};

/// Fitted emulator at fixed beta. Immutable; the training factor and the
/// vectors reused by every prediction are computed at construction.
class GpModel {
 public:
  /// Recomputes mu, sigma^2, delta_lb and the deviance at beta.
  static GpModel at(DesignMatrix X, Vector Y, CorrParams beta, double nug_thres);

  /// Rebuilds a model from persisted estimates without re-estimating them;
  /// the factor is recomputed at the stored delta_lb.
  static GpModel restore(DesignMatrix X, Vector Y, CorrParams beta, double nug_thres, double mu_hat,
                         double sigma2_hat, double delta_lb, double deviance_at_fit);

  const DesignMatrix& X() const { return X_; }
  const Vector& Y() const { return Y_; }
  const CorrParams& beta_hat() const { return beta_; }
  double mu_hat() const { return mu_; }
  double sigma2_hat() const { return sigma2_; }
  double delta_lb() const { return delta_; }
  double nug_thres() const { return nug_thres_; }
  double deviance_at_fit() const { return deviance_; }
  Index n() const { return X_.rows(); }
  Index d() const { return X_.cols(); }

  const CholFactor& factor() const { return factor_; }
  /// L^-1 1
  const Vector& whitened_ones() const { return w_; }
  /// L^-1 (Y - 1 mu)
  const Vector& whitened_residual() const { return u_; }

 private:
  GpModel(DesignMatrix X, Vector Y, CorrParams beta, double nug_thres, double delta, CholFactor factor);

  DesignMatrix X_;
  Vector Y_;
  CorrParams beta_;
  double nug_thres_ = kDefaultNuggetThreshold;
  double mu_ = 0.0;
  double sigma2_ = 0.0;
  double delta_ = 0.0;
  double deviance_ = 0.0;
  CholFactor factor_;
  Vector w_;
  Vector u_;
};

/// Optimizer provenance of a fit. Objective values recorded here are
/// deviances of the standardized outputs (Y - Y_1) / max|Y - Y_1|, which
/// differ from deviance(beta, X, Y, a) by the constant n log(max|Y - Y_1|^2).
using FitReport = MultistartReport;

struct FitOptions {
  /// Defaults to MultistartPlan::defaults(d).
  std::optional<MultistartPlan> plan;
  double nug_thres = kDefaultNuggetThreshold;
  std::uint64_t seed = 0;
  /// Per-run optimizer summaries go here when set.
  std::ostream* trace = nullptr;
};

struct FitResult {
  GpModel model;
  FitReport report;
  std::vector<std::string> warnings;
};

/// Maximum-likelihood fit of beta by multi-start L-BFGS-B on the deviance.
/// X must lie in [0,1]^d (DomainError otherwise) and Y must not be constant
/// (DegenerateOutputError). Fewer than d + 2 points or duplicated rows only
/// produce warnings.
FitResult fit(const DesignMatrix& X, const Vector& Y, const FitOptions& options = {});

struct Prediction {
  Vector y_hat;
  Vector mse;
  DesignMatrix inputs;
  /// Entries of mse that came out slightly negative and were set to 0.
  std::size_t clamped = 0;
  /// Query rows with a coordinate outside [0, 1].
  std::size_t extrapolated = 0;
};

/// BLUP and its mean squared error with R replaced by R_dlb:
///   y(x*)  = mu + r' R^-1 (Y - 1 mu)
///   s2(x*) = sigma2 (1 - r' R^-1 r + (1 - 1' R^-1 r)^2 / (1' R^-1 1))
Prediction predict(const GpModel& model, const DesignMatrix& xnew);
/// Predictions at the training design.
Prediction predict(const GpModel& model);

/// Regular grid over `range` (d = 1: resolution points; d = 2: resolution^2
/// points with the first coordinate varying slowest). Throws UnsupportedError
/// for d > 2 and DomainError for resolution < 2.
Prediction grid_predict(const GpModel& model, const Box& range, std::size_t resolution);

/// Printable model summary (n, d, correlation family, beta_hat, sigma^2_hat,
/// delta_lb, threshold) with `digits` significant digits.
std::string format_summary(const GpModel& model, int digits = 4);

}  // namespace gpfit
