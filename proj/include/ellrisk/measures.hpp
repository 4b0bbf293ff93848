#pragma once

#include <cstdint>

#include "ellrisk/model.hpp"
#include "ellrisk/rect.hpp"

namespace ellrisk {

// Auto: closed-form constants (normal product rule, Student-t / Pearson VII
// power-law constants, quadrature constants for logistic and Laplace).
// Generic: every constant by quadrature and every rectangle by the generic
// integrator, normal included.
enum class Path { Auto, Generic };

struct MeasureOptions {
  double accuracy = 1e-9;
  std::uint64_t seed = kDefaultSeed;
  Path path = Path::Auto;
};

struct ScalarResult {
  double value = 0.0;
  double error = 0.0;
  double band_prob = 0.0;
};

struct VectorResult {
  Vector value;
  Vector error;
  double band_prob = 0.0;
  double band_prob_error = 0.0;
  bool converged = true;
};

struct MatrixResult {
  Matrix value;
  Matrix error;
  double band_prob = 0.0;
  double band_prob_error = 0.0;
  bool converged = true;
};

// Numerators shared by the first and second truncated moments of the
// standardized vector Y on [eta_p, eta_q]:
//   delta_k       = c_n [ int Gbar(.+eta_pk^2/2) - int Gbar(.+eta_qk^2/2) ] over the other coordinates
//   lambda_diag_k = c_n [ eta_pk int Gbar(.+eta_pk^2/2) - eta_qk int Gbar(.+eta_qk^2/2) ]
struct DeltaLambda {
  Vector delta;
  Vector lambda_diag;
};

struct StandardizedMoments {
  double band_prob = 0.0;
  double band_prob_error = 0.0;
  DeltaLambda numerators;
  Vector mean;        // E[Y | band]
  Vector mean_error;
  Matrix upsilon;     // Cov[Y | band]; empty unless requested
  Matrix upsilon_error;
  bool converged = true;
};

StandardizedMoments standardized_moments(const GeneratorFamily& family, int n, const StandardizedBand& band,
                                         bool with_covariance, const MeasureOptions& options = {});

// Univariate measures; p = 0 and q = 1 stand for the infinite limits.
ScalarResult dte(const EllipticalDist& dist, double p, double q, const MeasureOptions& options = {});
ScalarResult dtv(const EllipticalDist& dist, double p, double q, const MeasureOptions& options = {});

VectorResult standardized_mdte(const EllipticalDist& dist, const StandardizedBand& band,
                               const MeasureOptions& options = {});
VectorResult mdte(const EllipticalDist& dist, const TruncationBand& band, const MeasureOptions& options = {});
MatrixResult mdtcov(const EllipticalDist& dist, const TruncationBand& band, const MeasureOptions& options = {});
MatrixResult mdtcorr(const EllipticalDist& dist, const TruncationBand& band, const MeasureOptions& options = {});
MatrixResult mdtccov(const EllipticalDist& dist, const TruncationBand& band, const MeasureOptions& options = {});
VectorResult mtce(const EllipticalDist& dist, const Vector& p, const MeasureOptions& options = {});
MatrixResult mtcov(const EllipticalDist& dist, const Vector& p, const MeasureOptions& options = {});

struct RiskReport {
  Vector mdte;
  Matrix mdtcov;
  Matrix mdtcorr;
  double band_prob = 0.0;
  struct Diagnostics {
    Vector mdte_error;
    Matrix mdtcov_error;
    Matrix mdtcorr_error;
    double band_prob_error = 0.0;
    bool converged = true;
  } diagnostics;
};

RiskReport risk_report(const EllipticalDist& dist, const TruncationBand& band, const MeasureOptions& options = {});

// Correlation from a covariance estimate; unit diagonal.
MatrixResult correlation_from(const MatrixResult& cov);

}  // namespace ellrisk
