#pragma once

#include <Eigen/Dense>

#include "ellrisk/generators.hpp"

namespace ellrisk {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Location mu, SPD scale sigma and a density generator family. Immutable; the
// symmetric square root and its inverse are computed once at construction.
class EllipticalDist {
 public:
  EllipticalDist(Vector mu, Matrix sigma, GeneratorFamily family);

  int dim() const { return static_cast<int>(mu_.size()); }
  const Vector& mu() const { return mu_; }
  const Matrix& sigma() const { return sigma_; }
  const GeneratorFamily& family() const { return family_; }
  const Matrix& sqrt_sigma() const { return sqrt_; }
  const Matrix& inv_sqrt_sigma() const { return inv_sqrt_; }

  EllipticalDist scaled(double b) const;
  EllipticalDist shifted(const Vector& gamma) const;

 private:
  Vector mu_;
  Matrix sigma_;
  GeneratorFamily family_;
  Matrix sqrt_;
  Matrix inv_sqrt_;
};

// Per-component probability levels; p_k = 0 and q_k = 1 stand for -inf / +inf.
struct TruncationBand {
  Vector p;
  Vector q;

  static TruncationBand broadcast(int n, double p, double q);
  void validate(int n) const;
};

struct StandardizedBand {
  Vector eta_p;
  Vector eta_q;
};

Matrix sqrt_spd(const Matrix& sigma);
Matrix inv_sqrt_spd(const Matrix& sigma);

// Law of a single coordinate Y_1 of the spherical vector with generator g_n.
double standard_marginal_density(const GeneratorFamily& family, int n, double y);
double standard_marginal_cdf(const GeneratorFamily& family, int n, double y);
double standard_marginal_quantile(const GeneratorFamily& family, int n, double level);
// Numeric paths only, used to cross-check the closed-form fast paths.
double standard_marginal_cdf_numeric(const GeneratorFamily& family, int n, double y);
double standard_marginal_quantile_numeric(const GeneratorFamily& family, int n, double level);

double marginal_density(const EllipticalDist& dist, int k, double x);
double marginal_cdf(const EllipticalDist& dist, int k, double x);
double var_quantile(const EllipticalDist& dist, int k, double level);

// Univariate law of X_k when the family is closed under marginalization
// (normal, Student-t, Pearson VII); DomainError otherwise.
EllipticalDist marginal(const EllipticalDist& dist, int k);

// VaR vector for a level vector; levels 0 and 1 map to -inf and +inf.
Vector var_vector(const EllipticalDist& dist, const Vector& levels);

// Sigma^{-1/2}(x - mu) with infinite coordinates resolved as a common-rate
// limit along sqrt(sigma_jj); no ordering check.
Vector standardize_point(const EllipticalDist& dist, const Vector& x);

StandardizedBand standardize_band(const EllipticalDist& dist, const TruncationBand& band);

// Rows are observations.
EllipticalDist fit_normal_mle(const Matrix& samples);

// Pearson VII law of X = mu + (Y - mu)/sqrt(m) for Y ~ St_n(mu, Sigma, m); t = (m + n)/2.
EllipticalDist pvii_from_t(const EllipticalDist& t_dist);
EllipticalDist pvii_from_t(const EllipticalDist& t_dist, double target_t);

}  // namespace ellrisk
