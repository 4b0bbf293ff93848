#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ellrisk/model.hpp"

namespace ellrisk {

// Inverse CDF of the radius R = |Y| with density proportional to
// r^{n-1} g_n(r^2/2), tabulated on Chebyshev-Lobatto nodes in x = r/(1+r).
class RadialTable {
 public:
  static constexpr int kNodes = 4096;

  RadialTable(const GeneratorFamily& family, int n);

  double cdf(double r) const;
  double quantile(double u) const;

 private:
  double density_x(double x) const;           // d/dx of the unnormalized CDF
  double partial(int i, double x) const;      // unnormalized mass on [x_i, x]

  GeneratorFamily family_;
  int n_;
  double total_ = 0.0;
  std::vector<double> x_;
  std::vector<double> cum_;    // normalized CDF at x_
  std::vector<double> slope_;  // dx/dF at the nodes (monotone Hermite)
};

// Draws of the standard spherical law (mu = 0, Sigma = I); rows are draws.
Matrix sample_spherical(const GeneratorFamily& family, int n, std::size_t count, std::uint64_t seed);

struct OracleEstimate {
  Vector mean;
  Matrix cov;
  double band_prob = 0.0;
  double band_prob_se = 0.0;
  Vector se_mean;
  Matrix se_cov;
  std::size_t n_samples = 0;   // draws
  std::size_t n_accepted = 0;
  std::uint64_t seed = 0;
};

// Y-rectangle convention: keep spherical draws with eta_p < Y < eta_q, report
// moments of X = Sigma^{1/2} Y + mu.
OracleEstimate oracle_band_moments(const EllipticalDist& dist, const StandardizedBand& band, std::size_t count,
                                   std::uint64_t seed);

// X-rectangle convention: keep draws with VaR_p(X_k) < X_k < VaR_q(X_k).
OracleEstimate oracle_direct_moments(const EllipticalDist& dist, const TruncationBand& band, std::size_t count,
                                     std::uint64_t seed);

}  // namespace ellrisk
