#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ellrisk/error.hpp"
#include "ellrisk/measures.hpp"
#include "ellrisk/oracle.hpp"
#include "ellrisk/rect.hpp"

using namespace ellrisk;

namespace {

std::vector<GeneratorFamily> families() {
  return {GeneratorFamily::normal(), GeneratorFamily::student_t(6.0), GeneratorFamily::logistic(),
          GeneratorFamily::laplace(), GeneratorFamily::pearson_vii(5.0)};
}

Matrix spd3() {
  Matrix s(3, 3);
  s << 1.0, 0.3, 0.2, 0.3, 1.0, -0.1, 0.2, -0.1, 1.5;
  return s;
}

}  // namespace

TEST(SampleSpherical, NormalClt) {
  const std::size_t N = 200000;
  const Matrix y = sample_spherical(GeneratorFamily::normal(), 2, N, 5);
  const Vector mean = y.colwise().mean();
  const Matrix centered = y.rowwise() - mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(N);
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 4 / std::sqrt(double(N)));
  EXPECT_LT((cov - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 6 / std::sqrt(double(N)));
}

TEST(SampleSpherical, StudentTCovariance) {
  const std::size_t N = 400000;
  const Matrix y = sample_spherical(GeneratorFamily::student_t(5.0), 3, N, 9);
  const Matrix cov = y.transpose() * y / static_cast<double>(N);
  // fourth moment of t_5 is infinite-free: Var(Y_1^2) = 3 m^2/((m-2)(m-4)) - (m/(m-2))^2
  const double var_sq = 3.0 * 25.0 / (3.0 * 1.0) - (5.0 / 3.0) * (5.0 / 3.0);
  for (int k = 0; k < 3; ++k) EXPECT_LT(std::abs(cov(k, k) - 5.0 / 3.0), 4 * std::sqrt(var_sq / N));
}

TEST(SampleSpherical, RadiusPassesKolmogorovSmirnov) {
  const std::size_t N = 100000;
  for (const auto& f : {GeneratorFamily::logistic(), GeneratorFamily::laplace(), GeneratorFamily::pearson_vii(5.0)}) {
    const RadialTable table(f, 3);
    const Matrix y = sample_spherical(f, 3, N, 21);
    std::vector<double> r(N);
    for (std::size_t i = 0; i < N; ++i) r[i] = y.row(static_cast<Eigen::Index>(i)).norm();
    std::sort(r.begin(), r.end());
    double d = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double F = table.cdf(r[i]);
      d = std::max({d, F - double(i) / N, double(i + 1) / N - F});
    }
    // alpha = 0.001
    EXPECT_LT(d, 1.9495 / std::sqrt(double(N))) << f.describe();
  }
}

TEST(RadialTable, QuantileInvertsCdf) {
  for (const auto& f : {GeneratorFamily::logistic(), GeneratorFamily::laplace(), GeneratorFamily::pearson_vii(3.0)})
    for (int n : {1, 3, 5}) {
      const RadialTable t(f, n);
      for (double u : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999999}) EXPECT_NEAR(t.cdf(t.quantile(u)), u, 1e-10) << f.describe();
    }
}

TEST(Oracle, FullBandGivesCovarianceFactor) {
  const EllipticalDist d(Vector{{1.0, 2.0, 3.0}}, spd3(), GeneratorFamily::student_t(6.0));
  const double inf = std::numeric_limits<double>::infinity();
  const auto o = oracle_band_moments(d, StandardizedBand{Vector::Constant(3, -inf), Vector::Constant(3, inf)}, 500000, 1);
  EXPECT_EQ(o.band_prob, 1.0);
  for (int k = 0; k < 3; ++k) EXPECT_LT(std::abs(o.mean[k] - d.mu()[k]), 4 * o.se_mean[k]);
  const Matrix expect = 1.5 * spd3();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_LT(std::abs(o.cov(i, j) - expect(i, j)), 4 * o.se_cov(i, j));
}

TEST(Oracle, DeterministicPerSeed) {
  const EllipticalDist d(Vector::Zero(3), spd3(), GeneratorFamily::laplace());
  const auto band = standardize_band(d, TruncationBand::broadcast(3, 0.1, 0.8));
  const auto a = oracle_band_moments(d, band, 150000, 77);
  const auto b = oracle_band_moments(d, band, 150000, 77);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.cov, b.cov);
  EXPECT_EQ(a.n_accepted, b.n_accepted);
}

TEST(Oracle, SymmetricBandMeanIsMu) {
  const EllipticalDist d(Vector{{1.0, 2.0, 3.0}}, spd3(), GeneratorFamily::logistic());
  const auto band = standardize_band(d, TruncationBand::broadcast(3, 0.3, 0.7));
  const auto o = oracle_band_moments(d, band, 1000000, 2);
  for (int k = 0; k < 3; ++k) EXPECT_LT(std::abs(o.mean[k] - d.mu()[k]), 3 * o.se_mean[k]);
}

TEST(Oracle, DirectAgreesWithBandForDiagonalSigma) {
  Matrix diag = Matrix::Zero(3, 3);
  diag.diagonal() << 0.5, 2.0, 1.5;
  const EllipticalDist d(Vector{{1.0, 2.0, 3.0}}, diag, GeneratorFamily::normal());
  const auto band = TruncationBand::broadcast(3, 0.1, 0.8);
  const auto a = oracle_band_moments(d, standardize_band(d, band), 1000000, 4);
  const auto b = oracle_direct_moments(d, band, 1000000, 4);
  for (int k = 0; k < 3; ++k)
    EXPECT_LT(std::abs(a.mean[k] - b.mean[k]), 3 * std::hypot(a.se_mean[k], b.se_mean[k]) + 1e-12);
}

TEST(Oracle, NonDiagonalGapIsReported) {
  Matrix s(3, 3);
  s << 1.33, -0.067, 2.63, -0.067, 0.25, -0.50, 2.63, -0.50, 5.76;
  const EllipticalDist d(Vector{{1.2, 0.7, 3.0}}, s, GeneratorFamily::normal());
  const auto o = oracle_direct_moments(d, TruncationBand::broadcast(3, 0.1, 0.8), 500000, 8);
  EXPECT_GT(o.n_accepted, 100u);
  EXPECT_TRUE(o.mean.allFinite());
}

TEST(Oracle, TooFewAccepted) {
  const EllipticalDist d(Vector::Zero(3), Matrix::Identity(3, 3), GeneratorFamily::normal());
  try {
    oracle_direct_moments(d, TruncationBand::broadcast(3, 0.5, 0.52), 1000, 1);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewAccepted);
  }
}

TEST(Oracle, BandProbMatchesRectangleProb) {
  for (const auto& f : families()) {
    const EllipticalDist d(Vector::Zero(3), spd3(), f);
    const auto band = standardize_band(d, TruncationBand::broadcast(3, 0.1, 0.8));
    const auto o = oracle_band_moments(d, band, 1000000, 13);
    const auto r = risk_report(d, TruncationBand::broadcast(3, 0.1, 0.8));
    EXPECT_LT(std::abs(o.band_prob - r.band_prob), 3 * o.band_prob_se) << f.describe();
  }
}

TEST(Oracle, StandardErrorsShrinkAsRootCount) {
  const EllipticalDist d(Vector::Zero(3), spd3(), GeneratorFamily::normal());
  const auto band = standardize_band(d, TruncationBand::broadcast(3, 0.1, 0.8));
  double prev = 0.0;
  for (std::size_t n : {10000, 100000, 1000000}) {
    const double se = oracle_band_moments(d, band, n, 6).se_mean[0];
    if (prev > 0.0) {
      const double ratio = prev / se / std::sqrt(10.0);
      EXPECT_GT(ratio, 1 / 1.5);
      EXPECT_LT(ratio, 1.5);
    }
    prev = se;
  }
}
