#include <gtest/gtest.h>

#include <cmath>

#include "ellrisk/error.hpp"
#include "ellrisk/measures.hpp"
#include "ellrisk/oracle.hpp"

using namespace ellrisk;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::vector<GeneratorFamily> families() {
  return {GeneratorFamily::normal(), GeneratorFamily::student_t(6.0), GeneratorFamily::logistic(),
          GeneratorFamily::laplace(), GeneratorFamily::pearson_vii(5.0)};
}

EllipticalDist uni(const GeneratorFamily& f, double mu = 0.0, double var = 1.0) {
  return EllipticalDist(Vector::Constant(1, mu), Matrix::Constant(1, 1, var), f);
}

Matrix spd3() {
  Matrix s(3, 3);
  s << 1.0, 0.3, 0.2, 0.3, 1.0, -0.1, 0.2, -0.1, 1.5;
  return s;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

}  // namespace

TEST(Dte, Examples) {
  EXPECT_NEAR(dte(uni(GeneratorFamily::normal(), 1.2, 1.33), 0.3, 0.7).value, 1.2, 1e-14);
  EXPECT_NEAR(dte(uni(GeneratorFamily::normal()), 0.05, 1.0).value, 0.10856383197407505, 1e-13);
  EXPECT_NEAR(dte(uni(GeneratorFamily::laplace()), 0.05, 0.5).value, -0.74415721188955048, 1e-10);
  for (const auto& f : families()) EXPECT_NEAR(dte(uni(f, 0.4, 2.0), 0.0, 1.0).value, 0.4, 1e-14);
}

TEST(Dtv, Examples) {
  EXPECT_NEAR(dtv(uni(GeneratorFamily::normal()), 0.0, 1.0).value, 1.0, 1e-14);
  EXPECT_NEAR(dtv(uni(GeneratorFamily::normal()), 0.05, 0.95).value, 0.62301548413468393, 1e-12);
  EXPECT_NEAR(dtv(uni(GeneratorFamily::student_t(5.0)), 0.1, 0.9).value, 0.53405854023930047, 1e-10);
  EXPECT_EQ(code_of([] { dtv(uni(GeneratorFamily::student_t(2.0)), 0.1, 0.9); }), ErrorCode::ShapeConstraintViolated);
}

TEST(Dtv, StudentTAgainstMonteCarlo) {
  const auto d = uni(GeneratorFamily::student_t(5.0));
  const auto band = standardize_band(d, TruncationBand::broadcast(1, 0.1, 0.9));
  const auto o = oracle_band_moments(d, band, 2000000, 3);
  EXPECT_LE(std::abs(dtv(d, 0.1, 0.9).value - o.cov(0, 0)), 3 * o.se_cov(0, 0));
  EXPECT_LE(std::abs(dte(d, 0.1, 0.9).value - o.mean[0]), 3 * o.se_mean[0]);
}

TEST(Dte, EmptyBand) {
  EXPECT_EQ(code_of([] { dte(uni(GeneratorFamily::normal()), 0.6, 0.4); }), ErrorCode::EmptyBand);
  EXPECT_EQ(code_of([] { dte(uni(GeneratorFamily::normal()), 0.5, 0.5 + 1e-14); }), ErrorCode::EmptyBand);
}

TEST(Mdte, UnivariateMatchesDte) {
  for (const auto& f : families()) {
    const auto d = uni(f, -0.3, 2.5);
    const auto band = TruncationBand::broadcast(1, 0.15, 0.7);
    EXPECT_NEAR(mdte(d, band).value[0], dte(d, 0.15, 0.7).value, 1e-10) << f.describe();
    EXPECT_NEAR(mdtcov(d, band).value(0, 0), dtv(d, 0.15, 0.7).value, 1e-10) << f.describe();
  }
}

TEST(Mdte, StandardizedExamples) {
  const EllipticalDist d(Vector::Zero(2), Matrix::Identity(2, 2), GeneratorFamily::normal());
  const auto full = standardized_mdte(d, StandardizedBand{Vector::Constant(2, -kInf), Vector::Constant(2, kInf)});
  EXPECT_LT(full.value.cwiseAbs().maxCoeff(), 1e-15);
  for (const auto& f : families()) {
    const EllipticalDist e(Vector::Zero(3), Matrix::Identity(3, 3), f);
    const auto s = standardized_mdte(e, StandardizedBand{Vector{{-0.4, -1.0, -2.0}}, Vector{{0.4, 1.0, 2.0}}});
    EXPECT_LT(s.value.cwiseAbs().maxCoeff(), 1e-12) << f.describe();
  }
}

TEST(Mdte, StandardizedWithinBand) {
  for (const auto& f : families()) {
    const EllipticalDist e(Vector::Zero(3), Matrix::Identity(3, 3), f);
    const StandardizedBand b{Vector{{-0.4, 0.2, -kInf}}, Vector{{1.5, 0.9, -0.1}}};
    const auto s = standardized_mdte(e, b);
    for (int k = 0; k < 3; ++k) {
      EXPECT_GE(s.value[k], b.eta_p[k]);
      EXPECT_LE(s.value[k], b.eta_q[k]);
    }
  }
}

TEST(Mdtcov, FullBandIsSigma) {
  const EllipticalDist d(Vector{{1.0, 2.0, 3.0}}, spd3(), GeneratorFamily::normal());
  const auto band = TruncationBand::broadcast(3, 0.0, 1.0);
  const auto c = mdtcov(d, band);
  EXPECT_LT((c.value - spd3()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((mdtccov(d, band).value - spd3()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((mdte(d, band).value - d.mu()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Mdtcov, SymmetricPsdAndCorrelation) {
  for (const auto& f : families()) {
    const EllipticalDist d(Vector{{1.0, 2.0, 3.0}}, spd3(), f);
    const auto band = TruncationBand::broadcast(3, 0.1, 0.8);
    const auto c = mdtcov(d, band);
    EXPECT_LT((c.value - c.value.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::SelfAdjointEigenSolver<Matrix> es(c.value);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8 * c.value.trace());
    const auto r = mdtcorr(d, band);
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(r.value(i, i), 1.0);
      for (int j = 0; j < 3; ++j) EXPECT_LE(std::abs(r.value(i, j)), 1 + 1e-9);
    }
  }
}

TEST(Mdtcorr, DiagonalSigmaGivesZeroCorrelation) {
  Matrix diag = Matrix::Zero(3, 3);
  diag.diagonal() << 0.5, 2.0, 1.5;
  const EllipticalDist d(Vector::Zero(3), diag, GeneratorFamily::normal());
  const auto r = mdtcorr(d, TruncationBand::broadcast(3, 0.05, 0.6));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) EXPECT_NEAR(r.value(i, j), 0.0, 1e-12);
}

TEST(Mdtccov, SymmetricBandEqualsMdtcov) {
  Matrix diag = Matrix::Zero(3, 3);
  diag.diagonal() << 0.5, 2.0, 1.5;
  for (const auto& f : families()) {
    const EllipticalDist d(Vector{{1.0, -1.0, 0.5}}, diag, f);
    const auto band = TruncationBand::broadcast(3, 0.25, 0.75);
    EXPECT_LT((mdtccov(d, band).value - mdtcov(d, band).value).cwiseAbs().maxCoeff(), 1e-10) << f.describe();
  }
}

TEST(Mdtccov, AddsMeanShift) {
  const EllipticalDist d(Vector{{1.0, 2.0, 3.0}}, spd3(), GeneratorFamily::student_t(7.0));
  const auto band = TruncationBand::broadcast(3, 0.1, 0.8);
  const Vector shift = mdte(d, band).value - d.mu();
  const Matrix expect = mdtcov(d, band).value + shift * shift.transpose();
  EXPECT_LT((mdtccov(d, band).value - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Mtce, Examples) {
  const auto d = uni(GeneratorFamily::normal(), 0.5, 4.0);
  EXPECT_NEAR(mtce(d, Vector::Constant(1, 0.95)).value[0], 0.5 + 2.0 * 2.0627128075074260, 1e-11);
  const EllipticalDist d3(Vector{{1.0, 2.0, 3.0}}, spd3(), GeneratorFamily::normal());
  EXPECT_LT((mtce(d3, Vector::Zero(3)).value - d3.mu()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((mtcov(d3, Vector::Zero(3)).value - spd3()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Measures, ReflectionForSymmetricFamilies) {
  for (const auto& f : families()) {
    const EllipticalDist d(Vector{{1.0, 2.0, 3.0}}, spd3(), f);
    const auto a = TruncationBand::broadcast(3, 0.1, 0.8);
    const auto b = TruncationBand::broadcast(3, 0.2, 0.9);
    const auto ra = risk_report(d, a), rb = risk_report(d, b);
    const double tol = 2 * (ra.diagnostics.mdte_error.maxCoeff() + rb.diagnostics.mdte_error.maxCoeff()) + 1e-12;
    EXPECT_LT((ra.mdte + rb.mdte - 2 * d.mu()).cwiseAbs().maxCoeff(), tol) << f.describe();
    const double ctol =
        2 * (ra.diagnostics.mdtcov_error.maxCoeff() + rb.diagnostics.mdtcov_error.maxCoeff()) + 1e-12;
    EXPECT_LT((ra.mdtcov - rb.mdtcov).cwiseAbs().maxCoeff(), ctol) << f.describe();
  }
}

TEST(Measures, GenericPathMatchesClosedForms) {
  for (const auto& f : families()) {
    const EllipticalDist d(Vector{{1.0, 2.0, 3.0}}, spd3(), f);
    const auto band = TruncationBand::broadcast(3, 0.1, 0.8);
    const auto fast = risk_report(d, band);
    const auto slow = risk_report(d, band, MeasureOptions{1e-10, kDefaultSeed, Path::Generic});
    const double scale = d.mu().cwiseAbs().maxCoeff();
    EXPECT_LT((fast.mdte - slow.mdte).cwiseAbs().maxCoeff(), 1e-6 * scale) << f.describe();
    EXPECT_LT((fast.mdtcov - slow.mdtcov).cwiseAbs().maxCoeff(), 1e-6 * fast.mdtcov.cwiseAbs().maxCoeff())
        << f.describe();
    const auto u = uni(f, 0.2, 3.0);
    EXPECT_NEAR(dtv(u, 0.1, 0.85).value, dtv(u, 0.1, 0.85, MeasureOptions{1e-10, 0, Path::Generic}).value, 1e-8);
  }
}

TEST(Measures, ShapeErrors) {
  const EllipticalDist t2(Vector::Zero(3), Matrix::Identity(3, 3), GeneratorFamily::student_t(2.0));
  EXPECT_EQ(code_of([&] { mdtcov(t2, TruncationBand::broadcast(3, 0.1, 0.9)); }), ErrorCode::ShapeConstraintViolated);
  const EllipticalDist p(Vector::Zero(3), Matrix::Identity(3, 3), GeneratorFamily::pearson_vii(2.0));
  EXPECT_EQ(code_of([&] { mdte(p, TruncationBand::broadcast(3, 0.1, 0.9)); }), ErrorCode::ShapeConstraintViolated);
}

TEST(Measures, BivariateOffDiagonalUsesEmptyRectangle) {
  Matrix s(2, 2);
  s << 1.0, 0.4, 0.4, 2.0;
  const EllipticalDist d(Vector::Zero(2), s, GeneratorFamily::laplace());
  const auto band = TruncationBand::broadcast(2, 0.2, 0.7);
  const auto c = mdtcov(d, band);
  const auto o = oracle_band_moments(d, standardize_band(d, band), 1000000, 11);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_LE(std::abs(c.value(i, j) - o.cov(i, j)), 3 * o.se_cov(i, j));
}
