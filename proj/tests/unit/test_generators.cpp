#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ellrisk/error.hpp"
#include "ellrisk/generators.hpp"
#include "ellrisk/model.hpp"

using namespace ellrisk;

namespace {

const double kPi = std::numbers::pi;

std::vector<GeneratorFamily> families() {
  return {GeneratorFamily::normal(), GeneratorFamily::student_t(9.0), GeneratorFamily::logistic(),
          GeneratorFamily::laplace(), GeneratorFamily::pearson_vii(6.0)};
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

TEST(Generators, ValuesAtZero) {
  EXPECT_DOUBLE_EQ(eval_generator(GeneratorFamily::normal(), Level::G, 3, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(eval_generator(GeneratorFamily::student_t(5), Level::GBar, 1, 0.0), 1.25);
  EXPECT_DOUBLE_EQ(eval_generator(GeneratorFamily::laplace(), Level::GBar2, 2, 0.0), 3.0);
  EXPECT_DOUBLE_EQ(eval_generator(GeneratorFamily::laplace(), Level::GBar, 2, 0.0), 1.0);
}

TEST(Generators, LaplaceClosedForm) {
  const double u = 1.7, r = std::sqrt(2.0 * u);
  EXPECT_NEAR(eval_generator(GeneratorFamily::laplace(), Level::GBar2, 3, u), (3 + 2 * u + 3 * r) * std::exp(-r), 1e-15);
}

TEST(Generators, UpperIntegralsByFiniteDifferences) {
  for (const auto& f : families())
    for (int n = 1; n <= 6; ++n)
      for (double u : {0.1, 1.0, 5.0}) {
        const double h = 1e-5 * u;
        const double dg1 = (eval_generator(f, Level::GBar, n, u + h) - eval_generator(f, Level::GBar, n, u - h)) / (2 * h);
        const double dg2 =
            (eval_generator(f, Level::GBar2, n, u + h) - eval_generator(f, Level::GBar2, n, u - h)) / (2 * h);
        EXPECT_NEAR(-dg1 / eval_generator(f, Level::G, n, u), 1.0, 1e-6) << f.describe() << " n=" << n << " u=" << u;
        EXPECT_NEAR(-dg2 / eval_generator(f, Level::GBar, n, u), 1.0, 1e-6) << f.describe() << " n=" << n << " u=" << u;
      }
}

TEST(Generators, NonincreasingOnGrid) {
  for (const auto& f : families())
    for (Level lv : {Level::G, Level::GBar, Level::GBar2}) {
      double prev = eval_generator(f, lv, 3, 0.0);
      for (int i = 1; i <= 100; ++i) {
        const double v = eval_generator(f, lv, 3, 0.25 * i);
        EXPECT_LE(v, prev) << f.describe();
        EXPECT_GT(v, 0.0);
        prev = v;
      }
    }
}

TEST(Generators, Errors) {
  EXPECT_EQ(code_of([] { eval_generator(GeneratorFamily::normal(), Level::G, 1, -0.1); }), ErrorCode::NegativeArgument);
  EXPECT_EQ(code_of([] { norm_const(GeneratorFamily::student_t(2.0), Level::GBar, 1); }),
            ErrorCode::ShapeConstraintViolated);
  EXPECT_EQ(code_of([] { norm_const(GeneratorFamily::student_t(4.0), Level::GBar2, 1); }),
            ErrorCode::ShapeConstraintViolated);
  EXPECT_EQ(code_of([] { norm_const(GeneratorFamily::pearson_vii(1.5), Level::G, 3); }),
            ErrorCode::ShapeConstraintViolated);
  EXPECT_EQ(code_of([] { norm_const(GeneratorFamily::pearson_vii(2.4), Level::GBar, 3); }),
            ErrorCode::ShapeConstraintViolated);
  EXPECT_EQ(code_of([] { family_from_name("cauchy"); }), ErrorCode::DomainError);
  EXPECT_EQ(code_of([] { family_from_name("student_t"); }), ErrorCode::DomainError);
}

TEST(NormConst, ClosedForms) {
  for (int n = 1; n <= 4; ++n)
    for (Level lv : {Level::G, Level::GBar, Level::GBar2})
      EXPECT_NEAR(norm_const(GeneratorFamily::normal(), lv, n), std::pow(2 * kPi, -0.5 * n), 1e-16);
  EXPECT_NEAR(norm_const(GeneratorFamily::student_t(5), Level::G, 1), 0.37960668982249443, 1e-15);
  EXPECT_NEAR(norm_const(GeneratorFamily::logistic(), Level::G, 2), 1.0 / kPi, 1e-12);
  EXPECT_NEAR(norm_const(GeneratorFamily::logistic(), Level::GBar, 1), 0.65951921820290700, 1e-12);
  EXPECT_NEAR(norm_const(GeneratorFamily::laplace(), Level::G, 1), 0.5, 1e-15);
}

TEST(NormConst, AgreesWithGenericQuadrature) {
  for (const auto& f : families())
    for (int n = 1; n <= 5; ++n)
      for (Level lv : {Level::G, Level::GBar, Level::GBar2}) {
        const double closed = norm_const(f, lv, n);
        const double generic = generic_norm_const([&](double u) { return eval_generator(f, lv, n, u); }, n);
        EXPECT_NEAR(closed / generic, 1.0, 1e-8) << f.describe() << " " << level_name(lv) << " n=" << n;
      }
}

TEST(NormConst, GenericExamples) {
  EXPECT_NEAR(generic_norm_const([](double s) { return std::exp(-s); }, 1), 1.0 / std::sqrt(2 * kPi), 1e-12);
  const auto t5 = GeneratorFamily::student_t(5);
  EXPECT_NEAR(generic_norm_const([&](double u) { return eval_generator(t5, Level::G, 1, u); }, 1) /
                  norm_const(t5, Level::G, 1),
              1.0, 1e-10);
  const auto lap = GeneratorFamily::laplace();
  EXPECT_NEAR(generic_norm_const([&](double u) { return eval_generator(lap, Level::GBar, 1, u); }, 1) /
                  norm_const(lap, Level::GBar, 1),
              1.0, 1e-10);
}

TEST(NormConst, UnivariateRatios) {
  EXPECT_DOUBLE_EQ(norm_const(GeneratorFamily::normal(), Level::G, 1) / norm_const(GeneratorFamily::normal(), Level::GBar, 1), 1.0);
  for (double m : {2.5, 3.0, 7.0, 30.0}) {
    const auto f = GeneratorFamily::student_t(m);
    EXPECT_NEAR(norm_const(f, Level::G, 1) / norm_const(f, Level::GBar, 1), m / (m - 2), 1e-12);
  }
  for (double t : {1.6, 2.0, 4.5}) {
    const auto f = GeneratorFamily::pearson_vii(t);
    EXPECT_NEAR(norm_const(f, Level::G, 1) / norm_const(f, Level::GBar, 1), 1.0 / (2 * t - 3), 1e-12);
  }
}

TEST(PviiFromT, DensityAndShapeRoundTrip) {
  // n = 1, m = 3 <-> t = 2
  const EllipticalDist y(Vector::Constant(1, 0.4), Matrix::Constant(1, 1, 2.0), GeneratorFamily::student_t(3.0));
  const EllipticalDist x = pvii_from_t(y);
  EXPECT_EQ(x.family().kind, FamilyKind::PearsonVII);
  EXPECT_DOUBLE_EQ(x.family().shape, 2.0);
  EXPECT_DOUBLE_EQ(2 * x.family().shape - 1, 3.0);
  const double s = std::sqrt(3.0);
  for (double v : {-2.0, 0.0, 0.4, 1.3}) {
    // X = mu + (Y - mu)/sqrt(m): f_X(v) = sqrt(m) f_Y(mu + sqrt(m)(v - mu))
    const double fy = marginal_density(y, 0, 0.4 + s * (v - 0.4));
    EXPECT_NEAR(marginal_density(x, 0, v), s * fy, 1e-12);
  }
  EXPECT_NEAR(var_quantile(x, 0, 0.9) - 0.4, (var_quantile(y, 0, 0.9) - 0.4) / s, 1e-9);
  EXPECT_THROW(pvii_from_t(y, 3.0), Error);
}
