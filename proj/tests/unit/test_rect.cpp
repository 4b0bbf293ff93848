#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ellrisk/error.hpp"
#include "ellrisk/rect.hpp"
#include "ellrisk/special.hpp"

using namespace ellrisk;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::vector<GeneratorFamily> families() {
  return {GeneratorFamily::normal(), GeneratorFamily::student_t(6.0), GeneratorFamily::logistic(),
          GeneratorFamily::laplace(), GeneratorFamily::pearson_vii(5.0)};
}

Rectangle box(int m, double lo, double hi) { return Rectangle{std::vector<double>(m, lo), std::vector<double>(m, hi)}; }

}  // namespace

TEST(ShiftedConst, NormalFactorizes) {
  for (double s : {0.0, 0.3, 2.0})
    for (int m : {1, 2, 3})
      EXPECT_NEAR(shifted_norm_const(GeneratorFamily::normal(), 3, Level::GBar, s, m),
                  std::pow(2 * std::numbers::pi, -0.5 * m) * std::exp(s), 1e-14);
}

TEST(ShiftedConst, StudentTSingleShift) {
  // m = 5, n = 3, eta = 1: derived from the defining integral
  const auto t5 = GeneratorFamily::student_t(5.0);
  EXPECT_NEAR(shifted_norm_const(t5, 3, Level::GBar, 0.5, 2), 0.22001579333023611, 1e-13);
  EXPECT_NEAR(shifted_norm_const(t5, 3, Level::GBar, 0.5, 2, ConstMethod::Quadrature), 0.22001579333023611, 1e-9);
}

TEST(ShiftedConst, LogisticZeroShift) {
  const auto lg = GeneratorFamily::logistic();
  EXPECT_NEAR(shifted_norm_const(lg, 3, Level::GBar, 0.0, 2) / norm_const(lg, Level::GBar, 2), 1.0, 1e-10);
}

TEST(ShiftedConst, ClosedFormAgreesWithQuadrature) {
  for (const auto& f : families())
    for (Level lv : {Level::GBar, Level::GBar2})
      for (double s : {0.0, 0.4, 3.1}) {
        const int n = 3;
        const int m = lv == Level::GBar ? 2 : 1;
        if (f.kind == FamilyKind::Laplace && s > 0.0) continue;
        const double closed = shifted_norm_const(f, n, lv, s, m, ConstMethod::ClosedForm);
        const double numeric = shifted_norm_const(f, n, lv, s, m, ConstMethod::Quadrature);
        EXPECT_NEAR(closed / numeric, 1.0, 1e-8) << f.describe() << " s=" << s;
      }
}

TEST(ShiftedConst, ZeroDimensionIsReciprocal) {
  const auto lp = GeneratorFamily::laplace();
  EXPECT_DOUBLE_EQ(shifted_norm_const(lp, 2, Level::GBar2, 0.8, 0), 1.0 / eval_generator(lp, Level::GBar2, 2, 0.8));
  EXPECT_THROW(shifted_norm_const(lp, 2, Level::GBar2, -0.8, 0), Error);
}

TEST(RectangleProb, NormalExamples) {
  const auto spec = make_spec(GeneratorFamily::normal(), 1, Level::G, 0.0, 1);
  EXPECT_NEAR(rectangle_prob(spec, box(1, -1.959963984540054, 1.959963984540054)).value, 0.95, 1e-9);
  const auto spec2 = make_spec(GeneratorFamily::normal(), 2, Level::G, 0.0, 2);
  EXPECT_NEAR(rectangle_prob(spec2, box(2, -kInf, 0.0)).value, 0.25, 1e-9);
  EXPECT_NEAR(rectangle_prob_normal(box(3, -kInf, kInf)).value, 1.0, 1e-15);
  const Rectangle r{{-0.3, 1.0}, {0.8, 2.5}};
  EXPECT_NEAR(rectangle_prob_normal(r).value, normal_interval(-0.3, 0.8) * normal_interval(1.0, 2.5), 1e-16);
}

TEST(RectangleProb, FullSpaceHasUnitMass) {
  for (const auto& f : families())
    for (int m : {1, 2, 3, 4}) {
      const auto spec = make_spec(f, m, Level::G, 0.0, m);
      const auto p = rectangle_prob(spec, box(m, -kInf, kInf));
      EXPECT_NEAR(p.value, 1.0, std::max(1e-6, 3 * p.error)) << f.describe() << " m=" << m;
    }
}

TEST(RectangleProb, ShiftedSpecsHaveUnitMass) {
  for (const auto& f : families()) {
    const auto s1 = make_spec(f, 3, Level::GBar, 0.7, 2);
    EXPECT_NEAR(rectangle_prob(s1, box(2, -kInf, kInf)).value, 1.0, 1e-6) << f.describe();
    const auto s2 = make_spec(f, 3, Level::GBar2, 1.3, 1);
    EXPECT_NEAR(rectangle_prob(s2, box(1, -kInf, kInf)).value, 1.0, 1e-6) << f.describe();
  }
}

TEST(RectangleProb, NormalMatchesProductRule) {
  for (int m = 2; m <= 5; ++m) {
    Rectangle r;
    for (int i = 0; i < m; ++i) {
      r.lower.push_back(i % 2 == 0 ? -0.5 - 0.2 * i : -kInf);
      r.upper.push_back(0.9 + 0.1 * i);
    }
    const auto spec = make_spec(GeneratorFamily::normal(), m, Level::G, 0.0, m);
    const auto p = rectangle_prob(spec, r, IntegrationOptions{1e-6, 0});
    const double exact = rectangle_prob_normal(r).value;
    EXPECT_LE(std::abs(p.value - exact), std::max(3 * p.error, 1e-9)) << "m=" << m;
  }
}

TEST(RectangleProb, MonotoneAndAdditive) {
  for (const auto& f : families()) {
    const auto spec = make_spec(f, 3, Level::G, 0.0, 3);
    const auto inner = rectangle_prob(spec, box(3, -0.5, 0.7));
    const auto outer = rectangle_prob(spec, box(3, -0.9, 1.1));
    EXPECT_GE(outer.value + 2 * outer.error, inner.value - 2 * inner.error);
    const auto s1 = make_spec(f, 3, Level::G, 0.0, 1);
    const auto a = rectangle_prob(s1, box(1, -1.0, 0.3));
    const auto b = rectangle_prob(s1, box(1, 0.3, 2.0));
    const auto c = rectangle_prob(s1, box(1, -1.0, 2.0));
    EXPECT_NEAR(a.value + b.value, c.value, 2 * (a.error + b.error + c.error) + 1e-15) << f.describe();
  }
}

TEST(RectangleProb, RqmcIsDeterministicPerSeed) {
  const auto spec = make_spec(GeneratorFamily::logistic(), 4, Level::G, 0.0, 4);
  const auto r = box(4, -1.0, 0.5);
  const auto a = rectangle_prob(spec, r, IntegrationOptions{1e-5, 42});
  const auto b = rectangle_prob(spec, r, IntegrationOptions{1e-5, 42});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.error, b.error);
  EXPECT_LE(a.error, 1e-5);
}

TEST(RectangleProb, InvalidRectangle) {
  const auto spec = make_spec(GeneratorFamily::normal(), 2, Level::G, 0.0, 2);
  EXPECT_THROW(rectangle_prob(spec, Rectangle{{0.0, 1.0}, {1.0, 0.5}}), Error);
  EXPECT_THROW(rectangle_prob(spec, box(3, 0.0, 1.0)), Error);
}
