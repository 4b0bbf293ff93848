#pragma once

#include <functional>
#include <optional>
#include <string>

namespace ellrisk {

enum class FamilyKind { Normal, StudentT, Logistic, Laplace, PearsonVII };

// G is the density generator g_n, GBar its upper integral, GBar2 the upper
// integral of GBar.
enum class Level { G, GBar, GBar2 };

struct GeneratorFamily {
  FamilyKind kind = FamilyKind::Normal;
  double shape = 0.0;  // degrees of freedom m (StudentT) or exponent t (PearsonVII)

  static GeneratorFamily normal() { return {FamilyKind::Normal, 0.0}; }
  static GeneratorFamily student_t(double m) { return {FamilyKind::StudentT, m}; }
  static GeneratorFamily logistic() { return {FamilyKind::Logistic, 0.0}; }
  static GeneratorFamily laplace() { return {FamilyKind::Laplace, 0.0}; }
  static GeneratorFamily pearson_vii(double t) { return {FamilyKind::PearsonVII, t}; }

  bool has_shape() const { return kind == FamilyKind::StudentT || kind == FamilyKind::PearsonVII; }
  std::string name() const;
  std::string describe() const;
};

// Accepts normal, student_t, logistic, laplace, pearson_vii (plus a few aliases).
GeneratorFamily family_from_name(const std::string& name, std::optional<double> shape = std::nullopt);

const char* level_name(Level level);

double eval_generator(const GeneratorFamily& family, Level level, int n, double u);

// c_n, c_n*, c_n** from the family closed forms.
double norm_const(const GeneratorFamily& family, Level level, int n);

// Gamma(m/2)/(2 pi)^{m/2} / int_0^inf s^{m/2-1} h(s) ds by adaptive quadrature.
double generic_norm_const(const std::function<double(double)>& h, int m);

namespace detail {

// h(u) = coef * (1 + 2u/scale)^(-exponent); Student-t and Pearson VII generators.
struct PowerLaw {
  double coef;
  double scale;
  double exponent;
};

std::optional<PowerLaw> power_law(const GeneratorFamily& family, Level level, int n);

// Normalizing constant of t -> h(|t|^2/2 + shift) over R^d.
double power_law_norm_const(const PowerLaw& law, double shift, int d);

void check_shape_for_eval(const GeneratorFamily& family, Level level, int n);

}  // namespace detail

}  // namespace ellrisk
