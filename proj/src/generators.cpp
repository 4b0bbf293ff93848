#include "ellrisk/generators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ellrisk/error.hpp"
#include "ellrisk/quadrature.hpp"
#include "ellrisk/special.hpp"

namespace ellrisk {

namespace {

constexpr double kPi = std::numbers::pi;

double lbeta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void shape_error(const GeneratorFamily& f, Level level, int n, const std::string& need) {
  throw Error(ErrorCode::ShapeConstraintViolated, f.describe() + " " + level_name(level) + " at n=" +
                                                       std::to_string(n) + " requires " + need);
}

}  // namespace

std::string GeneratorFamily::name() const {
  switch (kind) {
    case FamilyKind::Normal: return "normal";
    case FamilyKind::StudentT: return "student_t";
    case FamilyKind::Logistic: return "logistic";
    case FamilyKind::Laplace: return "laplace";
    case FamilyKind::PearsonVII: return "pearson_vii";
  }
  return "unknown";
}

std::string GeneratorFamily::describe() const {
  if (kind == FamilyKind::StudentT) return "student_t(m=" + fmt(shape) + ")";
  if (kind == FamilyKind::PearsonVII) return "pearson_vii(t=" + fmt(shape) + ")";
  return name();
}

GeneratorFamily family_from_name(const std::string& raw, std::optional<double> shape) {
  std::string name;
  for (char c : raw) name.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  auto need_shape = [&](const char* what) {
    if (!shape) throw Error(ErrorCode::DomainError, "family " + name + " needs a shape parameter (" + what + ")");
    return *shape;
  };
  if (name == "normal" || name == "gaussian") return GeneratorFamily::normal();
  if (name == "student_t" || name == "studentt" || name == "t") return GeneratorFamily::student_t(need_shape("m"));
  if (name == "logistic") return GeneratorFamily::logistic();
  if (name == "laplace") return GeneratorFamily::laplace();
  if (name == "pearson_vii" || name == "pearsonvii" || name == "pvii")
    return GeneratorFamily::pearson_vii(need_shape("t"));
  throw Error(ErrorCode::DomainError, "unknown family '" + raw + "'");
}

const char* level_name(Level level) {
  switch (level) {
    case Level::G: return "g";
    case Level::GBar: return "Gbar";
    case Level::GBar2: return "Gbar2";
  }
  return "?";
}

namespace detail {

void check_shape_for_eval(const GeneratorFamily& f, Level level, int n) {
  if (n < 1) throw Error(ErrorCode::DomainError, "dimension must be at least 1");
  const double k = f.shape;
  if (f.kind == FamilyKind::StudentT) {
    if (!(k > 0.0)) shape_error(f, level, n, "m > 0");
    if (level == Level::GBar && !(k + n - 2.0 > 0.0)) shape_error(f, level, n, "m + n - 2 > 0");
    if (level == Level::GBar2 && !(k + n - 4.0 > 0.0)) shape_error(f, level, n, "m + n - 4 > 0");
  } else if (f.kind == FamilyKind::PearsonVII) {
    if (!(k > 0.0)) shape_error(f, level, n, "t > 0");
    if (level == Level::GBar && !(k > 1.0)) shape_error(f, level, n, "t > 1");
    if (level == Level::GBar2 && !(k > 2.0)) shape_error(f, level, n, "t > 2");
  }
}

std::optional<PowerLaw> power_law(const GeneratorFamily& f, Level level, int n) {
  const double k = f.shape;
  if (f.kind == FamilyKind::StudentT) {
    switch (level) {
      case Level::G: return PowerLaw{1.0, k, 0.5 * (k + n)};
      case Level::GBar: return PowerLaw{k / (k + n - 2.0), k, 0.5 * (k + n - 2.0)};
      case Level::GBar2: return PowerLaw{k / (k + n - 2.0) * k / (k + n - 4.0), k, 0.5 * (k + n - 4.0)};
    }
  }
  if (f.kind == FamilyKind::PearsonVII) {
    switch (level) {
      case Level::G: return PowerLaw{1.0, 1.0, k};
      case Level::GBar: return PowerLaw{1.0 / (2.0 * (k - 1.0)), 1.0, k - 1.0};
      case Level::GBar2: return PowerLaw{1.0 / (4.0 * (k - 1.0) * (k - 2.0)), 1.0, k - 2.0};
    }
  }
  return std::nullopt;
}

double power_law_norm_const(const PowerLaw& law, double shift, int d) {
  const double half = 0.5 * d;
  if (!(law.exponent > half))
    throw Error(ErrorCode::ShapeConstraintViolated,
                "power-law generator with exponent " + fmt(law.exponent) + " is not integrable in " +
                    std::to_string(d) + " dimensions");
  const double scale = law.scale + 2.0 * shift;
  const double log_coef = std::log(law.coef) - law.exponent * std::log1p(2.0 * shift / law.scale);
  return std::exp(std::lgamma(law.exponent) - std::lgamma(law.exponent - half) - log_coef -
                  half * std::log(kPi * scale));
}

}  // namespace detail

double eval_generator(const GeneratorFamily& f, Level level, int n, double u) {
  if (u < 0.0 || std::isnan(u)) throw Error(ErrorCode::NegativeArgument, "generator argument must be >= 0");
  detail::check_shape_for_eval(f, level, n);
  if (std::isinf(u)) return 0.0;
  switch (f.kind) {
    case FamilyKind::Normal: return std::exp(-u);
    case FamilyKind::StudentT:
    case FamilyKind::PearsonVII: {
      const auto law = *detail::power_law(f, level, n);
      return law.coef * std::exp(-law.exponent * std::log1p(2.0 * u / law.scale));
    }
    case FamilyKind::Logistic: {
      const double e = std::exp(-u);
      switch (level) {
        case Level::G: return e / ((1.0 + e) * (1.0 + e));
        case Level::GBar: return e / (1.0 + e);
        case Level::GBar2: return std::log1p(e);
      }
      break;
    }
    case FamilyKind::Laplace: {
      if (u == 0.0) return level == Level::GBar2 ? 3.0 : 1.0;
      const double r = std::sqrt(2.0 * u);
      const double e = std::exp(-r);
      switch (level) {
        case Level::G: return e;
        case Level::GBar: return (1.0 + r) * e;
        case Level::GBar2: return (3.0 + 2.0 * u + 3.0 * r) * e;
      }
      break;
    }
  }
  return 0.0;
}

double norm_const(const GeneratorFamily& f, Level level, int n) {
  if (n < 1) throw Error(ErrorCode::DomainError, "dimension must be at least 1");
  const double h = 0.5 * n;
  const double k = f.shape;
  switch (f.kind) {
    case FamilyKind::Normal: return std::pow(2.0 * kPi, -h);
    case FamilyKind::StudentT: {
      if (!(k > 0.0)) shape_error(f, level, n, "m > 0");
      const double log_mpi = h * std::log(k * kPi);
      switch (level) {
        case Level::G: return std::exp(std::lgamma(0.5 * (k + n)) - std::lgamma(0.5 * k) - log_mpi);
        case Level::GBar:
          if (!(k > 2.0)) shape_error(f, level, n, "m > 2");
          return std::exp(std::log(k + n - 2.0) + std::lgamma(h) - log_mpi - std::log(k) -
                          lbeta(h, 0.5 * (k - 2.0)));
        case Level::GBar2:
          if (!(k > 4.0)) shape_error(f, level, n, "m > 4");
          return std::exp(std::log(k + n - 2.0) + std::log(k + n - 4.0) + std::lgamma(h) - log_mpi -
                          2.0 * std::log(k) - lbeta(h, 0.5 * (k - 4.0)));
      }
      break;
    }
    case FamilyKind::PearsonVII: {
      const double log_pi = h * std::log(kPi);
      switch (level) {
        case Level::G:
          if (!(k > h)) shape_error(f, level, n, "t > n/2");
          return std::exp(std::lgamma(k) - std::lgamma(k - h) - log_pi);
        case Level::GBar:
          if (!(k > 1.0 + h)) shape_error(f, level, n, "t > 1 + n/2");
          return std::exp(std::lgamma(h) + std::log(2.0 * (k - 1.0)) - log_pi - lbeta(h, k - 1.0 - h));
        case Level::GBar2:
          if (!(k > 2.0 + h)) shape_error(f, level, n, "t > 2 + n/2");
          return std::exp(std::lgamma(h) + std::log(4.0 * (k - 1.0) * (k - 2.0)) - log_pi -
                          lbeta(h, k - 2.0 - h));
      }
      break;
    }
    case FamilyKind::Logistic: {
      const double base = std::pow(2.0 * kPi, h);
      switch (level) {
        case Level::G: return 1.0 / (base * lerch_zeta_star(2.0, -1.0, h, 1.0));
        case Level::GBar: return 1.0 / (base * lerch_zeta_star(1.0, -1.0, h, 1.0));
        case Level::GBar2: return 1.0 / (base * lerch_zeta_star(1.0, -1.0, h + 1.0, 1.0));
      }
      break;
    }
    case FamilyKind::Laplace: {
      const double log_base = std::lgamma(h) - std::log(2.0) - h * std::log(kPi);
      switch (level) {
        case Level::G: return std::exp(log_base - std::lgamma(n));
        case Level::GBar: return n * std::exp(log_base - std::lgamma(n + 2.0));
        case Level::GBar2: return n * (n + 2.0) * std::exp(log_base - std::lgamma(n + 4.0));
      }
      break;
    }
  }
  return 0.0;
}

double generic_norm_const(const std::function<double(double)>& h, int m) {
  if (m < 1) throw Error(ErrorCode::DomainError, "dimension must be at least 1");
  // radial form: int s^{m/2-1} h(s) ds = 2^{1-m/2} int r^{m-1} h(r^2/2) dr
  auto radial = [&](double r) { return std::pow(r, m - 1) * h(0.5 * r * r); };
  quad::Tolerance tol{0.0, 1e-12, 2000};
  const auto res = quad::integrate(radial, 0.0, std::numeric_limits<double>::infinity(), tol, {1.0});
  if (!res.converged || !std::isfinite(res.value) || !(res.value > 0.0))
    throw Error(ErrorCode::IntegralDiverged, "normalizing integral did not converge in " + std::to_string(m) +
                                                 " dimensions");
  return std::exp(std::lgamma(0.5 * m) - std::log(2.0) - 0.5 * m * std::log(kPi)) / res.value;
}

}  // namespace ellrisk
