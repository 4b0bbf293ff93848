#include "ellrisk/special.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ellrisk/error.hpp"
#include "ellrisk/quadrature.hpp"

namespace ellrisk {

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) {
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_interval(double a, double b) {
  if (!(a < b)) return 0.0;
  if (a >= 0.0) return normal_cdf(-a) - normal_cdf(-b);
  if (b <= 0.0) return normal_cdf(b) - normal_cdf(a);
  return 1.0 - normal_cdf(a) - normal_cdf(-b);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::DomainError, "normal quantile level must lie in (0,1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double student_t_cdf(double x, double dof) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  boost::math::students_t_distribution<double> dist(dof);
  return x > 0 ? boost::math::cdf(boost::math::complement(dist, -x)) : boost::math::cdf(dist, x);
}

double student_t_quantile(double p, double dof) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::DomainError, "student-t quantile level must lie in (0,1)");
  boost::math::students_t_distribution<double> dist(dof);
  return boost::math::quantile(dist, p);
}

namespace {

void check_lerch_args(double kappa, double z, double s, double a) {
  if (!(kappa > 0.0) || !(s > 0.0) || !(a > 0.0) || !(z >= -1.0 && z < 1.0))
    throw Error(ErrorCode::DomainError, "lerch_zeta_star requires kappa>0, s>0, a>0, -1<=z<1 (got kappa=" +
                                            std::to_string(kappa) + ", z=" + std::to_string(z) +
                                            ", s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")");
}

constexpr double kSeriesTol = 1e-14;
constexpr long kSeriesCap = 1000000;

}  // namespace

double lerch_zeta_star_integral(double kappa, double z, double s, double a) {
  check_lerch_args(kappa, z, s, a);
  quad::Tolerance tol{0.0, 1e-13, 2000};
  quad::Result r;
  if (s >= 1.0) {
    auto f = [&](double t) {
      if (t <= 0.0) return s == 1.0 ? 1.0 / std::pow(1.0 - z, kappa) : 0.0;
      return std::exp((s - 1.0) * std::log(t) - a * t - kappa * std::log1p(-z * std::exp(-t)));
    };
    r = quad::integrate(f, 0.0, std::numeric_limits<double>::infinity(), tol);
    return r.value / std::tgamma(s);
  }
  // t = w^(1/s) removes the t^(s-1) endpoint singularity
  auto f = [&](double w) {
    const double t = std::pow(w, 1.0 / s);
    return std::exp(-a * t - kappa * std::log1p(-z * std::exp(-t)));
  };
  r = quad::integrate(f, 0.0, std::numeric_limits<double>::infinity(), tol);
  return r.value / std::tgamma(s + 1.0);
}

double lerch_zeta_star(double kappa, double z, double s, double a) {
  check_lerch_args(kappa, z, s, a);
  if (z == 0.0) return std::pow(a, -s);
  double coef = 1.0;  // Gamma(kappa+n)/(Gamma(kappa) n!) z^n
  double sum = std::pow(a, -s);
  double prev = std::abs(sum);
  for (long n = 0; n < kSeriesCap; ++n) {
    coef *= z * (kappa + n) / (n + 1.0);
    const double term = coef * std::pow(n + 1.0 + a, -s);
    sum += term;
    const double mag = std::abs(term);
    const double ratio_bound = std::abs(z) * std::max(1.0, (kappa + n + 1.0) / (n + 2.0));
    double tail = std::numeric_limits<double>::infinity();
    if (ratio_bound < 1.0) tail = mag * ratio_bound / (1.0 - ratio_bound);
    if (z < 0.0 && n > 8) {
      const double next = std::abs(coef * z * (kappa + n + 1.0) / (n + 2.0)) * std::pow(n + 2.0 + a, -s);
      if (next <= mag) tail = std::min(tail, next);
    }
    if (tail <= kSeriesTol * std::abs(sum)) return sum;
    if (n > 1000 && z == -1.0) {
      if (mag >= prev) break;  // terms no longer shrink: only Abel summable
      if (n == 10000 && tail > 1e-12 * std::abs(sum)) break;  // algebraic decay, cap unreachable
    }
    prev = mag;
  }
  return lerch_zeta_star_integral(kappa, z, s, a);
}

}  // namespace ellrisk
