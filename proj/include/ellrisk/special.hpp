#pragma once

namespace ellrisk {

double normal_pdf(double x);
double normal_cdf(double x);
// P(a < Z < b) for a standard normal Z, computed on the side that avoids cancellation.
double normal_interval(double a, double b);
double normal_quantile(double p);

double student_t_cdf(double x, double dof);
double student_t_quantile(double p, double dof);

// Generalized Hurwitz-Lerch zeta
//   Psi*_kappa(z, s, a) = (1/Gamma(kappa)) sum_{n>=0} Gamma(kappa+n)/n! z^n / (n+a)^s
// for -1 <= z < 1, s > 0, a > 0.
double lerch_zeta_star(double kappa, double z, double s, double a);

// Same function through its integral representation only.
double lerch_zeta_star_integral(double kappa, double z, double s, double a);

}  // namespace ellrisk
