#include "ellrisk/measures.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "ellrisk/error.hpp"
#include "ellrisk/parallel.hpp"
#include "ellrisk/quadrature.hpp"
#include "ellrisk/special.hpp"

namespace ellrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEmptyBand = 1e-12;

struct Mass {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

// One integral int_rect h_level(|t|^2/2 + shift) dt of the moment assembly.
struct MassTask {
  Level level;
  double shift;
  Rectangle rect;
  Mass result;
};

Rectangle drop(const StandardizedBand& band, int skip_a, int skip_b = -1) {
  Rectangle r;
  for (int k = 0; k < band.eta_p.size(); ++k) {
    if (k == skip_a || k == skip_b) continue;
    r.lower.push_back(band.eta_p[k]);
    r.upper.push_back(band.eta_q[k]);
  }
  return r;
}

Mass compute_mass(const GeneratorFamily& f, int n, const MassTask& task, const MeasureOptions& opt) {
  const int m = task.rect.dim();
  const double at_shift = eval_generator(f, task.level, n, task.shift);
  if (m == 0) return Mass{at_shift, 0.0, true};
  if (!(at_shift > 0.0)) return Mass{};
  if (opt.path == Path::Auto && f.kind == FamilyKind::Normal) {
    const auto p = rectangle_prob_normal(task.rect);
    const double scale = std::pow(2.0 * std::numbers::pi, 0.5 * m) * std::exp(-task.shift);
    return Mass{p.value * scale, p.error * scale, true};
  }
  const ConstMethod method = opt.path == Path::Generic ? ConstMethod::Quadrature : ConstMethod::Auto;
  const auto spec = make_spec(f, n, task.level, task.shift, m, method);
  const auto p = rectangle_prob(spec, task.rect, IntegrationOptions{opt.accuracy, opt.seed});
  return Mass{p.value / spec.norm_const, p.error / spec.norm_const, p.converged};
}

double base_const(const GeneratorFamily& f, int n, const MeasureOptions& opt) {
  if (opt.path == Path::Generic) return shifted_norm_const(f, n, Level::G, 0.0, n, ConstMethod::Quadrature);
  return norm_const(f, Level::G, n);
}

void check_band(const StandardizedBand& band, int n) {
  if (band.eta_p.size() != n || band.eta_q.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "standardized band has wrong length");
  for (int k = 0; k < n; ++k)
    if (std::isnan(band.eta_p[k]) || std::isnan(band.eta_q[k]) || !(band.eta_p[k] < band.eta_q[k]))
      throw Error(ErrorCode::BandInvertedAfterStandardization,
                  "standardized band needs eta_p < eta_q (component " + std::to_string(k) + ")");
}

Matrix abs_sandwich(const Matrix& s, const Matrix& e) { return s.cwiseAbs() * e * s.cwiseAbs(); }

}  // namespace

StandardizedMoments standardized_moments(const GeneratorFamily& f, int n, const StandardizedBand& band,
                                         bool with_covariance, const MeasureOptions& opt) {
  if (n < 1) throw Error(ErrorCode::DomainError, "dimension must be at least 1");
  check_band(band, n);
  if (!(opt.accuracy > 0.0)) throw Error(ErrorCode::DomainError, "accuracy must be positive");
  const Vector& ep = band.eta_p;
  const Vector& eq = band.eta_q;

  std::vector<MassTask> tasks;
  tasks.push_back({Level::G, 0.0, drop(band, -1), {}});
  std::vector<int> p_idx(n, -1), q_idx(n, -1);
  for (int k = 0; k < n; ++k) {
    if (std::isfinite(ep[k])) {
      p_idx[k] = static_cast<int>(tasks.size());
      tasks.push_back({Level::GBar, 0.5 * ep[k] * ep[k], drop(band, k), {}});
    }
    if (std::isfinite(eq[k])) {
      q_idx[k] = static_cast<int>(tasks.size());
      tasks.push_back({Level::GBar, 0.5 * eq[k] * eq[k], drop(band, k), {}});
    }
  }
  int star_idx = -1;
  // pair_idx[(i*n + j)*4 + 2*u + v]: u, v in {0 = p, 1 = q} for components i < j
  std::vector<int> pair_idx;
  if (with_covariance) {
    star_idx = static_cast<int>(tasks.size());
    tasks.push_back({Level::GBar, 0.0, drop(band, -1), {}});
    pair_idx.assign(static_cast<std::size_t>(n * n * 4), -1);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int u = 0; u < 2; ++u)
          for (int v = 0; v < 2; ++v) {
            const double a = u == 0 ? ep[i] : eq[i];
            const double b = v == 0 ? ep[j] : eq[j];
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            pair_idx[static_cast<std::size_t>((i * n + j) * 4 + 2 * u + v)] = static_cast<int>(tasks.size());
            tasks.push_back({Level::GBar2, 0.5 * (a * a + b * b), drop(band, i, j), {}});
          }
  }

  // shape validation happens before any integration work is spent
  const double c_n = base_const(f, n, opt);
  for (const auto& t : tasks) detail::check_shape_for_eval(f, t.level, n);

  parallel_for(tasks.size(), [&](std::size_t i) { tasks[i].result = compute_mass(f, n, tasks[i], opt); });

  StandardizedMoments out;
  for (const auto& t : tasks) out.converged = out.converged && t.result.converged;
  const double F = c_n * tasks[0].result.value;
  const double F_err = c_n * tasks[0].result.error;
  out.band_prob = F;
  out.band_prob_error = F_err;
  if (!(F > kEmptyBand))
    throw Error(ErrorCode::EmptyBand, "band probability " + std::to_string(F) + " is below 1e-12");

  auto term = [&](int idx) { return idx < 0 ? Mass{} : tasks[static_cast<std::size_t>(idx)].result; };
  out.numerators.delta = Vector::Zero(n);
  out.numerators.lambda_diag = Vector::Zero(n);
  Vector delta_err = Vector::Zero(n), lambda_err = Vector::Zero(n);
  for (int k = 0; k < n; ++k) {
    const Mass mp = term(p_idx[k]);
    const Mass mq = term(q_idx[k]);
    out.numerators.delta[k] = c_n * (mp.value - mq.value);
    delta_err[k] = c_n * (mp.error + mq.error);
    const double lp = p_idx[k] < 0 ? 0.0 : ep[k] * mp.value;
    const double lq = q_idx[k] < 0 ? 0.0 : eq[k] * mq.value;
    out.numerators.lambda_diag[k] = c_n * (lp - lq);
    lambda_err[k] = c_n * ((p_idx[k] < 0 ? 0.0 : std::abs(ep[k]) * mp.error) +
                           (q_idx[k] < 0 ? 0.0 : std::abs(eq[k]) * mq.error));
  }
  out.mean = out.numerators.delta / F;
  out.mean_error = (delta_err + out.mean.cwiseAbs() * F_err) / F;
  if (!with_covariance) return out;

  const Mass star = term(star_idx);
  Matrix second = Matrix::Zero(n, n), second_err = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    second(k, k) = (out.numerators.lambda_diag[k] + c_n * star.value) / F;
    second_err(k, k) = (lambda_err[k] + c_n * star.error + std::abs(second(k, k)) * F_err) / F;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double num = 0.0, num_err = 0.0;
      for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v) {
          const Mass mt = term(pair_idx[static_cast<std::size_t>((i * n + j) * 4 + 2 * u + v)]);
          const double sign = (u == v) ? 1.0 : -1.0;
          num += sign * mt.value;
          num_err += mt.error;
        }
      second(i, j) = second(j, i) = c_n * num / F;
      second_err(i, j) = second_err(j, i) = (c_n * num_err + std::abs(second(i, j)) * F_err) / F;
    }
  out.upsilon = second - out.mean * out.mean.transpose();
  out.upsilon_error = second_err + out.mean.cwiseAbs() * out.mean_error.transpose() +
                      out.mean_error * out.mean.cwiseAbs().transpose();
  return out;
}

namespace {

struct UnivariateParts {
  double eta_p, eta_q, F, delta, c1;
};

double standard_interval(const GeneratorFamily& f, double a, double b) {
  auto cdf = [&](double x) { return standard_marginal_cdf(f, 1, x); };
  if (a >= 0.0) return cdf(-a) - cdf(-b);
  if (b <= 0.0) return cdf(b) - cdf(a);
  return 1.0 - cdf(a) - cdf(-b);
}

double gbar_tail(const GeneratorFamily& f, double eta) {
  return std::isinf(eta) ? 0.0 : eval_generator(f, Level::GBar, 1, 0.5 * eta * eta);
}

UnivariateParts univariate_parts(const EllipticalDist& dist, double p, double q, const MeasureOptions& opt) {
  if (dist.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "univariate measure needs a 1-dimensional model");
  TruncationBand{Vector::Constant(1, p), Vector::Constant(1, q)}.validate(1);
  const GeneratorFamily& f = dist.family();
  UnivariateParts u{};
  u.eta_p = p <= 0.0 ? -kInf : standard_marginal_quantile(f, 1, p);
  u.eta_q = q >= 1.0 ? kInf : standard_marginal_quantile(f, 1, q);
  if (opt.path == Path::Generic) {
    u.c1 = shifted_norm_const(f, 1, Level::G, 0.0, 1, ConstMethod::Quadrature);
    auto dens = [&](double t) { return u.c1 * eval_generator(f, Level::G, 1, 0.5 * t * t); };
    u.F = quad::integrate(dens, u.eta_p, u.eta_q, quad::Tolerance{1e-15, 1e-13, 1000}, {0.0}).value;
  } else {
    u.c1 = norm_const(f, Level::G, 1);
    u.F = standard_interval(f, u.eta_p, u.eta_q);
  }
  if (!(u.F > kEmptyBand))
    throw Error(ErrorCode::EmptyBand, "band probability " + std::to_string(u.F) + " is below 1e-12");
  u.delta = u.c1 * (gbar_tail(f, u.eta_p) - gbar_tail(f, u.eta_q));
  return u;
}

// (c_1/c_1*) F_{Y*}(eta_p, eta_q) = c_1 int_{eta_p}^{eta_q} Gbar_1(t^2/2) dt
double second_moment_term(const GeneratorFamily& f, const UnivariateParts& u, const MeasureOptions& opt) {
  const double a = u.eta_p, b = u.eta_q;
  if (opt.path == Path::Auto) {
    switch (f.kind) {
      case FamilyKind::Normal: return u.F;
      case FamilyKind::StudentT: {
        const double m = f.shape;
        const double s = std::sqrt((m - 2.0) / m);
        return m / (m - 2.0) * (student_t_cdf(b * s, m - 2.0) - student_t_cdf(a * s, m - 2.0));
      }
      case FamilyKind::PearsonVII: {
        const double nu = 2.0 * f.shape - 3.0;
        const double s = std::sqrt(nu);
        return (student_t_cdf(b * s, nu) - student_t_cdf(a * s, nu)) / nu;
      }
      case FamilyKind::Laplace: {
        // Y* has density (1+|y|)e^{-|y|}/4
        auto cdf = [](double y) {
          if (std::isinf(y)) return y > 0 ? 1.0 : 0.0;
          const double tail = (2.0 + std::abs(y)) * std::exp(-std::abs(y)) / 4.0;
          return y < 0 ? tail : 1.0 - tail;
        };
        return 2.0 * (cdf(b) - cdf(a));
      }
      case FamilyKind::Logistic: break;
    }
  }
  auto integrand = [&](double t) { return eval_generator(f, Level::GBar, 1, 0.5 * t * t); };
  const auto r = quad::integrate(integrand, a, b, quad::Tolerance{1e-15, 1e-13, 1000}, {0.0});
  return u.c1 * r.value;
}

}  // namespace

ScalarResult dte(const EllipticalDist& dist, double p, double q, const MeasureOptions& opt) {
  const auto u = univariate_parts(dist, p, q, opt);
  const double sigma = std::sqrt(dist.sigma()(0, 0));
  ScalarResult r;
  r.value = dist.mu()[0] + sigma * u.delta / u.F;
  r.error = 1e-13 * (std::abs(dist.mu()[0]) + sigma);
  r.band_prob = u.F;
  return r;
}

ScalarResult dtv(const EllipticalDist& dist, double p, double q, const MeasureOptions& opt) {
  norm_const(dist.family(), Level::GBar, 1);  // rejects shapes without a finite variance constant
  const auto u = univariate_parts(dist, p, q, opt);
  const GeneratorFamily& f = dist.family();
  const double lp = std::isinf(u.eta_p) ? 0.0 : u.eta_p * gbar_tail(f, u.eta_p);
  const double lq = std::isinf(u.eta_q) ? 0.0 : u.eta_q * gbar_tail(f, u.eta_q);
  const double lambda = u.c1 * (lp - lq);
  const double second = (lambda + second_moment_term(f, u, opt)) / u.F;
  const double mean = u.delta / u.F;
  ScalarResult r;
  r.value = std::max(0.0, dist.sigma()(0, 0) * (second - mean * mean));
  r.error = 1e-12 * dist.sigma()(0, 0) * (1.0 + std::abs(second));
  r.band_prob = u.F;
  return r;
}

VectorResult standardized_mdte(const EllipticalDist& dist, const StandardizedBand& band, const MeasureOptions& opt) {
  const auto sm = standardized_moments(dist.family(), dist.dim(), band, false, opt);
  return VectorResult{sm.mean, sm.mean_error, sm.band_prob, sm.band_prob_error, sm.converged};
}

VectorResult mdte(const EllipticalDist& dist, const TruncationBand& band, const MeasureOptions& opt) {
  const auto sband = standardize_band(dist, band);
  const auto sm = standardized_moments(dist.family(), dist.dim(), sband, false, opt);
  const Matrix& s = dist.sqrt_sigma();
  return VectorResult{dist.mu() + s * sm.mean, s.cwiseAbs() * sm.mean_error, sm.band_prob, sm.band_prob_error,
                      sm.converged};
}

MatrixResult mdtcov(const EllipticalDist& dist, const TruncationBand& band, const MeasureOptions& opt) {
  const auto sband = standardize_band(dist, band);
  const auto sm = standardized_moments(dist.family(), dist.dim(), sband, true, opt);
  const Matrix& s = dist.sqrt_sigma();
  Matrix cov = s * sm.upsilon * s;
  cov = 0.5 * (cov + cov.transpose()).eval();
  return MatrixResult{cov, abs_sandwich(s, sm.upsilon_error), sm.band_prob, sm.band_prob_error, sm.converged};
}

MatrixResult correlation_from(const MatrixResult& cov) {
  const auto n = cov.value.rows();
  MatrixResult out = cov;
  Vector sd(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(cov.value(k, k) > 0.0))
      throw Error(ErrorCode::DegenerateVariance, "truncated variance of component " + std::to_string(k) + " is not positive");
    sd[k] = std::sqrt(cov.value(k, k));
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) {
        out.value(i, j) = 1.0;
        out.error(i, j) = 0.0;
        continue;
      }
      const double r = cov.value(i, j) / (sd[i] * sd[j]);
      out.value(i, j) = r;
      out.error(i, j) = cov.error(i, j) / (sd[i] * sd[j]) +
                        std::abs(r) * 0.5 * (cov.error(i, i) / cov.value(i, i) + cov.error(j, j) / cov.value(j, j));
    }
  return out;
}

MatrixResult mdtcorr(const EllipticalDist& dist, const TruncationBand& band, const MeasureOptions& opt) {
  return correlation_from(mdtcov(dist, band, opt));
}

MatrixResult mdtccov(const EllipticalDist& dist, const TruncationBand& band, const MeasureOptions& opt) {
  const auto sband = standardize_band(dist, band);
  const auto sm = standardized_moments(dist.family(), dist.dim(), sband, true, opt);
  const Matrix& s = dist.sqrt_sigma();
  Matrix cov = s * sm.upsilon * s;
  cov = 0.5 * (cov + cov.transpose()).eval();
  const Vector m = dist.mu() + s * sm.mean;
  const Vector& mu = dist.mu();
  MatrixResult out;
  out.value = cov + m * m.transpose() - m * mu.transpose() - mu * m.transpose() + mu * mu.transpose();
  const Vector m_err = s.cwiseAbs() * sm.mean_error;
  const Vector d = (m - mu).cwiseAbs();
  out.error = abs_sandwich(s, sm.upsilon_error) + d * m_err.transpose() + m_err * d.transpose();
  out.band_prob = sm.band_prob;
  out.band_prob_error = sm.band_prob_error;
  out.converged = sm.converged;
  return out;
}

VectorResult mtce(const EllipticalDist& dist, const Vector& p, const MeasureOptions& opt) {
  return mdte(dist, TruncationBand{p, Vector::Ones(dist.dim())}, opt);
}

MatrixResult mtcov(const EllipticalDist& dist, const Vector& p, const MeasureOptions& opt) {
  return mdtcov(dist, TruncationBand{p, Vector::Ones(dist.dim())}, opt);
}

RiskReport risk_report(const EllipticalDist& dist, const TruncationBand& band, const MeasureOptions& opt) {
  const auto sband = standardize_band(dist, band);
  const auto sm = standardized_moments(dist.family(), dist.dim(), sband, true, opt);
  const Matrix& s = dist.sqrt_sigma();
  MatrixResult cov;
  cov.value = s * sm.upsilon * s;
  cov.value = 0.5 * (cov.value + cov.value.transpose()).eval();
  cov.error = abs_sandwich(s, sm.upsilon_error);
  const auto corr = correlation_from(cov);
  RiskReport r;
  r.mdte = dist.mu() + s * sm.mean;
  r.mdtcov = cov.value;
  r.mdtcorr = corr.value;
  r.band_prob = sm.band_prob;
  r.diagnostics.mdte_error = s.cwiseAbs() * sm.mean_error;
  r.diagnostics.mdtcov_error = cov.error;
  r.diagnostics.mdtcorr_error = corr.error;
  r.diagnostics.band_prob_error = sm.band_prob_error;
  r.diagnostics.converged = sm.converged;
  return r;
}

}  // namespace ellrisk
