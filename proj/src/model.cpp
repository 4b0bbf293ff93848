#include "ellrisk/model.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "ellrisk/error.hpp"
#include "ellrisk/quadrature.hpp"
#include "ellrisk/special.hpp"

namespace ellrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

void check_component(const EllipticalDist& dist, int k) {
  if (k < 0 || k >= dist.dim())
    throw Error(ErrorCode::DimensionMismatch,
                "component index " + std::to_string(k) + " outside [0," + std::to_string(dist.dim()) + ")");
}

// Density of Y_1 for the n-dimensional spherical law with generator g_n.
class MarginalLaw {
 public:
  MarginalLaw(const GeneratorFamily& family, int n) : family_(family), n_(n) {
    if (n < 1) throw Error(ErrorCode::DomainError, "dimension must be at least 1");
    c_ = norm_const(family, Level::G, n);
    if (n == 3) {
      factor_ = 2.0 * kPi * c_;  // int_0^inf rho g((y^2+rho^2)/2) drho = Gbar(y^2/2)
    } else if (n > 1) {
      factor_ = c_ * 2.0 * std::pow(kPi, 0.5 * (n - 1)) / std::tgamma(0.5 * (n - 1));
    }
  }

  double density(double y) const {
    const double u = 0.5 * y * y;
    if (n_ == 1) return c_ * eval_generator(family_, Level::G, 1, u);
    if (n_ == 3) return factor_ * eval_generator(family_, Level::GBar, 3, u);
    auto radial = [&](double rho) {
      return std::pow(rho, n_ - 2) * eval_generator(family_, Level::G, n_, u + 0.5 * rho * rho);
    };
    const auto r = quad::integrate(radial, 0.0, kInf, quad::Tolerance{0.0, 1e-13, 1000}, {1.0});
    return factor_ * r.value;
  }

  // P(Y_1 > a) for a >= 0.
  double upper_tail(double a) const {
    auto f = [&](double y) { return density(y); };
    std::vector<double> cuts;
    if (a < 1.0) cuts.push_back(1.0);
    return quad::integrate(f, a, kInf, quad::Tolerance{1e-15, 1e-13, 1000}, cuts).value;
  }

  double cdf(double y) const {
    if (std::isinf(y)) return y > 0 ? 1.0 : 0.0;
    return y < 0.0 ? upper_tail(-y) : 1.0 - upper_tail(y);
  }

  double quantile(double level) const {
    if (level == 0.5) return 0.0;
    if (level < 0.5) return -quantile(1.0 - level);
    const double tail = 1.0 - level;
    auto g = [&](double y) { return tail - upper_tail(y); };
    double hi = 40.0;
    while (g(hi) < 0.0) {
      hi *= 2.0;
      if (hi > 1e7)
        throw Error(ErrorCode::RootNotBracketed, "quantile at level " + std::to_string(level) + " not bracketed");
    }
    std::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(50);
    auto [lo_x, hi_x] = boost::math::tools::toms748_solve(g, 0.0, hi, g(0.0), g(hi), tol, iters);
    return 0.5 * (lo_x + hi_x);
  }

 private:
  GeneratorFamily family_;
  int n_;
  double c_ = 0.0;
  double factor_ = 0.0;
};

bool has_closed_cdf(const GeneratorFamily& f) {
  return f.kind == FamilyKind::Normal || f.kind == FamilyKind::StudentT || f.kind == FamilyKind::PearsonVII;
}

// Pearson VII coordinates are t-distributed: Y_1 = T_nu / sqrt(nu), nu = 2t - n.
double pvii_dof(const GeneratorFamily& f, int n) {
  const double nu = 2.0 * f.shape - n;
  if (!(nu > 0.0))
    throw Error(ErrorCode::ShapeConstraintViolated, f.describe() + " requires t > n/2 at n=" + std::to_string(n));
  return nu;
}

}  // namespace

EllipticalDist::EllipticalDist(Vector mu, Matrix sigma, GeneratorFamily family)
    : mu_(std::move(mu)), sigma_(std::move(sigma)), family_(family) {
  const int n = static_cast<int>(mu_.size());
  if (n < 1) throw Error(ErrorCode::DimensionMismatch, "location vector is empty");
  if (sigma_.rows() != n || sigma_.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "scale matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  if (!mu_.allFinite() || !sigma_.allFinite()) throw Error(ErrorCode::DomainError, "non-finite parameters");
  const double scale = std::max(1.0, sigma_.cwiseAbs().maxCoeff());
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorCode::DomainError, "scale matrix is not symmetric");
  sigma_ = 0.5 * (sigma_ + sigma_.transpose()).eval();
  sqrt_ = sqrt_spd(sigma_);
  inv_sqrt_ = inv_sqrt_spd(sigma_);
}

EllipticalDist EllipticalDist::scaled(double b) const {
  if (!(b > 0.0)) throw Error(ErrorCode::DomainError, "scale factor must be positive");
  return EllipticalDist(b * mu_, b * b * sigma_, family_);
}

EllipticalDist EllipticalDist::shifted(const Vector& gamma) const {
  if (gamma.size() != mu_.size()) throw Error(ErrorCode::DimensionMismatch, "shift has wrong length");
  return EllipticalDist(mu_ + gamma, sigma_, family_);
}

TruncationBand TruncationBand::broadcast(int n, double p, double q) {
  return TruncationBand{Vector::Constant(n, p), Vector::Constant(n, q)};
}

void TruncationBand::validate(int n) const {
  if (p.size() != n || q.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "band needs " + std::to_string(n) + " levels per side");
  for (int k = 0; k < n; ++k) {
    if (!(p[k] >= 0.0 && p[k] <= 1.0 && q[k] >= 0.0 && q[k] <= 1.0))
      throw Error(ErrorCode::DomainError, "band levels must lie in [0,1] (component " + std::to_string(k) + ")");
    if (!(p[k] < q[k]))
      throw Error(ErrorCode::EmptyBand, "invalid band: p >= q in component " + std::to_string(k));
  }
}

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> checked_eigen(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, "matrix must be square and non-empty");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sigma + sigma.transpose()));
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "eigendecomposition failed");
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0.0) || es.eigenvalues().minCoeff() <= 1e-12 * top)
    throw Error(ErrorCode::NotPositiveDefinite, "matrix is not positive definite");
  return es;
}

}  // namespace

Matrix sqrt_spd(const Matrix& sigma) {
  const auto es = checked_eigen(sigma);
  Matrix s = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (s + s.transpose());
}

Matrix inv_sqrt_spd(const Matrix& sigma) {
  const auto es = checked_eigen(sigma);
  Matrix s = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
             es.eigenvectors().transpose();
  return 0.5 * (s + s.transpose());
}

double standard_marginal_density(const GeneratorFamily& family, int n, double y) {
  if (family.kind == FamilyKind::Normal) return normal_pdf(y);
  return MarginalLaw(family, n).density(y);
}

double standard_marginal_cdf_numeric(const GeneratorFamily& family, int n, double y) {
  return MarginalLaw(family, n).cdf(y);
}

double standard_marginal_quantile_numeric(const GeneratorFamily& family, int n, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::DomainError, "quantile level must lie in (0,1)");
  return MarginalLaw(family, n).quantile(level);
}

double standard_marginal_cdf(const GeneratorFamily& family, int n, double y) {
  switch (family.kind) {
    case FamilyKind::Normal: return normal_cdf(y);
    case FamilyKind::StudentT: return student_t_cdf(y, family.shape);
    case FamilyKind::PearsonVII: {
      const double nu = pvii_dof(family, n);
      return student_t_cdf(y * std::sqrt(nu), nu);
    }
    default: return standard_marginal_cdf_numeric(family, n, y);
  }
}

double standard_marginal_quantile(const GeneratorFamily& family, int n, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::DomainError, "quantile level must lie in (0,1)");
  if (!has_closed_cdf(family)) return standard_marginal_quantile_numeric(family, n, level);
  // closed forms evaluated on the upper half so that Q(1-p) = -Q(p) holds exactly
  if (level == 0.5) return 0.0;
  if (level < 0.5) return -standard_marginal_quantile(family, n, 1.0 - level);
  switch (family.kind) {
    case FamilyKind::Normal: return normal_quantile(level);
    case FamilyKind::StudentT:
      if (!(family.shape > 0.0)) throw Error(ErrorCode::ShapeConstraintViolated, "student-t requires m > 0");
      return student_t_quantile(level, family.shape);
    default: {
      const double nu = pvii_dof(family, n);
      return student_t_quantile(level, nu) / std::sqrt(nu);
    }
  }
}

double marginal_density(const EllipticalDist& dist, int k, double x) {
  check_component(dist, k);
  const double s = std::sqrt(dist.sigma()(k, k));
  return standard_marginal_density(dist.family(), dist.dim(), (x - dist.mu()[k]) / s) / s;
}

double marginal_cdf(const EllipticalDist& dist, int k, double x) {
  check_component(dist, k);
  const double s = std::sqrt(dist.sigma()(k, k));
  return standard_marginal_cdf(dist.family(), dist.dim(), (x - dist.mu()[k]) / s);
}

double var_quantile(const EllipticalDist& dist, int k, double level) {
  check_component(dist, k);
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::DomainError, "quantile level must lie in (0,1)");
  return dist.mu()[k] + std::sqrt(dist.sigma()(k, k)) * standard_marginal_quantile(dist.family(), dist.dim(), level);
}

EllipticalDist marginal(const EllipticalDist& dist, int k) {
  check_component(dist, k);
  const int n = dist.dim();
  GeneratorFamily f = dist.family();
  if (f.kind == FamilyKind::Logistic || f.kind == FamilyKind::Laplace) {
    if (n > 1)
      throw Error(ErrorCode::DomainError, "marginals of the " + f.name() + " family leave the family; use n = 1");
  } else if (f.kind == FamilyKind::PearsonVII) {
    f.shape -= 0.5 * (n - 1);
  }
  return EllipticalDist(Vector::Constant(1, dist.mu()[k]), Matrix::Constant(1, 1, dist.sigma()(k, k)), f);
}

Vector var_vector(const EllipticalDist& dist, const Vector& levels) {
  if (levels.size() != dist.dim()) throw Error(ErrorCode::DimensionMismatch, "level vector has wrong length");
  std::map<double, double> cache;
  Vector x(levels.size());
  for (int k = 0; k < levels.size(); ++k) {
    const double v = levels[k];
    if (v <= 0.0) {
      x[k] = -kInf;
    } else if (v >= 1.0) {
      x[k] = kInf;
    } else {
      auto it = cache.find(v);
      if (it == cache.end()) it = cache.emplace(v, standard_marginal_quantile(dist.family(), dist.dim(), v)).first;
      x[k] = dist.mu()[k] + std::sqrt(dist.sigma()(k, k)) * it->second;
    }
  }
  return x;
}

Vector standardize_point(const EllipticalDist& dist, const Vector& x) {
  const int n = dist.dim();
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "point has wrong length");
  const Matrix& w = dist.inv_sqrt_sigma();
  Vector eta(n);
  for (int i = 0; i < n; ++i) {
    double finite = 0.0, inf_coef = 0.0, inf_scale = 0.0;
    bool any_inf = false;
    for (int j = 0; j < n; ++j) {
      if (std::isinf(x[j])) {
        any_inf = true;
        const double rate = std::sqrt(dist.sigma()(j, j));
        inf_coef += w(i, j) * (x[j] > 0 ? rate : -rate);
        inf_scale += std::abs(w(i, j)) * rate;
      } else {
        finite += w(i, j) * (x[j] - dist.mu()[j]);
      }
    }
    if (any_inf && std::abs(inf_coef) > 1e-12 * inf_scale) eta[i] = std::copysign(kInf, inf_coef);
    else eta[i] = finite;
  }
  return eta;
}

StandardizedBand standardize_band(const EllipticalDist& dist, const TruncationBand& band) {
  band.validate(dist.dim());
  StandardizedBand out{standardize_point(dist, var_vector(dist, band.p)),
                       standardize_point(dist, var_vector(dist, band.q))};
  std::string bad;
  for (int k = 0; k < dist.dim(); ++k) {
    if (!(out.eta_p[k] < out.eta_q[k])) {
      if (!bad.empty()) bad += ", ";
      bad += std::to_string(k) + " (" + std::to_string(out.eta_p[k]) + " >= " + std::to_string(out.eta_q[k]) + ")";
    }
  }
  if (!bad.empty())
    throw Error(ErrorCode::BandInvertedAfterStandardization,
                "Sigma^{-1/2}(x - mu) reverses the band ordering in component(s) " + bad);
  return out;
}

EllipticalDist fit_normal_mle(const Matrix& samples) {
  const auto rows = samples.rows();
  const auto n = samples.cols();
  if (n < 1) throw Error(ErrorCode::InsufficientData, "no columns");
  if (rows < n + 1)
    throw Error(ErrorCode::InsufficientData,
                "need at least " + std::to_string(n + 1) + " observations, got " + std::to_string(rows));
  if (!samples.allFinite()) throw Error(ErrorCode::DomainError, "non-finite observation");
  const Vector mean = samples.colwise().mean().transpose();
  const Matrix centered = samples.rowwise() - mean.transpose();
  const Matrix cov = (centered.transpose() * centered) / static_cast<double>(rows);
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0.0) || es.eigenvalues().minCoeff() <= 1e-12 * top)
    throw Error(ErrorCode::SingularCovariance, "sample covariance is singular");
  return EllipticalDist(mean, cov, GeneratorFamily::normal());
}

EllipticalDist pvii_from_t(const EllipticalDist& t_dist) {
  if (t_dist.family().kind != FamilyKind::StudentT)
    throw Error(ErrorCode::DomainError, "pvii_from_t expects a Student-t model");
  const double t = 0.5 * (t_dist.family().shape + t_dist.dim());
  return EllipticalDist(t_dist.mu(), t_dist.sigma(), GeneratorFamily::pearson_vii(t));
}

EllipticalDist pvii_from_t(const EllipticalDist& t_dist, double target_t) {
  if (t_dist.family().kind != FamilyKind::StudentT)
    throw Error(ErrorCode::DomainError, "pvii_from_t expects a Student-t model");
  const double m = t_dist.family().shape;
  if (std::abs(m - (2.0 * target_t - t_dist.dim())) > 1e-12 * std::max(1.0, m))
    throw Error(ErrorCode::DimensionMismatch, "degrees of freedom must equal 2t - n");
  return pvii_from_t(t_dist);
}

}  // namespace ellrisk
