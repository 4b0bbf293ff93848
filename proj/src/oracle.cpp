#include "ellrisk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>

#include "ellrisk/error.hpp"
#include "ellrisk/parallel.hpp"

namespace ellrisk {

namespace {

constexpr std::size_t kChunk = 65536;
constexpr std::size_t kMinAccepted = 100;

// 5-point Gauss-Legendre on [-1, 1]
constexpr double kGlX[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                            0.9061798459386640};
constexpr double kGlW[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                            0.2369268850561891};

std::mt19937_64 chunk_engine(std::uint64_t seed, std::size_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

class SphericalSampler {
 public:
  SphericalSampler(const GeneratorFamily& f, int n) : family_(f), n_(n) {
    if (n < 1) throw Error(ErrorCode::DomainError, "dimension must be at least 1");
    detail::check_shape_for_eval(f, Level::G, n);
    if (f.kind != FamilyKind::Normal && f.kind != FamilyKind::StudentT) table_ = std::make_unique<RadialTable>(f, n);
  }

  // Writes one draw into y[0..n).
  void draw(std::mt19937_64& gen, double* y) const {
    std::normal_distribution<double> z;
    double norm2 = 0.0;
    for (int i = 0; i < n_; ++i) {
      y[i] = z(gen);
      norm2 += y[i] * y[i];
    }
    if (family_.kind == FamilyKind::Normal) return;
    double scale;
    if (family_.kind == FamilyKind::StudentT) {
      std::chi_squared_distribution<double> chi(family_.shape);
      scale = 1.0 / std::sqrt(chi(gen) / family_.shape);
    } else {
      std::uniform_real_distribution<double> u01;
      double u;
      do u = u01(gen);
      while (u <= 0.0);
      scale = table_->quantile(u) / std::sqrt(norm2);
    }
    for (int i = 0; i < n_; ++i) y[i] *= scale;
  }

 private:
  GeneratorFamily family_;
  int n_;
  std::unique_ptr<RadialTable> table_;
};

struct Accumulator {
  std::size_t accepted = 0;
  Vector s1;
  Matrix s2, s3, s4;  // s3(i,j) = sum d_i^2 d_j, s4(i,j) = sum d_i^2 d_j^2

  explicit Accumulator(int n) : s1(Vector::Zero(n)), s2(Matrix::Zero(n, n)), s3(Matrix::Zero(n, n)), s4(Matrix::Zero(n, n)) {}

  void add(const Vector& d) {
    ++accepted;
    s1 += d;
    const Vector d2 = d.cwiseProduct(d);
    s2.noalias() += d * d.transpose();
    s3.noalias() += d2 * d.transpose();
    s4.noalias() += d2 * d2.transpose();
  }
  void merge(const Accumulator& o) {
    accepted += o.accepted;
    s1 += o.s1;
    s2 += o.s2;
    s3 += o.s3;
    s4 += o.s4;
  }
};

// accept(y, x) decides membership; moments are of x - reference.
OracleEstimate run_oracle(const EllipticalDist& dist, std::size_t count, std::uint64_t seed,
                          const std::function<bool(const Vector&, const Vector&)>& accept) {
  if (count < 1) throw Error(ErrorCode::DomainError, "count must be at least 1");
  const int n = dist.dim();
  const SphericalSampler sampler(dist.family(), n);
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<Accumulator> acc(chunks, Accumulator(n));
  const Matrix& s = dist.sqrt_sigma();
  parallel_for(chunks, [&](std::size_t c) {
    auto gen = chunk_engine(seed, c);
    const std::size_t begin = c * kChunk, end = std::min(count, begin + kChunk);
    Vector y(n), x(n);
    for (std::size_t k = begin; k < end; ++k) {
      sampler.draw(gen, y.data());
      x.noalias() = s * y;
      x += dist.mu();
      if (accept(y, x)) acc[c].add(x - dist.mu());
    }
  });
  Accumulator total(n);
  for (const auto& a : acc) total.merge(a);

  OracleEstimate est;
  est.n_samples = count;
  est.n_accepted = total.accepted;
  est.seed = seed;
  const double N = static_cast<double>(count);
  est.band_prob = total.accepted / N;
  est.band_prob_se = std::sqrt(std::max(est.band_prob * (1.0 - est.band_prob), 1.0 / N) / N);
  if (total.accepted < kMinAccepted)
    throw Error(ErrorCode::TooFewAccepted,
                std::to_string(total.accepted) + " accepted draws out of " + std::to_string(count) + " (need 100)");
  const double A = static_cast<double>(total.accepted);
  const Vector m = total.s1 / A;
  const Matrix e2 = total.s2 / A, e3 = total.s3 / A, e4 = total.s4 / A;
  Matrix cov = e2 - m * m.transpose();
  cov *= A / (A - 1.0);
  cov = 0.5 * (cov + cov.transpose()).eval();
  est.mean = dist.mu() + m;
  est.cov = cov;
  est.se_mean = (cov.diagonal().cwiseMax(0.0) / A).cwiseSqrt();
  est.se_cov = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double fourth = e4(i, j) - 2.0 * m[j] * e3(i, j) - 2.0 * m[i] * e3(j, i) + m[j] * m[j] * e2(i, i) +
                            m[i] * m[i] * e2(j, j) + 4.0 * m[i] * m[j] * e2(i, j) - 3.0 * m[i] * m[i] * m[j] * m[j];
      est.se_cov(i, j) = std::sqrt(std::max(fourth - cov(i, j) * cov(i, j), 0.0) / A);
    }
  return est;
}

}  // namespace

RadialTable::RadialTable(const GeneratorFamily& family, int n) : family_(family), n_(n) {
  x_.resize(kNodes + 1);
  for (int i = 0; i <= kNodes; ++i) x_[i] = 0.5 * (1.0 - std::cos(std::numbers::pi * i / kNodes));
  x_.front() = 0.0;
  x_.back() = 1.0;
  cum_.assign(kNodes + 1, 0.0);
  for (int i = 0; i < kNodes; ++i) cum_[i + 1] = cum_[i] + partial(i, x_[i + 1]);
  total_ = cum_.back();
  if (!(total_ > 0.0) || !std::isfinite(total_))
    throw Error(ErrorCode::IntegralDiverged, "radial law of " + family.describe() + " is not normalizable");
  for (double& c : cum_) c /= total_;
  cum_.back() = 1.0;

  // Fritsch-Carlson slopes of x as a function of F
  std::vector<double> sec(kNodes);
  for (int i = 0; i < kNodes; ++i) {
    const double dF = cum_[i + 1] - cum_[i];
    sec[i] = dF > 0.0 ? (x_[i + 1] - x_[i]) / dF : 0.0;
  }
  slope_.assign(kNodes + 1, 0.0);
  slope_[0] = sec[0];
  slope_[kNodes] = sec[kNodes - 1];
  for (int i = 1; i < kNodes; ++i) {
    const double a = sec[i - 1], b = sec[i];
    slope_[i] = (a > 0.0 && b > 0.0) ? 2.0 * a * b / (a + b) : 0.0;
  }
}

double RadialTable::density_x(double x) const {
  if (x >= 1.0) return 0.0;
  const double r = x / (1.0 - x);
  const double g = eval_generator(family_, Level::G, n_, 0.5 * r * r);
  const double jac = 1.0 / ((1.0 - x) * (1.0 - x));
  return (n_ == 1 ? 1.0 : std::pow(r, n_ - 1)) * g * jac;
}

double RadialTable::partial(int i, double x) const {
  const double a = x_[i];
  const double half = 0.5 * (x - a), mid = 0.5 * (x + a);
  double s = 0.0;
  for (int k = 0; k < 5; ++k) s += kGlW[k] * density_x(mid + half * kGlX[k]);
  return s * half;
}

double RadialTable::cdf(double r) const {
  if (!(r > 0.0)) return 0.0;
  if (std::isinf(r)) return 1.0;
  const double x = r / (1.0 + r);
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const int i = static_cast<int>(it - x_.begin()) - 1;
  if (i >= kNodes) return 1.0;
  return std::min(1.0, cum_[i] + partial(i, x) / total_);
}

double RadialTable::quantile(double u) const {
  if (!(u > 0.0)) return 0.0;
  if (u >= 1.0) return std::numeric_limits<double>::infinity();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  const int i = std::clamp(static_cast<int>(it - cum_.begin()) - 1, 0, kNodes - 1);
  const double F0 = cum_[i], F1 = cum_[i + 1];
  const double h = F1 - F0;
  const double lo = x_[i], hi = x_[i + 1];
  double x;
  if (h <= 0.0) {
    x = lo;
  } else {
    const double t = (u - F0) / h;
    const double t2 = t * t, t3 = t2 * t;
    x = (2 * t3 - 3 * t2 + 1) * lo + (t3 - 2 * t2 + t) * h * slope_[i] + (-2 * t3 + 3 * t2) * hi +
        (t3 - t2) * h * slope_[i + 1];
    x = std::clamp(x, lo, hi);
    // Newton polish against the exact partial mass, bracketed in [lo, hi]
    double a = lo, b = hi;
    for (int it_n = 0; it_n < 4; ++it_n) {
      const double resid = F0 + partial(i, x) / total_ - u;
      if (std::abs(resid) <= 1e-11) break;
      if (resid > 0) b = x;
      else a = x;
      const double d = density_x(x) / total_;
      double nx = d > 0.0 ? x - resid / d : 0.5 * (a + b);
      if (!(nx > a && nx < b)) nx = 0.5 * (a + b);
      x = nx;
    }
  }
  if (x >= 1.0) return std::numeric_limits<double>::max();
  return x / (1.0 - x);
}

Matrix sample_spherical(const GeneratorFamily& family, int n, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::DomainError, "count must be at least 1");
  const SphericalSampler sampler(family, n);
  Matrix out(static_cast<Eigen::Index>(count), n);
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    auto gen = chunk_engine(seed, c);
    std::vector<double> y(n);
    const std::size_t begin = c * kChunk, end = std::min(count, begin + kChunk);
    for (std::size_t k = begin; k < end; ++k) {
      sampler.draw(gen, y.data());
      for (int i = 0; i < n; ++i) out(static_cast<Eigen::Index>(k), i) = y[i];
    }
  });
  return out;
}

OracleEstimate oracle_band_moments(const EllipticalDist& dist, const StandardizedBand& band, std::size_t count,
                                   std::uint64_t seed) {
  const int n = dist.dim();
  if (band.eta_p.size() != n || band.eta_q.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "standardized band has wrong length");
  for (int k = 0; k < n; ++k)
    if (!(band.eta_p[k] < band.eta_q[k]))
      throw Error(ErrorCode::BandInvertedAfterStandardization, "eta_p >= eta_q in component " + std::to_string(k));
  return run_oracle(dist, count, seed, [&](const Vector& y, const Vector&) {
    for (int k = 0; k < n; ++k)
      if (!(y[k] > band.eta_p[k] && y[k] < band.eta_q[k])) return false;
    return true;
  });
}

OracleEstimate oracle_direct_moments(const EllipticalDist& dist, const TruncationBand& band, std::size_t count,
                                     std::uint64_t seed) {
  const int n = dist.dim();
  band.validate(n);
  const Vector lo = var_vector(dist, band.p);
  const Vector hi = var_vector(dist, band.q);
  return run_oracle(dist, count, seed, [&](const Vector&, const Vector& x) {
    for (int k = 0; k < n; ++k)
      if (!(x[k] > lo[k] && x[k] < hi[k])) return false;
    return true;
  });
}

}  // namespace ellrisk
