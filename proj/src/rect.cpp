#include "ellrisk/rect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "ellrisk/error.hpp"
#include "ellrisk/parallel.hpp"
#include "ellrisk/quadrature.hpp"
#include "ellrisk/sobol.hpp"
#include "ellrisk/special.hpp"

namespace ellrisk {

namespace {

constexpr double kPi = std::numbers::pi;

void check_rect(const SphericalDensitySpec& spec, const Rectangle& rect, const IntegrationOptions& options) {
  if (rect.lower.size() != rect.upper.size() || rect.dim() != spec.m)
    throw Error(ErrorCode::DimensionMismatch, "rectangle dimension does not match the density");
  for (int i = 0; i < rect.dim(); ++i) {
    if (std::isnan(rect.lower[i]) || std::isnan(rect.upper[i]) || !(rect.lower[i] < rect.upper[i]))
      throw Error(ErrorCode::DomainError, "rectangle needs lower < upper in every coordinate");
  }
  if (!(options.accuracy > 0.0)) throw Error(ErrorCode::DomainError, "accuracy must be positive");
}

double logistic_lerch_const(Level level, double shift, int m) {
  const double z = std::exp(-shift);
  const double base = std::pow(2.0 * kPi, 0.5 * m) * z;
  switch (level) {
    case Level::G: return 1.0 / (base * lerch_zeta_star(2.0, -z, 0.5 * m, 1.0));
    case Level::GBar: return 1.0 / (base * lerch_zeta_star(1.0, -z, 0.5 * m, 1.0));
    case Level::GBar2: return 1.0 / (base * lerch_zeta_star(1.0, -z, 0.5 * m + 1.0, 1.0));
  }
  return 0.0;
}

// Student-t with 2 degrees of freedom, used as the importance law on infinite axes.
double t2_cdf(double t) {
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  return 0.5 + t / (2.0 * std::sqrt(t * t + 2.0));
}
double t2_quantile(double u) { return (2.0 * u - 1.0) / std::sqrt(2.0 * u * (1.0 - u)); }
double t2_pdf(double t) { return std::pow(2.0 + t * t, -1.5); }

class NestedIntegrator {
 public:
  NestedIntegrator(const SphericalDensitySpec& spec, const Rectangle& rect, double accuracy)
      : spec_(spec), rect_(rect) {
    outer_ = quad::Tolerance{0.5 * accuracy, 1e-13, 400};
    inner_ = quad::Tolerance{1e-3 * accuracy, std::max(1e-2 * accuracy, 1e-13), 400};
  }

  Probability run() {
    const auto r = level(0, 0.0, outer_);
    Probability p;
    p.value = r.value;
    p.error = r.error + inner_.rel * std::abs(r.value) + inner_.abs;
    p.converged = r.converged && converged_;
    return p;
  }

 private:
  quad::Result level(int d, double w, const quad::Tolerance& tol) {
    const int m = spec_.m;
    if (d == m - 1) {
      auto f = [&](double t) { return spec_.profile(w + 0.5 * t * t); };
      return quad::integrate(f, rect_.lower[d], rect_.upper[d], tol, {0.0});
    }
    auto f = [&](double t) {
      const auto r = level(d + 1, w + 0.5 * t * t, inner_);
      if (!r.converged) converged_ = false;
      return r.value;
    };
    return quad::integrate(f, rect_.lower[d], rect_.upper[d], tol, {0.0});
  }

  const SphericalDensitySpec& spec_;
  const Rectangle& rect_;
  quad::Tolerance outer_, inner_;
  bool converged_ = true;
};

}  // namespace

double SphericalDensitySpec::profile(double half_norm_sq) const {
  return norm_const * eval_generator(family, level, n, half_norm_sq + shift);
}

double shifted_norm_const(const GeneratorFamily& family, int n, Level level, double shift, int m,
                          ConstMethod method) {
  if (!(shift >= 0.0)) throw Error(ErrorCode::NegativeArgument, "shift must be >= 0");
  if (std::isinf(shift)) throw Error(ErrorCode::DomainError, "shift must be finite");
  if (m < 0) throw Error(ErrorCode::DomainError, "reduced dimension must be >= 0");
  detail::check_shape_for_eval(family, level, n);
  const double at_shift = eval_generator(family, level, n, shift);
  if (m == 0) return 1.0 / at_shift;

  if (family.kind == FamilyKind::Normal && method != ConstMethod::Quadrature)
    return std::pow(2.0 * kPi, -0.5 * m) * std::exp(shift);
  if (method != ConstMethod::Quadrature) {
    if (auto law = detail::power_law(family, level, n)) return detail::power_law_norm_const(*law, shift, m);
  }
  if (method == ConstMethod::ClosedForm) {
    if (family.kind == FamilyKind::Logistic) return logistic_lerch_const(level, shift, m);
    if (family.kind == FamilyKind::Laplace && shift == 0.0) return norm_const(family, level, m);
    throw Error(ErrorCode::DomainError, "no closed form for the shifted " + family.name() + " constant");
  }
  if (!(at_shift > 0.0))
    throw Error(ErrorCode::IntegralDiverged, "generator underflows at shift " + std::to_string(shift));
  auto h = [&](double u) { return eval_generator(family, level, n, u + shift) / at_shift; };
  return generic_norm_const(h, m) / at_shift;
}

SphericalDensitySpec make_spec(const GeneratorFamily& family, int n, Level level, double shift, int m,
                               ConstMethod method) {
  return SphericalDensitySpec{m, family, n, level, shift, shifted_norm_const(family, n, level, shift, m, method)};
}

Probability rectangle_prob_normal(const Rectangle& rect) {
  if (rect.lower.size() != rect.upper.size()) throw Error(ErrorCode::DimensionMismatch, "rectangle bounds differ");
  double p = 1.0;
  for (int i = 0; i < rect.dim(); ++i) {
    if (std::isnan(rect.lower[i]) || std::isnan(rect.upper[i]) || !(rect.lower[i] < rect.upper[i]))
      throw Error(ErrorCode::DomainError, "rectangle needs lower < upper in every coordinate");
    p *= normal_interval(rect.lower[i], rect.upper[i]);
  }
  return Probability{p, 4.0 * std::numeric_limits<double>::epsilon() * (rect.dim() + 1), true};
}

Probability rectangle_prob_rqmc(const SphericalDensitySpec& spec, const Rectangle& rect,
                                const IntegrationOptions& options) {
  check_rect(spec, rect, options);
  const int m = spec.m;
  if (m == 0) return Probability{1.0, 0.0, true};
  if (m > Sobol::kMaxDim) throw Error(ErrorCode::DomainError, "at most 16 dimensions are supported");

  struct Axis {
    bool finite;
    double lo, width;  // finite: t = lo + width u; otherwise t2-cdf range [lo, lo + width]
  };
  std::vector<Axis> axes(m);
  for (int i = 0; i < m; ++i) {
    const double a = rect.lower[i], b = rect.upper[i];
    if (std::isfinite(a) && std::isfinite(b)) axes[i] = {true, a, b - a};
    else axes[i] = {false, t2_cdf(a), t2_cdf(b) - t2_cdf(a)};
  }

  constexpr int kReplicates = 16;
  constexpr std::size_t kStart = std::size_t{1} << 16;
  constexpr std::size_t kMax = std::size_t{1} << 20;

  std::vector<Sobol> streams;
  for (int r = 0; r < kReplicates; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(r), 0x5eedu};
    std::mt19937 gen(seq);
    std::vector<std::uint32_t> shift(m);
    for (auto& s : shift) s = gen();
    streams.emplace_back(m, shift);
  }
  std::vector<double> sums(kReplicates, 0.0);
  std::size_t done = 0, target = kStart;
  Probability out;
  for (;;) {
    const std::size_t count = target - done;
    parallel_for(kReplicates, [&](std::size_t r) {
      std::vector<double> u(m);
      double acc = 0.0;
      for (std::size_t k = 0; k < count; ++k) {
        streams[r].next(u.data());
        double half_sq = 0.0, weight = 1.0;
        for (int i = 0; i < m; ++i) {
          const Axis& ax = axes[i];
          double t;
          if (ax.finite) {
            t = ax.lo + ax.width * u[i];
            weight *= ax.width;
          } else {
            t = t2_quantile(ax.lo + ax.width * u[i]);
            weight *= ax.width / t2_pdf(t);
          }
          half_sq += 0.5 * t * t;
        }
        acc += weight * spec.profile(half_sq);
      }
      sums[r] += acc;
    });
    done = target;
    double mean = 0.0;
    for (double s : sums) mean += s / static_cast<double>(done);
    mean /= kReplicates;
    double var = 0.0;
    for (double s : sums) var += (s / static_cast<double>(done) - mean) * (s / static_cast<double>(done) - mean);
    var /= (kReplicates - 1);
    out.value = std::clamp(mean, 0.0, 1.0);
    out.error = std::sqrt(var / kReplicates);
    out.converged = out.error <= options.accuracy;
    if (out.converged || target >= kMax) break;
    target *= 2;
  }
  return out;
}

Probability rectangle_prob(const SphericalDensitySpec& spec, const Rectangle& rect, const IntegrationOptions& options) {
  check_rect(spec, rect, options);
  if (spec.m == 0) return Probability{1.0, 0.0, true};
  if (spec.m >= 4) return rectangle_prob_rqmc(spec, rect, options);
  Probability p = NestedIntegrator(spec, rect, options.accuracy).run();
  p.value = std::clamp(p.value, 0.0, 1.0);
  return p;
}

}  // namespace ellrisk
