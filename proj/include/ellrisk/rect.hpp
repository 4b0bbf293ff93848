#pragma once

#include <cstdint>
#include <vector>

#include "ellrisk/generators.hpp"

namespace ellrisk {

inline constexpr std::uint64_t kDefaultSeed = 0;

// Density t -> norm_const * h(|t|^2/2 + shift) on R^m, where h is the
// generator of the given level at the original dimension n.
struct SphericalDensitySpec {
  int m = 1;
  GeneratorFamily family;
  int n = 1;
  Level level = Level::G;
  double shift = 0.0;
  double norm_const = 1.0;

  double profile(double half_norm_sq) const;
};

struct Rectangle {
  std::vector<double> lower;
  std::vector<double> upper;

  int dim() const { return static_cast<int>(lower.size()); }
};

struct Probability {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

struct IntegrationOptions {
  double accuracy = 1e-9;
  std::uint64_t seed = kDefaultSeed;
};

enum class ConstMethod { Auto, ClosedForm, Quadrature };

// Normalizing constant of t -> h_n(|t|^2/2 + shift) in m dimensions. Auto uses
// closed forms for normal, Student-t and Pearson VII and quadrature otherwise.
// ClosedForm additionally covers the logistic family through Lerch zeta.
// m = 0 returns 1/h(shift) so that the empty rectangle has probability 1.
double shifted_norm_const(const GeneratorFamily& family, int n, Level level, double shift, int m,
                          ConstMethod method = ConstMethod::Auto);

SphericalDensitySpec make_spec(const GeneratorFamily& family, int n, Level level, double shift, int m,
                               ConstMethod method = ConstMethod::Auto);

// m <= 3: nested adaptive Gauss-Kronrod; m >= 4: randomized Sobol points with
// 16 digital shifts, reporting a standard error.
Probability rectangle_prob(const SphericalDensitySpec& spec, const Rectangle& rect,
                           const IntegrationOptions& options = {});

// Product of univariate normal interval probabilities.
Probability rectangle_prob_normal(const Rectangle& rect);

// Randomized quasi-Monte Carlo estimate regardless of dimension.
Probability rectangle_prob_rqmc(const SphericalDensitySpec& spec, const Rectangle& rect,
                                const IntegrationOptions& options = {});

}  // namespace ellrisk
