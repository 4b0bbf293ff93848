#pragma once

// Globally adaptive 21-point Gauss-Kronrod quadrature with infinite ranges
// mapped onto [0, 1) by t = anchor +/- x / (1 - x).

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <queue>
#include <vector>

namespace ellrisk::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

struct Tolerance {
  double abs = 1e-12;
  double rel = 1e-10;
  int max_panels = 500;
};

namespace detail {

inline constexpr std::array<double, 11> kNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kKronrod = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208977449236, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

inline constexpr std::array<double, 5> kGauss = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

enum class Map { Finite, Upper, Lower };

struct Segment {
  Map map;
  double anchor;
};

struct Panel {
  double a, b, value, error;
  int segment;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
double mapped(F& f, const Segment& s, double x) {
  if (s.map == Map::Finite) return f(x);
  const double one_minus = 1.0 - x;
  if (one_minus <= 0.0) return 0.0;
  const double t = x / one_minus;
  const double jac = 1.0 / (one_minus * one_minus);
  const double v = f(s.map == Map::Upper ? s.anchor + t : s.anchor - t);
  const double out = v * jac;
  return std::isfinite(out) ? out : 0.0;
}

template <class F>
Panel gk21(F& f, const Segment& seg, int segment, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = mapped(f, seg, c);
  double resk = fc * kKronrod[10];
  double resg = 0.0;
  double resabs = std::abs(resk);
  std::array<double, 10> f1{}, f2{};
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kNodes[j];
    f1[j] = mapped(f, seg, c - dx);
    f2[j] = mapped(f, seg, c + dx);
    const double sum = f1[j] + f2[j];
    resk += kKronrod[j] * sum;
    resabs += kKronrod[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kGauss[j / 2] * sum;
  }
  const double mean = 0.5 * resk;
  double resasc = kKronrod[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j)
    resasc += kKronrod[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  const double ah = std::abs(h);
  resasc *= ah;
  resabs *= ah;
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return Panel{a, b, resk * h, err, segment};
}

}  // namespace detail

// Integrates f over [a, b]; either end may be infinite. Breakpoints strictly
// inside the range seed the initial partition.
template <class F>
Result integrate(F&& f, double a, double b, const Tolerance& tol, std::vector<double> breakpoints = {}) {
  using namespace detail;
  Result out;
  if (a == b) return out;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::vector<double> inner;
  for (double p : breakpoints)
    if (p > a && p < b && std::isfinite(p)) inner.push_back(p);
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());

  std::vector<Segment> segments;
  std::vector<std::vector<double>> cuts;
  const bool lo_inf = std::isinf(a);
  const bool hi_inf = std::isinf(b);
  if (!lo_inf && !hi_inf) {
    segments.push_back({Map::Finite, 0.0});
    std::vector<double> c{a};
    c.insert(c.end(), inner.begin(), inner.end());
    c.push_back(b);
    cuts.push_back(c);
  } else {
    double split;
    if (lo_inf && hi_inf) split = inner.empty() ? 0.0 : inner.front();
    else split = lo_inf ? b : a;
    if (lo_inf) {
      // (-inf, split]: x = (split - t) / (1 + split - t)
      segments.push_back({Map::Lower, split});
      std::vector<double> c{0.0};
      std::vector<double> rev;
      for (double p : inner)
        if (p < split) rev.push_back((split - p) / (1.0 + split - p));
      std::sort(rev.begin(), rev.end());
      c.insert(c.end(), rev.begin(), rev.end());
      c.push_back(1.0);
      cuts.push_back(c);
    }
    if (hi_inf) {
      segments.push_back({Map::Upper, split});
      std::vector<double> c{0.0};
      for (double p : inner)
        if (p > split) c.push_back((p - split) / (1.0 + p - split));
      c.push_back(1.0);
      cuts.push_back(c);
    }
  }

  std::priority_queue<Panel> heap;
  double total = 0.0, total_err = 0.0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (std::size_t i = 0; i + 1 < cuts[s].size(); ++i) {
      Panel p = gk21(f, segments[s], static_cast<int>(s), cuts[s][i], cuts[s][i + 1]);
      out.evaluations += 21;
      total += p.value;
      total_err += p.error;
      heap.push(p);
    }
  }
  int panels = static_cast<int>(heap.size());
  while (total_err > std::max(tol.abs, tol.rel * std::abs(total))) {
    if (panels >= tol.max_panels) {
      out.converged = false;
      break;
    }
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      out.converged = false;
      break;
    }
    heap.pop();
    const Segment& seg = segments[static_cast<std::size_t>(worst.segment)];
    Panel left = gk21(f, seg, worst.segment, worst.a, mid);
    Panel right = gk21(f, seg, worst.segment, mid, worst.b);
    out.evaluations += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
    if (panels % 64 == 0) {
      // refresh running sums to avoid cancellation drift
      auto copy = heap;
      total = 0.0;
      total_err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        total_err += copy.top().error;
        copy.pop();
      }
    }
  }
  out.value = sign * total;
  out.error = std::max(total_err, 0.0);
  return out;
}

}  // namespace ellrisk::quad
