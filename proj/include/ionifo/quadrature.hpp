#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <type_traits>
#include <utility>
#include <vector>

#include "ionifo/errors.hpp"

// Gauss-Legendre quadrature.  Nodes/weights are generated by Newton
// iteration on the Legendre recurrence — deterministic for a given node
// count — and cached per thread.  An n-node rule integrates polynomials
// of degree 2n-1 exactly, far beyond anything the trajectories need.

namespace ionifo {

struct Quadrature {
  enum class Scheme { gauss_legendre };
  int node_count = 256;
  Scheme scheme = Scheme::gauss_legendre;
};

namespace detail {

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;
};

// Newton solve for the roots of P_n using the standard Chebyshev-based
// initial guess; symmetric pairs are generated together.
inline GaussRule make_gauss_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Evaluate P_n(x) and P_n'(x) via the three-term recurrence.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

inline const GaussRule& gauss_rule(int n) {
  thread_local std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_rule(n)).first;
  return it->second;
}

inline bool value_is_nan(double v) { return std::isnan(v); }
inline bool value_is_nan(const std::complex<double>& v) {
  return std::isnan(v.real()) || std::isnan(v.imag());
}

}  // namespace detail

// Integrate f over [a, b].  Works for real- or complex-valued integrands;
// a NaN anywhere in the sampled values aborts with a numeric_error.
template <class F>
auto integrate(F&& f, double a, double b, const Quadrature& q = {}) {
  using result_t = std::decay_t<decltype(f(a))>;
  if (!(a <= b)) throw domain_error("integrate: require a <= b");
  if (q.node_count < 64) throw domain_error("integrate: node_count must be >= 64");
  const auto& rule = detail::gauss_rule(q.node_count);
  const double mid = 0.5 * (a + b);
  const double halfw = 0.5 * (b - a);
  result_t acc{};
  for (int i = 0; i < q.node_count; ++i) {
    result_t v = f(mid + halfw * rule.nodes[i]);
    if (detail::value_is_nan(v)) throw numeric_error("integrate: NaN in integrand");
    acc += rule.weights[i] * v;
  }
  return acc * halfw;
}

}  // namespace ionifo
