#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ionifo/config.hpp"
#include "ionifo/errors.hpp"
#include "ionifo/linalg.hpp"
#include "ionifo/quadrature.hpp"

// Inverse-engineered reference trajectories.  A trajectory is a
// polynomial in reduced time s = t/t_f whose six boundary values
// alpha, alpha_dot, alpha_ddot vanish at both ends, so the ion starts
// and ends at rest and the matching driving force m*(alpha_dd + w^2 alpha)
// switches on and off smoothly.

namespace ionifo {

enum class TrajectoryKind { alpha_a, alpha_b, custom };

struct PolynomialTrajectory {
  std::vector<double> coeffs;  // meters; coeffs[j] multiplies (t/t_f)^j
  double t_final = 0.0;        // s
  TrajectoryKind kind = TrajectoryKind::custom;
};

struct TrajectoryDerivatives {
  double alpha = 0.0;       // m
  double alpha_dot = 0.0;   // m/s
  double alpha_ddot = 0.0;  // m/s^2
};

namespace detail {

// Error-free transformations: the returned value plus `err` equals the
// exact sum/product of the operands.
inline double two_sum(double a, double b, double& err) {
  const double s = a + b;
  const double bb = s - a;
  err = (a - (s - bb)) + (b - bb);
  return s;
}

inline double two_prod(double a, double b, double& err) {
  const double p = a * b;
  err = std::fma(a, b, -p);
  return p;
}

}  // namespace detail

// Compensated coupled Horner evaluation of alpha and its first two time
// derivatives.  The degree-8 designs carry large alternating monomial
// coefficients, and the boundary zeros of alpha/alpha_dot/alpha_ddot
// survive in floating point only if the evaluation error tracks the
// value, not the coefficient magnitude; the error channels below keep
// every output accurate to ~1 ulp of the true polynomial value.
inline TrajectoryDerivatives evaluate(const PolynomialTrajectory& traj, double t) {
  const double tf = traj.t_final;
  const double slack = 1e-9 * tf;
  if (t < -slack || t > tf + slack) {
    throw domain_error("evaluate: t outside [0, t_final]");
  }
  const double s = t / tf;
  double p = 0.0, dp = 0.0, ddp = 0.0;
  double ep = 0.0, ed = 0.0, edd = 0.0;
  for (std::size_t j = traj.coeffs.size(); j-- > 0;) {
    const double p_old = p, ep_old = ep;
    const double d_old = dp, ed_old = ed;
    double e1, e2;
    const double t2 = detail::two_prod(ddp, s, e1);
    ddp = detail::two_sum(t2, 2.0 * d_old, e2);
    edd = edd * s + (e1 + e2 + 2.0 * ed_old);
    const double t1 = detail::two_prod(d_old, s, e1);
    dp = detail::two_sum(t1, p_old, e2);
    ed = ed_old * s + (e1 + e2 + ep_old);
    const double t0 = detail::two_prod(p_old, s, e1);
    p = detail::two_sum(t0, traj.coeffs[j], e2);
    ep = ep_old * s + (e1 + e2);
  }
  return {p + ep, (dp + ed) / tf, (ddp + edd) / (tf * tf)};
}

// Force that drives the trajectory: f(t) = m*(alpha_dd + omega^2 alpha).
inline double driving_force(const PolynomialTrajectory& traj,
                            const PhysicalConfig& cfg, double t) {
  const TrajectoryDerivatives d = evaluate(traj, t);
  return cfg.mass * (d.alpha_ddot + cfg.omega * cfg.omega * d.alpha);
}

// S = integral of alpha over [0, t_f]; closed form from the coefficients.
inline double sensitivity(const PolynomialTrajectory& traj) {
  // Compensated sum: the degree-8 coefficients cancel to ~4 digits here.
  double sum = 0.0, comp = 0.0;
  for (std::size_t j = traj.coeffs.size(); j-- > 0;) {
    double err;
    sum = detail::two_sum(sum, traj.coeffs[j] / static_cast<double>(j + 1), err);
    comp += err;
  }
  return traj.t_final * (sum + comp);
}

// Integral of alpha^3; measures how much a cubic potential term would
// disturb this trajectory.  Degree <= 24 integrand, exact for the
// default 256-node rule.
inline double cubic_metric(const PolynomialTrajectory& traj,
                           const Quadrature& q = {}) {
  auto f = [&](double t) {
    const double a = evaluate(traj, t).alpha;
    return a * a * a;
  };
  return integrate(f, 0.0, traj.t_final, q);
}

namespace detail {

// Round to `bits` significant bits.  The designed coefficient sets are
// small-integer multiples of one or three free parameters; snapping the
// parameters first keeps those multiples exactly representable, so the
// six boundary cancellations hold to the last bit of the stored
// coefficients rather than to ~1e-16 of their (large) magnitude.
inline double chop_mantissa(double x, int bits) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  int e;
  const double m = std::frexp(x, &e);
  return std::ldexp(std::round(std::ldexp(m, bits)), e - bits);
}

}  // namespace detail

// Degree-6 trajectory fixed by the six boundary conditions plus the
// midpoint value alpha(t_f/2) = M; the unique solution is
// 64*M*s^3*(1-s)^3.  M is snapped to 45 significant bits so the x64 and
// x192 coefficients are exact (relative change < 3e-14).
inline PolynomialTrajectory design_alpha_A(const PhysicalConfig& cfg,
                                           double midpoint_M) {
  if (!std::isfinite(midpoint_M)) {
    throw domain_error("design_alpha_A: midpoint must be finite");
  }
  const double m = detail::chop_mantissa(midpoint_M, 45);
  PolynomialTrajectory traj;
  traj.coeffs = {0.0, 0.0, 0.0, 64.0 * m, -192.0 * m, 192.0 * m, -64.0 * m};
  traj.t_final = cfg.t_final;
  traj.kind = TrajectoryKind::alpha_a;
  return traj;
}

// Degree-8 trajectory: six boundary conditions, prescribed sensitivity
// integral, and the two interior values alpha(t_f/5) = alpha(4 t_f/5) = v
// that shape the plateau.  Writing alpha = s^3 (1-s)^3 (p0 + p1 s + p2 s^2)
// meets the boundary conditions identically and reduces the fit to a
// 3x3 system with condition number ~55, where the direct 9x9 monomial
// system loses seven digits.  The integral rows are Beta(4+k, 4).
inline PolynomialTrajectory design_alpha_B(const PhysicalConfig& cfg,
                                           double target_sensitivity, double v) {
  if (!std::isfinite(target_sensitivity) || !std::isfinite(v)) {
    throw domain_error("design_alpha_B: target sensitivity and v must be finite");
  }
  Matrix a = {{1.0 / 140.0, 1.0 / 280.0, 1.0 / 504.0},
              {1.0, 0.2, 0.04},
              {1.0, 0.8, 0.64}};
  const double w = 0.004096;  // s^3 (1-s)^3 at the passage points
  std::vector<double> b = {target_sensitivity / cfg.t_final, v / w, v / w};
  std::vector<double> p = solve_linear(a, b);
  // 44-bit parameters keep every +-1/+-3 combination below exact.
  for (double& pk : p) pk = detail::chop_mantissa(pk, 44);
  PolynomialTrajectory traj;
  traj.coeffs.assign(9, 0.0);
  const double base[4] = {1.0, -3.0, 3.0, -1.0};  // s^3 (1-s)^3 expansion
  for (int k = 0; k < 3; ++k) {
    for (int d = 0; d < 4; ++d) {
      traj.coeffs[3 + k + d] += base[d] * p[k];
    }
  }
  traj.t_final = cfg.t_final;
  traj.kind = TrajectoryKind::alpha_b;
  return traj;
}

// Pick the plateau value v in [v_range] that minimizes |cubic_metric| of
// the matching degree-8 design.  Golden-section search down to 0.1 nm.
inline double optimize_v(const PhysicalConfig& cfg, double target_sensitivity,
                         std::pair<double, double> v_range,
                         const Quadrature& q = {}) {
  double lo = v_range.first, hi = v_range.second;
  if (!(lo < hi)) throw domain_error("optimize_v: empty range");
  auto objective = [&](double v) {
    return std::abs(cubic_metric(design_alpha_B(cfg, target_sensitivity, v), q));
  };
  constexpr double inv_phi = 0.6180339887498949;
  const double resolution = 0.1e-9;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  while (hi - lo > resolution) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace ionifo
