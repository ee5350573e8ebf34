#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "ionifo/config.hpp"
#include "ionifo/errors.hpp"
#include "ionifo/quadrature.hpp"

// Classical dynamics of the forced oscillator in dimensionless complex
// phase space Z = Y + iP, Y = sqrt(m w / 2 hbar) y, P = p / sqrt(2 hbar m w).
// Contains the exact quadrature solution, the closed-form deviations a
// constant extra force produces, an RK4 oracle, and rotating-frame areas.

namespace ionifo {

struct ComplexPhasePoint {
  double re = 0.0;  // Y
  double im = 0.0;  // P
};

inline std::complex<double> to_complex(const ComplexPhasePoint& z) {
  return {z.re, z.im};
}
inline ComplexPhasePoint from_complex(const std::complex<double>& z) {
  return {z.real(), z.imag()};
}

// Perturbations of the ideal drive: an unknown common force c, a
// spin-signed drive error epsilon, and the potential crossing point x0.
struct PerturbationSpec {
  double c = 0.0;        // N
  double epsilon = 0.0;  // N
  double x0 = 0.0;       // m

  // Effective common force after shifting coordinates to the crossing
  // point; recomputed on demand so it can never go stale.
  double c_tilde(const PhysicalConfig& cfg) const {
    return c - spring_constant(cfg) * x0;
  }
};

struct PhaseSpacePath {
  enum class Frame { lab, rotating };
  std::vector<double> times;             // s, strictly increasing
  std::vector<ComplexPhasePoint> points;
  Frame frame = Frame::lab;
};

// Exact solution of the driven oscillator:
// Z(t) = e^{-iwt} [ Z(0) + i/sqrt(2 hbar m w) * int_0^t e^{iwτ} F(τ) dτ ].
template <class ForceFn>
ComplexPhasePoint analytic_Z(const PhysicalConfig& cfg, ForceFn&& force,
                             const ComplexPhasePoint& z0, double t,
                             const Quadrature& q = {}) {
  if (t < 0.0) throw domain_error("analytic_Z: t must be non-negative");
  const double w = cfg.omega;
  const std::complex<double> i_unit(0.0, 1.0);
  std::complex<double> drive{};
  if (t > 0.0) {
    drive = integrate(
        [&](double tau) { return std::exp(i_unit * (w * tau)) * force(tau); },
        0.0, t, q);
  }
  const std::complex<double> z =
      std::exp(-i_unit * (w * t)) *
      (to_complex(z0) + i_unit * drive / std::sqrt(2.0 * cfg.hbar * cfg.mass * w));
  return from_complex(z);
}

// Position deviation a constant extra force gamma builds up from rest:
// delta_alpha(t) = gamma/(m w^2) (1 - cos wt).
inline double delta_alpha(const PhysicalConfig& cfg, double gamma, double t) {
  if (t < 0.0) throw domain_error("delta_alpha: t must be non-negative");
  return gamma / spring_constant(cfg) * (1.0 - std::cos(cfg.omega * t));
}

// Its time derivative, gamma/(m w) sin wt.
inline double delta_alpha_dot(const PhysicalConfig& cfg, double gamma, double t) {
  if (t < 0.0) throw domain_error("delta_alpha_dot: t must be non-negative");
  return gamma / (cfg.mass * cfg.omega) * std::sin(cfg.omega * t);
}

// Running integral int_0^t delta_alpha dt' = gamma/(m w^2) (t - sin wt / w).
inline double delta_alpha_integral(const PhysicalConfig& cfg, double gamma,
                                   double t) {
  if (t < 0.0) throw domain_error("delta_alpha_integral: t must be non-negative");
  return gamma / spring_constant(cfg) * (t - std::sin(cfg.omega * t) / cfg.omega);
}

// Same deviation in complex phase space: gamma (1 - e^{-iwt}) / sqrt(2 hbar m w^3).
inline ComplexPhasePoint delta_Z(const PhysicalConfig& cfg, double gamma,
                                 double t) {
  if (t < 0.0) throw domain_error("delta_Z: t must be non-negative");
  const double w = cfg.omega;
  const std::complex<double> z =
      gamma * (1.0 - std::exp(std::complex<double>(0.0, -w * t))) /
      std::sqrt(2.0 * cfg.hbar * cfg.mass * w * w * w);
  return from_complex(z);
}

// Fixed-step RK4 for y'' + w^2 y = F/m over [0, t_final], returned as a
// dimensionless lab-frame path.  Serves as the independent oracle for
// analytic_Z and for the swept-area identities.
template <class ForceFn>
PhaseSpacePath integrate_newton(const PhysicalConfig& cfg, ForceFn&& force,
                                double y0, double v0, int steps = 100000) {
  if (steps < 1000) throw domain_error("integrate_newton: need at least 1000 steps");
  const double w2 = cfg.omega * cfg.omega;
  const double m = cfg.mass;
  const double dt = cfg.t_final / steps;
  const double y_scale = std::sqrt(m * cfg.omega / (2.0 * cfg.hbar));
  const double v_scale = std::sqrt(m / (2.0 * cfg.hbar * cfg.omega));

  PhaseSpacePath path;
  path.frame = PhaseSpacePath::Frame::lab;
  path.times.reserve(steps + 1);
  path.points.reserve(steps + 1);
  double y = y0, v = v0;
  path.times.push_back(0.0);
  path.points.push_back({y_scale * y, v_scale * v});
  for (int i = 0; i < steps; ++i) {
    const double t = i * dt;
    const auto accel = [&](double tt, double yy) {
      return force(tt) / m - w2 * yy;
    };
    const double k1y = v;
    const double k1v = accel(t, y);
    const double k2y = v + 0.5 * dt * k1v;
    const double k2v = accel(t + 0.5 * dt, y + 0.5 * dt * k1y);
    const double k3y = v + 0.5 * dt * k2v;
    const double k3v = accel(t + 0.5 * dt, y + 0.5 * dt * k2y);
    const double k4y = v + dt * k3v;
    const double k4v = accel(t + dt, y + dt * k3y);
    y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    path.times.push_back((i + 1) * dt);
    path.points.push_back({y_scale * y, v_scale * v});
  }
  return path;
}

// Signed area swept in the rotating frame Z_r = e^{iwt} Z, accumulated
// with the shoelace rule segment by segment.  The rotation needs omega,
// so the configuration comes along with the path.
inline double rotating_area(const PhysicalConfig& cfg, const PhaseSpacePath& path) {
  if (path.frame != PhaseSpacePath::Frame::lab) {
    throw domain_error("rotating_area: expects a lab-frame path");
  }
  if (path.points.size() < 2 || path.points.size() != path.times.size()) {
    throw domain_error("rotating_area: need at least two matching samples");
  }
  double area = 0.0;
  double yr_prev = 0.0, pr_prev = 0.0;
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const double c = std::cos(cfg.omega * path.times[i]);
    const double s = std::sin(cfg.omega * path.times[i]);
    const double yr = c * path.points[i].re - s * path.points[i].im;
    const double pr = s * path.points[i].re + c * path.points[i].im;
    if (i > 0) area += 0.5 * (yr_prev * pr - yr * pr_prev);
    yr_prev = yr;
    pr_prev = pr;
  }
  return area;
}

// CSV export: t_us, Y, P, frame.  Fixed 12-significant-digit formatting
// so identical runs produce identical bytes.
inline void path_to_csv(const PhaseSpacePath& path, std::ostream& out) {
  const char* frame =
      path.frame == PhaseSpacePath::Frame::lab ? "lab" : "rotating";
  out << "t_us,Y,P,frame\n";
  char buf[128];
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%s\n",
                  path.times[i] / units::us, path.points[i].re,
                  path.points[i].im, frame);
    out << buf;
  }
}

}  // namespace ionifo
