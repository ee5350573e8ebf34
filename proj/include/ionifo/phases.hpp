#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <utility>

#include "ionifo/config.hpp"
#include "ionifo/dynamics.hpp"
#include "ionifo/errors.hpp"
#include "ionifo/quadrature.hpp"
#include "ionifo/trajectory.hpp"

// Analytic phases of the two spin branches.  Each dynamical mode carries
// theta_n(t) = -(n + 1/2) w t - G(t) with the common functional
// G(t) = m/(2 hbar) int (ydot^2 - w^2 y^2) dt' evaluated along the branch
// trajectory; interferometric phase differences reduce to closed forms in
// the trajectory integral S and the constant-force deviations.

namespace ionifo {

enum class Branch { up, down };

struct LRModeSpec {
  int n = 0;
};

struct BranchPhaseReport {
  double g_up = 0.0;               // rad
  double g_down = 0.0;             // rad
  double delta_phi = 0.0;          // rad, = g_down - g_up
  double phi_dynamical_up = 0.0;   // rad
  double phi_dynamical_down = 0.0; // rad
  double phi_geometric_up = 0.0;   // rad
  double phi_geometric_down = 0.0; // rad
};

// G(t) for an arbitrary smooth trajectory handed in as t -> (y, ydot).
template <class PathFn>
double lr_phase_G(const PhysicalConfig& cfg, PathFn&& y_path, double t,
                  const Quadrature& q = {}) {
  const double w2 = cfg.omega * cfg.omega;
  auto integrand = [&](double tt) {
    const auto [y, ydot] = y_path(tt);
    return ydot * ydot - w2 * y * y;
  };
  return cfg.mass / (2.0 * cfg.hbar) * integrate(integrand, 0.0, t, q);
}

// Mode phase theta_n = -(n + 1/2) w t - G.
inline double theta_n(const PhysicalConfig& cfg, const LRModeSpec& mode,
                      double g_value, double t) {
  if (mode.n < 0) throw domain_error("theta_n: mode index must be >= 0");
  return -(mode.n + 0.5) * cfg.omega * t - g_value;
}

// G along the unperturbed reference trajectory, in the by-parts form
// G = -1/(2 hbar) int f_alpha alpha dt.
inline double reference_phase_G(const PhysicalConfig& cfg,
                                const PolynomialTrajectory& traj,
                                const Quadrature& q = {}) {
  auto integrand = [&](double t) {
    return driving_force(traj, cfg, t) * evaluate(traj, t).alpha;
  };
  return -integrate(integrand, 0.0, traj.t_final, q) / (2.0 * cfg.hbar);
}

// Phase accumulated on one branch when the drive is exact (no epsilon):
// phi_up = c^2 t_f/(2 hbar m w^2) + (c/hbar) S - (1/hbar) int x0(t) f(t) dt,
// and phi_down flips the sign of the last two terms.  A time-dependent
// crossing point may be passed in; otherwise the constant pert.x0 is used.
inline double branch_phase(const PhysicalConfig& cfg,
                           const PolynomialTrajectory& traj,
                           const PerturbationSpec& pert, Branch branch,
                           const std::function<double(double)>& x0_fn = {},
                           const Quadrature& q = {}) {
  if (pert.epsilon != 0.0) {
    throw domain_error("branch_phase: closed form assumes an exact drive (epsilon = 0)");
  }
  const double tf = traj.t_final;
  const double common =
      pert.c * pert.c * tf / (2.0 * cfg.hbar * spring_constant(cfg));
  const double s_term = pert.c / cfg.hbar * sensitivity(traj);
  double crossing;
  if (x0_fn) {
    crossing = integrate([&](double t) { return x0_fn(t) * driving_force(traj, cfg, t); },
                         0.0, tf, q) / cfg.hbar;
  } else {
    // Constant x0: int x0 f dt = x0 m w^2 S exactly.
    crossing = pert.x0 * spring_constant(cfg) * sensitivity(traj) / cfg.hbar;
  }
  const double sign = branch == Branch::up ? 1.0 : -1.0;
  return common + sign * (s_term - crossing);
}

// Differential phase for the error-free both-branch case with constant
// crossing point: 2 (c - m w^2 x0) S / hbar.
inline double phase_difference(const PhysicalConfig& cfg,
                               const PolynomialTrajectory& traj,
                               const PerturbationSpec& pert,
                               const Quadrature& q = {}) {
  if (pert.epsilon != 0.0) {
    throw domain_error("phase_difference: requires epsilon = 0; use phase_difference_with_error");
  }
  (void)q;
  return 2.0 * pert.c_tilde(cfg) * sensitivity(traj) / cfg.hbar;
}

namespace detail {

// Ingredients shared by the perturbed branch phases: exact-drive G, the
// deviation boundary values, and the deviation integrals, all at t_f.
struct DeviationTerms {
  double g_alpha;     // G of the reference trajectory
  double s;           // int alpha dt
  double da_eps, da_c;        // delta_alpha at t_f
  double dad_eps, dad_c;      // delta_alpha_dot at t_f
  double int_da_eps, int_da_c;  // int_0^{t_f} delta_alpha dt
};

inline DeviationTerms deviation_terms(const PhysicalConfig& cfg,
                                      const PolynomialTrajectory& traj,
                                      double c, double eps,
                                      const Quadrature& q) {
  DeviationTerms d{};
  d.g_alpha = reference_phase_G(cfg, traj, q);
  d.s = sensitivity(traj);
  const double tf = traj.t_final;
  d.da_eps = delta_alpha(cfg, eps, tf);
  d.da_c = delta_alpha(cfg, c, tf);
  d.dad_eps = delta_alpha_dot(cfg, eps, tf);
  d.dad_c = delta_alpha_dot(cfg, c, tf);
  d.int_da_eps = delta_alpha_integral(cfg, eps, tf);
  d.int_da_c = delta_alpha_integral(cfg, c, tf);
  return d;
}

}  // namespace detail

// Both-branch G's with drive error: forces f+eps+c on up, -f-eps+c on
// down.  Boundary products use the closed-form deviations so no
// numerical differentiation enters.
inline std::pair<double, double> branch_lr_phases(const PhysicalConfig& cfg,
                                                  const PolynomialTrajectory& traj,
                                                  const PerturbationSpec& pert,
                                                  const Quadrature& q = {}) {
  if (pert.x0 != 0.0) {
    throw domain_error("branch_lr_phases: perturbed closed forms assume x0 = 0");
  }
  const auto d = detail::deviation_terms(cfg, traj, pert.c, pert.epsilon, q);
  const double m = cfg.mass;
  const double inv2h = 1.0 / (2.0 * cfg.hbar);
  const double c = pert.c, eps = pert.epsilon;
  const double boundary_up = m * (d.dad_eps * d.da_eps + d.dad_eps * d.da_c +
                                  d.dad_c * d.da_eps + d.dad_c * d.da_c);
  const double boundary_dn = m * (d.dad_eps * d.da_eps - d.dad_eps * d.da_c -
                                  d.dad_c * d.da_eps + d.dad_c * d.da_c);
  const double int_falpha_alpha = -2.0 * cfg.hbar * d.g_alpha;
  const double g_up = inv2h * (boundary_up - int_falpha_alpha -
                               2.0 * (c + eps) * d.s -
                               (c + eps) * (d.int_da_eps + d.int_da_c));
  const double g_dn = inv2h * (boundary_dn - int_falpha_alpha +
                               2.0 * (c - eps) * d.s +
                               (c - eps) * (d.int_da_eps - d.int_da_c));
  return {g_up, g_dn};
}

// Differential phase including the drive error (x0 = 0):
// G_down - G_up = 1/hbar [ -m (dad_eps da_c + dad_c da_eps)|_{t_f}
//                          + 2 c S + c int d_eps + eps int d_c ].
inline double phase_difference_with_error(const PhysicalConfig& cfg,
                                          const PolynomialTrajectory& traj,
                                          const PerturbationSpec& pert,
                                          const Quadrature& q = {}) {
  if (pert.x0 != 0.0) {
    throw domain_error("phase_difference_with_error: formula assumes x0 = 0");
  }
  const auto d = detail::deviation_terms(cfg, traj, pert.c, pert.epsilon, q);
  return (-cfg.mass * (d.dad_eps * d.da_c + d.dad_c * d.da_eps) +
          2.0 * pert.c * d.s + pert.c * d.int_da_eps +
          pert.epsilon * d.int_da_c) / cfg.hbar;
}

// One-branch scenario: c acts on the spin-up branch only (forces f+c and
// -f).  G_down is the reference value; the difference is half-sized:
// G_down - G_up = 1/(2 hbar) [ -m (dad_c da_c)|_{t_f} + 2 c S + c int d_c ].
inline double phase_difference_one_branch(const PhysicalConfig& cfg,
                                          const PolynomialTrajectory& traj,
                                          double c, const Quadrature& q = {}) {
  const auto d = detail::deviation_terms(cfg, traj, c, 0.0, q);
  return (-cfg.mass * d.dad_c * d.da_c + 2.0 * c * d.s + c * d.int_da_c) /
         (2.0 * cfg.hbar);
}

// One-branch G pair: (G_up, G_down) with G_down along the unperturbed
// mirrored trajectory.
inline std::pair<double, double> branch_lr_phases_one(const PhysicalConfig& cfg,
                                                      const PolynomialTrajectory& traj,
                                                      double c,
                                                      const Quadrature& q = {}) {
  const double g_dn = reference_phase_G(cfg, traj, q);
  const double dphi = phase_difference_one_branch(cfg, traj, c, q);
  return {g_dn - dphi, g_dn};
}

// Split the branch phases into dynamical and geometric parts along the
// actual classical trajectories, which may start anywhere in phase space
// (z0).  Constant crossing point folds into c_tilde; both branches then
// feel +-f + c_tilde.  Total phase per branch is -G, the dynamical part
// is (1/hbar) int F <x> dt, and the geometric part is the remainder.
inline BranchPhaseReport dynamical_geometric_split(const PhysicalConfig& cfg,
                                                   const PolynomialTrajectory& traj,
                                                   const PerturbationSpec& pert,
                                                   const ComplexPhasePoint& z0,
                                                   const Quadrature& q = {}) {
  if (pert.epsilon != 0.0) {
    throw domain_error("dynamical_geometric_split: supported for epsilon = 0");
  }
  const double ct = pert.c_tilde(cfg);
  const double w = cfg.omega;
  const double free_scale = std::sqrt(2.0 * cfg.hbar / (cfg.mass * w));
  const std::complex<double> zc = to_complex(z0);

  auto branch_path = [&](double sign) {
    return [&, sign](double t) -> std::pair<double, double> {
      const auto d = evaluate(traj, t);
      const std::complex<double> rot =
          std::exp(std::complex<double>(0.0, -w * t)) * zc;
      const double y = sign * d.alpha + delta_alpha(cfg, ct, t) +
                       free_scale * rot.real();
      const double ydot = sign * d.alpha_dot + delta_alpha_dot(cfg, ct, t) +
                          free_scale * w * rot.imag();
      return {y, ydot};
    };
  };

  BranchPhaseReport report;
  const double tf = traj.t_final;
  for (double sign : {1.0, -1.0}) {
    auto path = branch_path(sign);
    const double g = lr_phase_G(cfg, path, tf, q);
    auto fd = [&](double t) {
      return (sign * driving_force(traj, cfg, t) + ct) * path(t).first;
    };
    const double phi_d = integrate(fd, 0.0, tf, q) / cfg.hbar;
    const double phi_g = -g - phi_d;
    if (sign > 0) {
      report.g_up = g;
      report.phi_dynamical_up = phi_d;
      report.phi_geometric_up = phi_g;
    } else {
      report.g_down = g;
      report.phi_dynamical_down = phi_d;
      report.phi_geometric_down = phi_g;
    }
  }
  report.delta_phi = report.g_down - report.g_up;
  return report;
}

}  // namespace ionifo
