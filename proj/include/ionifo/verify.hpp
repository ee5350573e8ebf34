#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "ionifo/config.hpp"
#include "ionifo/dynamics.hpp"
#include "ionifo/interferometer.hpp"
#include "ionifo/overlap.hpp"
#include "ionifo/phases.hpp"
#include "ionifo/tdse.hpp"
#include "ionifo/trajectory.hpp"

// Self-check suite wiring the independent oracles against the closed
// forms: hypergeometric ladders vs direct integrals, quadrature solution
// vs RK4, swept areas vs phase differences, and the split-step engine vs
// the analytic branch phase.  A deliberate sign fault can be injected
// into the fixture's deviation model to prove the checks have teeth.

namespace ionifo {

enum class FaultInjection { none, delta_alpha_sign };

struct VerifyCheck {
  std::string name;
  double measured = 0.0;   // worst observed deviation
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  bool quick = false;              // reduced grids, 10x tolerances
  FaultInjection fault = FaultInjection::none;
};

namespace detail {

inline VerifyCheck finish(std::string name, double measured, double tol) {
  return {std::move(name), measured, tol, measured <= tol};
}

}  // namespace detail

inline std::vector<VerifyCheck> run_verification(const VerifyOptions& opt = {}) {
  std::vector<VerifyCheck> checks;
  const double tol_scale = opt.quick ? 10.0 : 1.0;
  const Quadrature q;
  const PhysicalConfig cfg = make_config(9.012182, 2.0, 0.5);
  const PolynomialTrajectory traj = design_alpha_A(cfg, 135.0 * units::nm);

  // Closed-form mode overlaps against the direct Hermite-integral
  // oracle, with the mode-phase factors stripped from the closed form.
  {
    const int n_cap = opt.quick ? 2 : 4;
    const PhysicalConfig gen = make_config(9.012182, 2.0, 0.37);
    const PolynomialTrajectory gtraj = design_alpha_A(gen, 135.0 * units::nm);
    const PerturbationSpec pert{3e-20, 2e-20, 0.0};
    const double tf = gen.t_final;
    const double da_e = delta_alpha(gen, pert.epsilon, tf);
    const double da_c = delta_alpha(gen, pert.c, tf);
    const double dad_e = delta_alpha_dot(gen, pert.epsilon, tf);
    const double dad_c = delta_alpha_dot(gen, pert.c, tf);
    const double dg = phase_difference_with_error(gen, gtraj, pert, q);
    double worst = 0.0;
    for (int n = 0; n <= n_cap; ++n) {
      for (int np = 0; np <= n_cap; ++np) {
        const std::complex<double> closed =
            mode_overlap_both(gen, gtraj, pert, n, np, q) *
            std::exp(std::complex<double>(0.0, -dg - (n - np) * gen.omega * tf));
        const std::complex<double> brute = brute_force_mode_overlap(
            n, np, {da_c - da_e, dad_c - dad_e}, {da_c + da_e, dad_c + dad_e},
            gen);
        worst = std::max(worst, std::abs(closed - brute));
      }
    }
    checks.push_back(detail::finish("ladder-vs-integral-both", worst, 1e-8 * tol_scale));

    const double c_one = 3e-20;
    const double dg_one = phase_difference_one_branch(gen, gtraj, c_one, q);
    const double da1 = delta_alpha(gen, c_one, tf);
    const double dad1 = delta_alpha_dot(gen, c_one, tf);
    worst = 0.0;
    for (int n = 0; n <= n_cap; ++n) {
      for (int np = 0; np <= n_cap; ++np) {
        const std::complex<double> closed =
            mode_overlap_one(gen, gtraj, c_one, n, np, q) *
            std::exp(std::complex<double>(0.0, -dg_one - (n - np) * gen.omega * tf));
        const std::complex<double> brute =
            brute_force_mode_overlap(n, np, {0.0, 0.0}, {da1, dad1}, gen);
        worst = std::max(worst, std::abs(closed - brute));
      }
    }
    checks.push_back(detail::finish("ladder-vs-integral-one", worst, 1e-8 * tol_scale));
  }

  // Quadrature solution vs RK4 at the final time.
  {
    const double c = 1e-20;
    auto force = [&](double t) { return driving_force(traj, cfg, t) + c; };
    const int steps = opt.quick ? 20000 : 100000;
    const PhaseSpacePath path = integrate_newton(cfg, force, 0.0, 0.0, steps);
    const ComplexPhasePoint exact = analytic_Z(cfg, force, {}, cfg.t_final, q);
    const double err = std::abs(to_complex(exact) - to_complex(path.points.back()));
    checks.push_back(detail::finish("classical-solution-endpoint", err, 1e-8 * tol_scale));
  }

  // Swept-area identities with a displaced initial condition.  The
  // dynamical phases are recomputed here from the deviation model so a
  // deliberately injected sign fault is caught by this check.
  {
    const PerturbationSpec pert{1.3e-20, 0.0, 0.0};
    const double ct = pert.c_tilde(cfg);
    const double fault_sign =
        opt.fault == FaultInjection::delta_alpha_sign ? -1.0 : 1.0;
    const ComplexPhasePoint z0{0.6, -0.35};
    const double free_scale = std::sqrt(2.0 * cfg.hbar / (cfg.mass * cfg.omega));
    const int steps = opt.quick ? 20000 : 100000;

    double phi_d[2], area[2];
    int slot = 0;
    for (double s : {1.0, -1.0}) {
      auto force = [&](double t) { return s * driving_force(traj, cfg, t) + ct; };
      auto y_model = [&](double t) {
        const std::complex<double> rot =
            std::exp(std::complex<double>(0.0, -cfg.omega * t)) * to_complex(z0);
        return s * evaluate(traj, t).alpha +
               fault_sign * delta_alpha(cfg, ct, t) + free_scale * rot.real();
      };
      phi_d[slot] =
          integrate([&](double t) { return force(t) * y_model(t); }, 0.0,
                    cfg.t_final, q) / cfg.hbar;
      const double y0 = free_scale * z0.re;
      const double v0 = free_scale * cfg.omega * z0.im;
      area[slot] = rotating_area(cfg, integrate_newton(cfg, force, y0, v0, steps));
      ++slot;
    }
    const double dphi_d = phi_d[0] - phi_d[1];
    const double d_area = area[0] - area[1];
    const double dphi = phase_difference(cfg, traj, pert, q);
    const double err =
        std::max(std::abs(dphi_d - 4.0 * d_area), std::abs(2.0 * dphi - dphi_d));
    checks.push_back(detail::finish("swept-area-identity", err, 1e-6 * tol_scale));
  }

  // Split-step propagation vs the closed-form differential phase.
  {
    const double c = 1e-20;
    const PerturbationSpec pert{c, 0.0, 0.0};
    const int grid_n = opt.quick ? 512 : 1024;
    const int steps = opt.quick ? 10000 : 20000;
    const double span = default_grid_span(cfg, traj, pert);
    const GridWavefunction psi0 = ground_state(cfg, 0.0, grid_n, span);
    const OverlapResult overlap =
        branch_overlap(cfg, {pert, Branch::up, {}, traj},
                       {pert, Branch::down, {}, traj}, psi0, steps);
    const double expected = phase_difference(cfg, traj, pert, q);
    const double phase_err =
        std::abs(detail::wrap_to_pi(overlap.phase - expected));
    checks.push_back(detail::finish("split-step-phase", phase_err, 1e-3 * tol_scale));
    const double modulus_expected =
        state_overlap(cfg, traj, pert, ground_occupation(), Scenario::both, q)
            .modulus;
    checks.push_back(detail::finish("split-step-modulus",
                                    std::abs(overlap.modulus - modulus_expected),
                                    1e-4 * tol_scale));
  }

  // Force-integral identity int f dt = m w^2 S for both designs.
  {
    double worst = 0.0;
    const PolynomialTrajectory tb =
        design_alpha_B(cfg, sensitivity(traj), 75.0 * units::nm);
    for (const auto& t : {traj, tb}) {
      const double lhs =
          integrate([&](double tt) { return driving_force(t, cfg, tt); }, 0.0,
                    t.t_final, q);
      const double rhs = spring_constant(cfg) * sensitivity(t);
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    checks.push_back(detail::finish("drive-integral-identity", worst, 1e-10 * tol_scale));
  }

  // Free-rotation orthogonality: int Re(e^{-iwt} Z0) f dt vanishes in
  // dimensionless units for any initial condition.
  {
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    const PolynomialTrajectory tb =
        design_alpha_B(cfg, sensitivity(traj), 75.0 * units::nm);
    double worst = 0.0;
    for (int rep = 0; rep < 8; ++rep) {
      const std::complex<double> z0(uni(rng), uni(rng));
      for (const auto& t : {traj, tb}) {
        const double val =
            integrate(
                [&](double tt) {
                  const std::complex<double> rot =
                      std::exp(std::complex<double>(0.0, -cfg.omega * tt)) * z0;
                  return rot.real() * driving_force(t, cfg, tt);
                },
                0.0, t.t_final, q) /
            std::sqrt(2.0 * cfg.hbar * cfg.mass * cfg.omega);
        worst = std::max(worst, std::abs(val));
      }
    }
    checks.push_back(detail::finish("free-rotation-identity", worst, 1e-12 * tol_scale));
  }

  return checks;
}

}  // namespace ionifo
