#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "ionifo/config.hpp"
#include "ionifo/dynamics.hpp"
#include "ionifo/errors.hpp"
#include "ionifo/phases.hpp"
#include "ionifo/quadrature.hpp"
#include "ionifo/trajectory.hpp"

// Closed-form overlaps between the dynamical modes of the two spin
// branches, plus a brute-force Hermite-integral oracle.  The mode
// overlap factorizes into the n = n' = 0 "zeroth" factor (Gaussians in
// the deviations times e^{i dG}) and a finite hypergeometric ladder in
// the dimensionless displacement between the branches.

namespace ionifo {

inline constexpr int overlap_mode_cap = 32;  // truncation for state sums

enum class Scenario { both, one };

struct ModeOccupation {
  std::vector<std::complex<double>> amplitudes;  // c_n, n = 0..
};

inline ModeOccupation ground_occupation() { return {{{1.0, 0.0}}}; }

inline ModeOccupation fock_occupation(int n) {
  if (n < 0 || n > overlap_mode_cap) {
    throw domain_error("fock_occupation: index out of range");
  }
  ModeOccupation occ;
  occ.amplitudes.assign(n + 1, {0.0, 0.0});
  occ.amplitudes[n] = {1.0, 0.0};
  return occ;
}

struct OverlapResult {
  std::complex<double> value{};
  double modulus = 0.0;
  double phase = 0.0;  // rad in (-pi, pi]
};

inline OverlapResult make_overlap_result(const std::complex<double>& value) {
  return {value, std::abs(value), std::arg(value)};
}

// Confluent hypergeometric 1F1(-n; b; x) for non-negative integer n:
// a terminating sum, accumulated term by term in ascending k.
inline double hyp1f1_poly(int n, int b, double x) {
  if (n < 0) throw domain_error("hyp1f1_poly: first index must be >= 0");
  if (b <= 0) throw domain_error("hyp1f1_poly: second index must be positive");
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < n; ++k) {
    term *= static_cast<double>(-(n - k)) * x /
            (static_cast<double>(b + k) * (k + 1));
    sum += term;
  }
  return sum;
}

namespace detail {

inline double sqrt_factorial_ratio(int larger, int smaller) {
  // sqrt(larger! / smaller!) for larger >= smaller, via lgamma.
  return std::exp(0.5 * (std::lgamma(larger + 1.0) - std::lgamma(smaller + 1.0)));
}

// Ladder factor connecting (n, n') to (0, 0), common to both scenarios:
// prefactor^d * conj(D)^d / d! * sqrt-ratio * 1F1(-small; d+1; arg) for
// n' >= n, with D -> -D when the indices are reflected.
inline std::complex<double> ladder_factor(int n, int n_prime,
                                          const std::complex<double>& dz,
                                          double prefactor, double arg) {
  if (n < 0 || n_prime < 0) {
    throw domain_error("mode overlap: mode indices must be >= 0");
  }
  if (n_prime >= n) {
    const int d = n_prime - n;
    std::complex<double> pow{1.0, 0.0};
    for (int k = 0; k < d; ++k) pow *= std::conj(dz) * prefactor;
    return pow / std::tgamma(d + 1.0) * sqrt_factorial_ratio(n_prime, n) *
           hyp1f1_poly(n, d + 1, arg);
  }
  const int d = n - n_prime;
  std::complex<double> pow{1.0, 0.0};
  for (int k = 0; k < d; ++k) pow *= -dz * prefactor;
  return pow / std::tgamma(d + 1.0) * sqrt_factorial_ratio(n, n_prime) *
         hyp1f1_poly(n_prime, d + 1, arg);
}

struct OverlapContext {
  std::complex<double> zeroth;  // full (0,0) overlap including e^{i dG}
  std::complex<double> dz;      // dimensionless branch displacement
  double prefactor;             // -2 (both) or -1 (one)
  double arg;                   // 4|dz|^2 (both) or |dz|^2 (one)
  double omega_tf;              // for the e^{i(n-n') w t_f} mode factor
};

// Zeroth factor + displacement for the both-branch scenario (forces
// f+eps+c up, -f-eps+c down; x0 = 0).
inline OverlapContext make_context_both(const PhysicalConfig& cfg,
                                        const PolynomialTrajectory& traj,
                                        const PerturbationSpec& pert,
                                        const Quadrature& q) {
  if (pert.x0 != 0.0) {
    throw domain_error("mode_overlap_both: closed forms assume x0 = 0");
  }
  const double tf = traj.t_final;
  const double da_e = delta_alpha(cfg, pert.epsilon, tf);
  const double da_c = delta_alpha(cfg, pert.c, tf);
  const double dad_e = delta_alpha_dot(cfg, pert.epsilon, tf);
  const double w = cfg.omega;
  const std::complex<double> sq(w * da_c, dad_e);
  const std::complex<double> gauss =
      std::exp(-(cfg.mass * w / cfg.hbar) * (da_e * da_e + da_c * da_c) +
               (cfg.mass / (cfg.hbar * w)) * sq * sq);
  const double dg = phase_difference_with_error(cfg, traj, pert, q);
  OverlapContext ctx;
  ctx.zeroth = gauss * std::exp(std::complex<double>(0.0, dg));
  ctx.dz = to_complex(delta_Z(cfg, pert.epsilon, tf));
  ctx.prefactor = -2.0;
  ctx.arg = 4.0 * std::norm(ctx.dz);
  ctx.omega_tf = w * tf;
  return ctx;
}

// Zeroth factor + displacement for the one-branch scenario (forces f+c
// up, -f down).
inline OverlapContext make_context_one(const PhysicalConfig& cfg,
                                       const PolynomialTrajectory& traj,
                                       double c, const Quadrature& q) {
  const double tf = traj.t_final;
  const double da_c = delta_alpha(cfg, c, tf);
  const double dad_c = delta_alpha_dot(cfg, c, tf);
  const double w = cfg.omega;
  const std::complex<double> sq(w * da_c, dad_c);
  const std::complex<double> gauss =
      std::exp(-(cfg.mass * w / (2.0 * cfg.hbar)) * da_c * da_c +
               (cfg.mass / (4.0 * cfg.hbar * w)) * sq * sq);
  const double dg = phase_difference_one_branch(cfg, traj, c, q);
  OverlapContext ctx;
  ctx.zeroth = gauss * std::exp(std::complex<double>(0.0, dg));
  ctx.dz = to_complex(delta_Z(cfg, c, tf));
  ctx.prefactor = -1.0;
  ctx.arg = std::norm(ctx.dz);
  ctx.omega_tf = w * tf;
  return ctx;
}

inline std::complex<double> mode_overlap_from_context(const OverlapContext& ctx,
                                                      int n, int n_prime) {
  const std::complex<double> mode_rotation =
      std::exp(std::complex<double>(0.0, (n - n_prime) * ctx.omega_tf));
  return mode_rotation * ctx.zeroth *
         ladder_factor(n, n_prime, ctx.dz, ctx.prefactor, ctx.arg);
}

}  // namespace detail

// <Psi_n down | Psi_n' up> for the both-branch perturbation, dynamical
// mode phases included.
inline std::complex<double> mode_overlap_both(const PhysicalConfig& cfg,
                                              const PolynomialTrajectory& traj,
                                              const PerturbationSpec& pert,
                                              int n, int n_prime,
                                              const Quadrature& q = {}) {
  const auto ctx = detail::make_context_both(cfg, traj, pert, q);
  return detail::mode_overlap_from_context(ctx, n, n_prime);
}

// Same for the one-branch perturbation (c on spin-up only).
inline std::complex<double> mode_overlap_one(const PhysicalConfig& cfg,
                                             const PolynomialTrajectory& traj,
                                             double c, int n, int n_prime,
                                             const Quadrature& q = {}) {
  const auto ctx = detail::make_context_one(cfg, traj, c, q);
  return detail::mode_overlap_from_context(ctx, n, n_prime);
}

// Direct grid integral of the displaced-mode overlap:
//   int dx e^{i m (ydot_up - ydot_dn) x / hbar} phi_n(x - y_dn) phi_n'(x - y_up).
// This carries no mode-phase factors; it is the oracle for the
// hypergeometric ladder, not for the phases.
inline std::complex<double> brute_force_mode_overlap(
    int n, int n_prime, std::pair<double, double> displacement_down,
    std::pair<double, double> displacement_up, const PhysicalConfig& cfg) {
  if (n < 0 || n_prime < 0 || n > 12 || n_prime > 12) {
    throw domain_error("brute_force_mode_overlap: mode indices must be in [0, 12]");
  }
  const auto [y_dn, ydot_dn] = displacement_down;
  const auto [y_up, ydot_up] = displacement_up;
  const double sigma = std::sqrt(cfg.hbar / (cfg.mass * cfg.omega));
  const double span = 12.0 * sigma + std::abs(y_dn) + std::abs(y_up);
  const int npts = 32768;
  const double dx = 2.0 * span / npts;
  const double xi_scale = std::sqrt(cfg.mass * cfg.omega / cfg.hbar);
  const double kick = cfg.mass * (ydot_up - ydot_dn) / cfg.hbar;

  // Normalized oscillator eigenfunctions by stable recurrence.
  auto phi = [&](int mode, double x) {
    const double xi = xi_scale * x;
    double u0 = std::pow(cfg.mass * cfg.omega / (std::numbers::pi * cfg.hbar), 0.25) *
                std::exp(-0.5 * xi * xi);
    if (mode == 0) return u0;
    double u1 = std::sqrt(2.0) * xi * u0;
    for (int k = 1; k < mode; ++k) {
      const double u2 =
          std::sqrt(2.0 / (k + 1.0)) * xi * u1 - std::sqrt(k / (k + 1.0)) * u0;
      u0 = u1;
      u1 = u2;
    }
    return u1;
  };

  std::complex<double> acc{};
  double norm_dn = 0.0;
  for (int i = 0; i < npts; ++i) {
    const double x = -span + (i + 0.5) * dx;
    const double a = phi(n, x - y_dn);
    const double b = phi(n_prime, x - y_up);
    norm_dn += a * a * dx;
    acc += std::exp(std::complex<double>(0.0, kick * x)) * (a * b * dx);
  }
  if (std::abs(norm_dn - 1.0) > 1e-8) {
    throw numeric_error("brute_force_mode_overlap: grid failed the norm check");
  }
  return acc;
}

// Branch overlap of a motional superposition: sum over all mode pairs of
// conj(c_n) c_n' <Psi_n down|Psi_n' up>, truncated at overlap_mode_cap.
inline OverlapResult state_overlap(const PhysicalConfig& cfg,
                                   const PolynomialTrajectory& traj,
                                   const PerturbationSpec& pert,
                                   const ModeOccupation& occ, Scenario scenario,
                                   const Quadrature& q = {}) {
  const std::size_t count = occ.amplitudes.size();
  if (count == 0 || count > overlap_mode_cap + 1) {
    throw domain_error("state_overlap: occupation must list 1..33 amplitudes");
  }
  double norm = 0.0;
  for (const auto& a : occ.amplitudes) norm += std::norm(a);
  if (std::abs(norm - 1.0) > 1e-12) {
    throw domain_error("state_overlap: occupation amplitudes must be normalized");
  }
  if (scenario == Scenario::one && pert.epsilon != 0.0) {
    throw domain_error("state_overlap: one-branch scenario has no drive-error term");
  }
  const auto ctx = scenario == Scenario::both
                       ? detail::make_context_both(cfg, traj, pert, q)
                       : detail::make_context_one(cfg, traj, pert.c, q);
  std::complex<double> total{};
  for (std::size_t n = 0; n < count; ++n) {
    for (std::size_t np = 0; np < count; ++np) {
      total += std::conj(occ.amplitudes[n]) * occ.amplitudes[np] *
               detail::mode_overlap_from_context(ctx, static_cast<int>(n),
                                                 static_cast<int>(np));
    }
  }
  return make_overlap_result(total);
}

// Thermal (mixed) initial state with mean phonon number nbar: incoherent
// average of the diagonal mode overlaps under the Boltzmann weights
// p_n = nbar^n / (nbar+1)^{n+1}, renormalized over the truncated range.
inline OverlapResult thermal_overlap(const PhysicalConfig& cfg,
                                     const PolynomialTrajectory& traj,
                                     const PerturbationSpec& pert, double nbar,
                                     Scenario scenario,
                                     const Quadrature& q = {}) {
  if (nbar < 0.0) throw domain_error("thermal_overlap: mean phonon number must be >= 0");
  if (scenario == Scenario::one && pert.epsilon != 0.0) {
    throw domain_error("thermal_overlap: one-branch scenario has no drive-error term");
  }
  const auto ctx = scenario == Scenario::both
                       ? detail::make_context_both(cfg, traj, pert, q)
                       : detail::make_context_one(cfg, traj, pert.c, q);
  const double ratio = nbar / (nbar + 1.0);
  double weight = 1.0 / (nbar + 1.0);
  double weight_sum = 0.0;
  std::complex<double> total{};
  for (int n = 0; n <= overlap_mode_cap; ++n) {
    total += weight * detail::mode_overlap_from_context(ctx, n, n);
    weight_sum += weight;
    weight *= ratio;
  }
  return make_overlap_result(total / weight_sum);
}

}  // namespace ionifo
