#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include "ionifo/config.hpp"
#include "ionifo/dynamics.hpp"
#include "ionifo/errors.hpp"
#include "ionifo/fft.hpp"
#include "ionifo/overlap.hpp"
#include "ionifo/phases.hpp"
#include "ionifo/trajectory.hpp"

// Grid-based split-step propagation of a single spin branch under the
// full potential 1/2 m w^2 x^2 - c x - sigma (f(t)+eps)(x - x0), with an
// optional optical-lattice profile replacing the linear spin force.
// This module is the quantum oracle: it never uses the analytic phase or
// overlap formulas, so its branch overlaps cross-check them end to end.

namespace ionifo {

struct GridWavefunction {
  double x_min = 0.0;  // m
  double dx = 0.0;     // m
  std::vector<std::complex<double>> amplitudes;

  double x_at(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
  double norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s * dx;
  }
};

enum class LatticeOrder { linear, cubic, quintic, full };

struct LatticeSpec {
  double v0 = 0.0;  // J; informational, the force is recalibrated per call
  double k = 0.0;   // 1/m
  LatticeOrder order = LatticeOrder::linear;
};

struct PotentialSpec {
  PerturbationSpec pert;
  Branch branch = Branch::up;
  std::optional<LatticeSpec> lattice;
  PolynomialTrajectory traj;
};

struct LatticeForce {
  double value = 0.0;        // N
  bool out_of_range = false; // truncated order evaluated past k|x| = pi/2
};

struct PropagationLog {
  double max_norm_drift = 0.0;
  std::vector<double> times;     // s
  std::vector<double> energies;  // J
};

// Spatial force profile of the lattice, scaled so the value at x = 0 is
// exactly f_target.  The full profile is f_target cos(2kx); the named
// orders are its Taylor truncations.
inline LatticeForce lattice_force_profile(const LatticeSpec& spec,
                                          double f_target, double x) {
  if (!(spec.k > 0.0) || spec.v0 < 0.0) {
    throw domain_error("lattice_force_profile: require k > 0 and v0 >= 0");
  }
  const double kx = spec.k * x;
  LatticeForce out;
  switch (spec.order) {
    case LatticeOrder::linear:
      out.value = f_target;
      break;
    case LatticeOrder::cubic:
      out.value = f_target * (1.0 - 2.0 * kx * kx);
      break;
    case LatticeOrder::quintic:
      out.value = f_target * (1.0 - 2.0 * kx * kx +
                              (2.0 / 3.0) * kx * kx * kx * kx);
      break;
    case LatticeOrder::full:
      out.value = f_target * std::cos(2.0 * kx);
      break;
  }
  out.out_of_range =
      spec.order != LatticeOrder::full && std::abs(kx) > 0.5 * std::numbers::pi;
  return out;
}

namespace detail {

// Displacement profile w(x) whose derivative is the force shape above;
// the lattice potential is -sigma f(t) (w(x) - x0).
inline double lattice_displacement(const LatticeSpec& spec, double x) {
  const double k = spec.k;
  const double kx = k * x;
  switch (spec.order) {
    case LatticeOrder::linear:
      return x;
    case LatticeOrder::cubic:
      return x - (2.0 / 3.0) * k * k * x * x * x;
    case LatticeOrder::quintic:
      return x - (2.0 / 3.0) * k * k * x * x * x +
             (2.0 / 15.0) * k * k * k * k * x * x * x * x * x;
    case LatticeOrder::full:
      return std::sin(2.0 * kx) / (2.0 * k);
  }
  return x;
}

inline void check_grid(const PhysicalConfig& cfg, double center, int grid_n,
                       double span) {
  if (grid_n <= 0 || (grid_n & (grid_n - 1)) != 0) {
    throw config_error("grid: point count must be a power of two");
  }
  const double sigma = ground_state_sigma(cfg);
  if (span < std::abs(center) + 8.0 * sigma) {
    throw config_error("grid: span must cover 8 sigma beyond the packet center");
  }
  if (2.0 * span / grid_n > sigma / 8.0) {
    throw config_error("grid: dx must resolve sigma/8");
  }
}

inline void normalize(GridWavefunction& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw numeric_error("grid state: zero norm");
  const double s = 1.0 / std::sqrt(n);
  for (auto& a : psi.amplitudes) a *= s;
}

}  // namespace detail

// Ground state of the static trap centered at `center`, sampled on a
// symmetric grid of grid_n points covering [-span, span).
inline GridWavefunction ground_state(const PhysicalConfig& cfg, double center,
                                     int grid_n, double span) {
  detail::check_grid(cfg, center, grid_n, span);
  GridWavefunction psi;
  psi.x_min = -span;
  psi.dx = 2.0 * span / grid_n;
  psi.amplitudes.resize(grid_n);
  const double a = cfg.mass * cfg.omega / cfg.hbar;
  const double norm = std::pow(a / std::numbers::pi, 0.25);
  for (int i = 0; i < grid_n; ++i) {
    const double u = psi.x_at(i) - center;
    psi.amplitudes[i] = norm * std::exp(-0.5 * a * u * u);
  }
  detail::normalize(psi);
  return psi;
}

// n-th stationary eigenstate on the same grid layout (centered at 0).
inline GridWavefunction fock_state(const PhysicalConfig& cfg, int n, int grid_n,
                                   double span) {
  if (n < 0 || n > 12) throw domain_error("fock_state: index must be in [0, 12]");
  detail::check_grid(cfg, 0.0, grid_n, span);
  GridWavefunction psi;
  psi.x_min = -span;
  psi.dx = 2.0 * span / grid_n;
  psi.amplitudes.resize(grid_n);
  const double xi_scale = std::sqrt(cfg.mass * cfg.omega / cfg.hbar);
  const double base = std::pow(cfg.mass * cfg.omega / (std::numbers::pi * cfg.hbar), 0.25);
  for (int i = 0; i < grid_n; ++i) {
    const double xi = xi_scale * psi.x_at(i);
    double u0 = base * std::exp(-0.5 * xi * xi);
    double val = u0;
    if (n > 0) {
      double u1 = std::sqrt(2.0) * xi * u0;
      val = u1;
      for (int k = 1; k < n; ++k) {
        const double u2 =
            std::sqrt(2.0 / (k + 1.0)) * xi * u1 - std::sqrt(k / (k + 1.0)) * u0;
        u0 = u1;
        u1 = u2;
        val = u2;
      }
    }
    psi.amplitudes[i] = val;
  }
  detail::normalize(psi);
  return psi;
}

// Grid inner product <a|b>; the two states must share a grid.
inline std::complex<double> grid_inner_product(const GridWavefunction& a,
                                               const GridWavefunction& b) {
  if (a.amplitudes.size() != b.amplitudes.size() || a.dx != b.dx ||
      a.x_min != b.x_min) {
    throw domain_error("grid_inner_product: states live on different grids");
  }
  std::complex<double> s{};
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
    s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  }
  return s * a.dx;
}

// Default half-width: trajectory excursion + deviation amplitude +
// crossing offset + 10 sigma of packet width.
inline double default_grid_span(const PhysicalConfig& cfg,
                                const PolynomialTrajectory& traj,
                                const PerturbationSpec& pert) {
  double max_alpha = 0.0;
  for (int i = 0; i <= 512; ++i) {
    const double t = traj.t_final * i / 512.0;
    max_alpha = std::max(max_alpha, std::abs(evaluate(traj, t).alpha));
  }
  const double dev = 2.0 * (std::abs(pert.c) + std::abs(pert.epsilon)) /
                     spring_constant(cfg);
  return max_alpha + dev + std::abs(pert.x0) + 10.0 * ground_state_sigma(cfg);
}

inline constexpr int default_grid_points = 2048;
inline constexpr int default_time_steps = 100000;

// Second-order symmetric split-step propagation over [0, t_final].  The
// potential is sampled at each step midpoint; kinetic and static-
// potential factors are precomputed, and for a plain linear force the
// time-dependent factor e^{i a x} is built by a phase recurrence instead
// of per-point trig.  Global phase is preserved throughout.
inline GridWavefunction propagate(const PhysicalConfig& cfg,
                                  const PotentialSpec& spec,
                                  const GridWavefunction& psi0, int n_steps,
                                  PropagationLog* log = nullptr) {
  if (n_steps < 10000) throw domain_error("propagate: need at least 10^4 steps");
  const double dt = cfg.t_final / n_steps;
  if (dt > trap_period(cfg) / 50.0) {
    throw domain_error("propagate: dt too coarse for the trap period");
  }
  const std::size_t n = psi0.amplitudes.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw config_error("propagate: grid size must be a power of two");
  }

  GridWavefunction psi = psi0;
  const double sign = spec.branch == Branch::up ? 1.0 : -1.0;
  const double dx = psi.dx;

  // Kinetic full-step factors in momentum space.
  std::vector<std::complex<double>> kinetic(n);
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * dx);
  for (std::size_t j = 0; j < n; ++j) {
    const double idx = j < n / 2 ? static_cast<double>(j)
                                 : static_cast<double>(j) - static_cast<double>(n);
    const double k = dk * idx;
    kinetic[j] = std::polar(1.0, -cfg.hbar * k * k * dt / (2.0 * cfg.mass));
  }

  // Static potential half-step factors.
  std::vector<std::complex<double>> half_static(n);
  const double spring = spring_constant(cfg);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = psi.x_at(i);
    const double v = 0.5 * spring * x * x - spec.pert.c * x;
    half_static[i] = std::polar(1.0, -v * dt / (2.0 * cfg.hbar));
  }

  // Spatial profile of the spin force (identity for the plain case).
  std::vector<double> displacement;
  if (spec.lattice) {
    if (!(spec.lattice->k > 0.0) || spec.lattice->v0 < 0.0) {
      throw domain_error("propagate: lattice requires k > 0 and v0 >= 0");
    }
    displacement.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      displacement[i] = detail::lattice_displacement(*spec.lattice, psi.x_at(i));
    }
  }

  auto& amp = psi.amplitudes;
  std::vector<std::complex<double>> td(n);
  double max_drift = 0.0;
  const int norm_stride = 50;
  const int energy_stride = log ? std::max(1, n_steps / 64) : n_steps + 1;

  for (int step = 0; step < n_steps; ++step) {
    const double t_mid = (step + 0.5) * dt;
    const double f = driving_force(spec.traj, cfg, t_mid) + spec.pert.epsilon;
    const double a_coef = sign * f * dt / (2.0 * cfg.hbar);

    // Half kick with V(x, t_mid): static part times the spin-force part
    // exp(i a (w(x) - x0)).
    if (!spec.lattice) {
      const std::complex<double> ratio = std::polar(1.0, a_coef * dx);
      std::complex<double> factor =
          std::polar(1.0, a_coef * (psi.x_min - spec.pert.x0));
      for (std::size_t i = 0; i < n; ++i) {
        td[i] = factor;
        factor *= ratio;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        td[i] = std::polar(1.0, a_coef * (displacement[i] - spec.pert.x0));
      }
    }

    for (std::size_t i = 0; i < n; ++i) amp[i] *= half_static[i] * td[i];
    fft::forward(amp);
    for (std::size_t i = 0; i < n; ++i) amp[i] *= kinetic[i];
    fft::inverse(amp);
    for (std::size_t i = 0; i < n; ++i) amp[i] *= half_static[i] * td[i];

    if (step % norm_stride == norm_stride - 1 || step == n_steps - 1) {
      max_drift = std::max(max_drift, std::abs(psi.norm() - 1.0));
      if (max_drift > 1e-6) {
        throw numeric_error("propagate: norm drift exceeded 1e-6");
      }
    }
    if (log && (step % energy_stride == energy_stride - 1)) {
      // <T> from the momentum representation, <V> on the grid.
      std::vector<std::complex<double>> hat = amp;
      fft::forward(hat);
      double t_sum = 0.0, hat_norm = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double idx = j < n / 2
                               ? static_cast<double>(j)
                               : static_cast<double>(j) - static_cast<double>(n);
        const double k = dk * idx;
        const double w = std::norm(hat[j]);
        t_sum += w * cfg.hbar * cfg.hbar * k * k / (2.0 * cfg.mass);
        hat_norm += w;
      }
      double v_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = psi.x_at(i);
        const double wx = spec.lattice ? displacement[i] : x;
        const double v = 0.5 * spring * x * x - spec.pert.c * x -
                         sign * f * (wx - spec.pert.x0);
        v_sum += std::norm(amp[i]) * v;
      }
      log->times.push_back((step + 1) * dt);
      log->energies.push_back(t_sum / hat_norm + v_sum * dx / psi.norm());
    }
  }
  if (log) log->max_norm_drift = max_drift;
  return psi;
}

// Propagate both branches from a common initial state and return their
// overlap <psi_down | psi_up>.
inline OverlapResult branch_overlap(const PhysicalConfig& cfg,
                                    const PotentialSpec& spec_up,
                                    const PotentialSpec& spec_down,
                                    const GridWavefunction& psi0, int n_steps) {
  if (spec_up.branch != Branch::up || spec_down.branch != Branch::down) {
    throw domain_error("branch_overlap: specs must be one up and one down branch");
  }
  const GridWavefunction up = propagate(cfg, spec_up, psi0, n_steps);
  const GridWavefunction down = propagate(cfg, spec_down, psi0, n_steps);
  return make_overlap_result(grid_inner_product(down, up));
}

// CSV snapshot: x_nm, re, im with stable 12-digit formatting.
inline void wavefunction_to_csv(const GridWavefunction& psi, std::ostream& out) {
  out << "x_nm,re,im\n";
  char buf[128];
  for (std::size_t i = 0; i < psi.amplitudes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", psi.x_at(i) / units::nm,
                  psi.amplitudes[i].real(), psi.amplitudes[i].imag());
    out << buf;
  }
}

}  // namespace ionifo
