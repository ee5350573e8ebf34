#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ionifo/config.hpp"
#include "ionifo/dynamics.hpp"
#include "ionifo/errors.hpp"
#include "ionifo/overlap.hpp"
#include "ionifo/phases.hpp"
#include "ionifo/tdse.hpp"
#include "ionifo/trajectory.hpp"

// Experiment-level logic: the pi/2-pulse population map, prediction of a
// single working point, sweeps of the sensitivity S via the midpoint
// displacement M, and recovery of the unknown force from the population
// oscillation P(S) = 1/2 + 1/2 cos(2 c S / hbar).

namespace ionifo {

enum class Engine { analytic, tdse };

struct ExperimentSpec {
  PhysicalConfig cfg;
  PolynomialTrajectory traj;
  PerturbationSpec pert;
  Scenario scenario = Scenario::both;
  // Equal superposition prepared by the first pi/2 pulse.
  static constexpr double spin_amplitude = 0.7071067811865476;
};

struct SweepRow {
  double sensitivity = 0.0;  // m s
  double p_up = 0.0;
  double p_down = 0.0;
  double delta_phi = 0.0;  // rad, unwrapped
  double modulus = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

struct ExtractionResult {
  double c_estimate = 0.0;       // N
  double period_estimate = 0.0;  // m s, = pi hbar / c exactly
  double fit_residual = 0.0;     // RMS population misfit
};

// Ideal pi/2 readout: P_up = 1/2 + 1/2 Re<psi_down|psi_up>.
inline std::pair<double, double> populations(const OverlapResult& overlap) {
  if (overlap.modulus > 1.0 + 1e-9) {
    throw domain_error("populations: overlap modulus exceeds 1");
  }
  double p_up = 0.5 + 0.5 * overlap.value.real();
  p_up = std::clamp(p_up, 0.0, 1.0);
  return {p_up, 1.0 - p_up};
}

namespace detail {

inline double wrap_to_pi(double angle) {
  const double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(angle + std::numbers::pi, two_pi);
  if (r < 0.0) r += two_pi;
  return r - std::numbers::pi;
}

// Initial grid state for a motional superposition sum c_n |n>.
inline GridWavefunction initial_state_from_occupation(const PhysicalConfig& cfg,
                                                      const ModeOccupation& occ,
                                                      int grid_n, double span) {
  GridWavefunction psi;
  bool first = true;
  for (std::size_t n = 0; n < occ.amplitudes.size(); ++n) {
    if (occ.amplitudes[n] == std::complex<double>{}) continue;
    if (n > 12) {
      throw domain_error("tdse initial state: mode indices above 12 unsupported");
    }
    GridWavefunction mode = fock_state(cfg, static_cast<int>(n), grid_n, span);
    if (first) {
      psi = mode;
      for (auto& a : psi.amplitudes) a *= occ.amplitudes[n];
      first = false;
    } else {
      for (std::size_t i = 0; i < psi.amplitudes.size(); ++i) {
        psi.amplitudes[i] += occ.amplitudes[n] * mode.amplitudes[i];
      }
    }
  }
  if (first) throw domain_error("tdse initial state: empty occupation");
  return psi;
}

template <class Fn>
void parallel_for(int jobs, std::size_t count, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = std::min<std::size_t>(jobs, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

// One working point: branch overlap -> populations, with the unwrapped
// differential phase from the closed forms (the TDSE engine reports its
// measured phase unwrapped around the analytic value).
inline SweepRow predict(const ExperimentSpec& exp, const ModeOccupation& occ,
                        Engine engine, const Quadrature& q = {},
                        int tdse_steps = default_time_steps,
                        int tdse_grid = default_grid_points) {
  if (exp.pert.x0 != 0.0) {
    throw domain_error("predict: overlap formulas assume x0 = 0");
  }
  const double dphi_analytic =
      exp.scenario == Scenario::both
          ? phase_difference_with_error(exp.cfg, exp.traj, exp.pert, q)
          : phase_difference_one_branch(exp.cfg, exp.traj, exp.pert.c, q);

  OverlapResult overlap;
  double dphi = dphi_analytic;
  if (engine == Engine::analytic) {
    overlap = state_overlap(exp.cfg, exp.traj, exp.pert, occ, exp.scenario, q);
  } else {
    const double span = default_grid_span(exp.cfg, exp.traj, exp.pert);
    const GridWavefunction psi0 =
        detail::initial_state_from_occupation(exp.cfg, occ, tdse_grid, span);
    PotentialSpec up{exp.pert, Branch::up, {}, exp.traj};
    PotentialSpec down{exp.pert, Branch::down, {}, exp.traj};
    if (exp.scenario == Scenario::one) {
      down.pert.c = 0.0;  // the common force acts on spin-up only
      down.pert.epsilon = 0.0;
    }
    overlap = branch_overlap(exp.cfg, up, down, psi0, tdse_steps);
    dphi = dphi_analytic + detail::wrap_to_pi(overlap.phase - dphi_analytic);
  }
  const auto [p_up, p_down] = populations(overlap);
  return {sensitivity(exp.traj), p_up, p_down, dphi, overlap.modulus};
}

// Population sweep over midpoint displacements M at fixed t_f; one row
// per M, sorted by sensitivity.  Rows are independent and may be
// computed by a worker pool; output order never depends on scheduling.
inline SweepTable sensitivity_sweep(const PhysicalConfig& cfg, double c,
                                    const std::vector<double>& m_values,
                                    Engine engine = Engine::analytic,
                                    int jobs = 1, const Quadrature& q = {},
                                    int tdse_steps = default_time_steps,
                                    int tdse_grid = default_grid_points) {
  if (m_values.empty()) throw domain_error("sensitivity_sweep: no M values given");
  SweepTable table;
  table.rows.resize(m_values.size());
  detail::parallel_for(jobs, m_values.size(), [&](std::size_t i) {
    ExperimentSpec exp{cfg, design_alpha_A(cfg, m_values[i]), {c, 0.0, 0.0},
                       Scenario::both};
    table.rows[i] =
        predict(exp, ground_occupation(), engine, q, tdse_steps, tdse_grid);
  });
  std::sort(table.rows.begin(), table.rows.end(),
            [](const SweepRow& a, const SweepRow& b) {
              return a.sensitivity < b.sensitivity;
            });
  return table;
}

// Recover c from the population oscillation.  A coarse scan over the c
// range the table can support (at least 1.5 periods inside the span,
// at most the Nyquist limit of the row spacing) locates the global
// minimum of the misfit, then a golden-section refinement polishes it.
inline ExtractionResult extract_c(const SweepTable& table) {
  const std::size_t n = table.rows.size();
  if (n < 20) throw extraction_error("extract_c: need at least 20 rows");
  std::vector<double> s(n), p(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = table.rows[i].sensitivity;
    p[i] = table.rows[i].p_up;
  }
  const auto [s_min_it, s_max_it] = std::minmax_element(s.begin(), s.end());
  const double span = *s_max_it - *s_min_it;
  if (!(span > 0.0)) throw extraction_error("extract_c: degenerate sensitivity span");
  std::vector<double> sorted_s = s;
  std::sort(sorted_s.begin(), sorted_s.end());
  double max_gap = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    max_gap = std::max(max_gap, sorted_s[i] - sorted_s[i - 1]);
  }
  const double pi_hbar = std::numbers::pi * hbar;
  const double c_lo = 1.5 * pi_hbar / span;        // >= 1.5 periods in span
  const double c_hi = pi_hbar / (2.0 * max_gap);   // Nyquist for the spacing
  if (!(c_lo < c_hi)) {
    throw extraction_error("extract_c: table cannot bracket an oscillation");
  }

  auto sse = [&](double c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double model = 0.5 + 0.5 * std::cos(2.0 * c * s[i] / hbar);
      acc += (model - p[i]) * (model - p[i]);
    }
    return acc;
  };

  const double dc = pi_hbar / (8.0 * *s_max_it);  // < pi/4 phase step at S_max
  int scan_points = static_cast<int>((c_hi - c_lo) / dc) + 2;
  scan_points = std::min(scan_points, 200000);
  double best_c = c_lo, best_sse = sse(c_lo);
  for (int i = 1; i < scan_points; ++i) {
    const double c = c_lo + (c_hi - c_lo) * i / (scan_points - 1);
    const double v = sse(c);
    if (v < best_sse) {
      best_sse = v;
      best_c = c;
    }
  }

  double lo = std::max(c_lo, best_c - dc), hi = std::min(c_hi, best_c + dc);
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = sse(x1), f2 = sse(x2);
  while (hi - lo > 1e-9 * best_c) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = sse(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = sse(x2);
    }
  }
  const double c_est = 0.5 * (lo + hi);
  const double residual = std::sqrt(sse(c_est) / n);
  if (residual > 0.05) {
    throw extraction_error("extract_c: residual above 0.05, no credible oscillation");
  }
  if (span < 1.5 * pi_hbar / c_est) {
    throw extraction_error("extract_c: table spans fewer than 1.5 fitted periods");
  }
  return {c_est, pi_hbar / c_est, residual};
}

// SweepTable CSV: S_nm_us, P_up, P_down, delta_phi_rad, modulus.
inline void write_sweep_csv(const SweepTable& table, std::ostream& out) {
  out << "S_nm_us,P_up,P_down,delta_phi_rad,modulus\n";
  char buf[192];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  r.sensitivity / units::nm_us, r.p_up, r.p_down, r.delta_phi,
                  r.modulus);
    out << buf;
  }
}

inline SweepTable read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "S_nm_us,P_up,P_down,delta_phi_rad,modulus") {
    throw config_error("sweep csv: missing or wrong header");
  }
  SweepTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    SweepRow r;
    char comma;
    double s_nm_us;
    if (!(row >> s_nm_us >> comma >> r.p_up >> comma >> r.p_down >> comma >>
          r.delta_phi >> comma >> r.modulus)) {
      throw config_error("sweep csv: malformed row: " + line);
    }
    r.sensitivity = s_nm_us * units::nm_us;
    table.rows.push_back(r);
  }
  return table;
}

}  // namespace ionifo
