// Grid-based quantum propagation: stationary states, split-step
// accuracy against the closed-form phases, and the optical-lattice
// anharmonicity trend.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ionifo/fft.hpp"
#include "ionifo/interferometer.hpp"
#include "ionifo/phases.hpp"
#include "ionifo/tdse.hpp"

using namespace ionifo;

namespace {

const PhysicalConfig cfg = make_config(9.012182, 2.0, 0.5);
const PolynomialTrajectory traj = design_alpha_A(cfg, 135.0 * units::nm);
// Generic (non-period) duration for phase checks away from wrap points.
const PhysicalConfig gen = make_config(9.012182, 2.0, 0.37);
constexpr double c10 = 10.0 * units::zN;

PolynomialTrajectory zero_traj(const PhysicalConfig& c) {
  return design_alpha_A(c, 0.0);
}

// <H> on the grid: kinetic part in momentum space, potential on the grid.
double energy_expectation(const PhysicalConfig& c, const GridWavefunction& psi) {
  std::vector<std::complex<double>> hat = psi.amplitudes;
  fft::forward(hat);
  const std::size_t n = hat.size();
  const double dk = 2.0 * std::numbers::pi / (n * psi.dx);
  double t_sum = 0.0, hat_norm = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double idx =
        j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - n;
    const double k = dk * idx;
    t_sum += std::norm(hat[j]) * c.hbar * c.hbar * k * k / (2.0 * c.mass);
    hat_norm += std::norm(hat[j]);
  }
  double v_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = psi.x_at(i);
    v_sum += std::norm(psi.amplitudes[i]) * 0.5 * spring_constant(c) * x * x;
  }
  return t_sum / hat_norm + v_sum * psi.dx / psi.norm();
}

}  // namespace

TEST_CASE("ground state has the textbook moments") {
  const double span = 200.0 * units::nm;
  const GridWavefunction psi = ground_state(cfg, 0.0, 512, span);
  CHECK(psi.norm() == Catch::Approx(1.0).margin(1e-12));
  double mean = 0.0, var = 0.0;
  for (std::size_t i = 0; i < psi.amplitudes.size(); ++i) {
    const double w = std::norm(psi.amplitudes[i]) * psi.dx;
    mean += w * psi.x_at(i);
  }
  for (std::size_t i = 0; i < psi.amplitudes.size(); ++i) {
    const double w = std::norm(psi.amplitudes[i]) * psi.dx;
    var += w * (psi.x_at(i) - mean) * (psi.x_at(i) - mean);
  }
  CHECK(std::abs(mean) < 1e-12);
  CHECK(var == Catch::Approx(cfg.hbar / (2.0 * cfg.mass * cfg.omega))
                   .epsilon(1e-10));
}

TEST_CASE("grid construction rejects unusable layouts") {
  const double span = 200.0 * units::nm;
  CHECK_THROWS_AS(ground_state(cfg, 0.0, 500, span), config_error);
  CHECK_THROWS_AS(ground_state(cfg, 0.0, 32, span), config_error);
  CHECK_THROWS_AS(ground_state(cfg, 190.0 * units::nm, 512, span), config_error);
  CHECK_THROWS_AS(fock_state(cfg, 13, 512, span), domain_error);
}

TEST_CASE("fock states are orthonormal eigenstates on the grid") {
  const double span = 200.0 * units::nm;
  std::vector<GridWavefunction> states;
  for (int n = 0; n <= 5; ++n) states.push_back(fock_state(cfg, n, 512, span));
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; b <= 5; ++b) {
      const double expected = a == b ? 1.0 : 0.0;
      CHECK(std::abs(grid_inner_product(states[a], states[b]) - expected) <
            1e-10);
    }
  }
  for (int n = 0; n <= 5; ++n) {
    CHECK(energy_expectation(cfg, states[n]) ==
          Catch::Approx(cfg.hbar * cfg.omega * (n + 0.5)).epsilon(1e-8));
  }
}

TEST_CASE("stationary ground state only turns its clock") {
  const double span = 200.0 * units::nm;
  const GridWavefunction psi0 = ground_state(gen, 0.0, 512, span);
  const PotentialSpec spec{{0.0, 0.0, 0.0}, Branch::up, {}, zero_traj(gen)};
  PropagationLog log;
  const GridWavefunction psi = propagate(gen, spec, psi0, 10000, &log);
  const std::complex<double> ov = grid_inner_product(psi0, psi);
  CHECK(std::abs(ov) == Catch::Approx(1.0).margin(1e-8));
  // Phase advances as -w t / 2 for the n = 0 eigenstate.
  const double expected = -0.5 * gen.omega * gen.t_final;
  CHECK(detail::wrap_to_pi(std::arg(ov) - expected) ==
        Catch::Approx(0.0).margin(1e-6));
  CHECK(log.max_norm_drift < 1e-9);
  CHECK(log.energies.size() >= 32);
  CHECK(log.energies.front() ==
        Catch::Approx(0.5 * gen.hbar * gen.omega).epsilon(1e-5));
}

TEST_CASE("displaced ground state is stationary at the shifted minimum") {
  const double c = 5.0 * units::zN;
  const double center = c / spring_constant(cfg);
  const double span = 250.0 * units::nm;
  const GridWavefunction psi0 = ground_state(cfg, center, 1024, span);
  const PotentialSpec spec{{c, 0.0, 0.0}, Branch::up, {}, zero_traj(cfg)};
  const GridWavefunction psi = propagate(cfg, spec, psi0, 10000);
  CHECK(std::abs(grid_inner_product(psi0, psi)) ==
        Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("propagate validates stepping and grids") {
  const double span = 200.0 * units::nm;
  const GridWavefunction psi0 = ground_state(cfg, 0.0, 512, span);
  const PotentialSpec spec{{0.0, 0.0, 0.0}, Branch::up, {}, zero_traj(cfg)};
  CHECK_THROWS_AS(propagate(cfg, spec, psi0, 5000), domain_error);
  const PhysicalConfig slow = make_config(9.012182, 2.0, 200.0);
  const PotentialSpec slow_spec{{0.0, 0.0, 0.0}, Branch::up, {}, zero_traj(slow)};
  CHECK_THROWS_AS(propagate(slow, slow_spec, psi0, 10000), domain_error);
}

TEST_CASE("identical branches overlap to unity") {
  const PerturbationSpec pert{0.0, 0.0, 0.0};
  const double span = default_grid_span(cfg, traj, pert);
  const GridWavefunction psi0 = ground_state(cfg, 0.0, 512, span);
  const OverlapResult r =
      branch_overlap(cfg, {pert, Branch::up, {}, traj},
                     {pert, Branch::down, {}, traj}, psi0, 10000);
  CHECK(r.modulus == Catch::Approx(1.0).margin(1e-6));
  CHECK(std::abs(detail::wrap_to_pi(r.phase)) < 1e-6);
  CHECK_THROWS_AS(branch_overlap(cfg, {pert, Branch::down, {}, traj},
                                 {pert, Branch::up, {}, traj}, psi0, 10000),
                  domain_error);
}

TEST_CASE("one-branch propagation reproduces the half-size phase") {
  const PerturbationSpec up_pert{c10, 0.0, 0.0};
  const PerturbationSpec down_pert{0.0, 0.0, 0.0};
  const double span = default_grid_span(cfg, traj, up_pert);
  const GridWavefunction psi0 = ground_state(cfg, 0.0, 1024, span);
  const OverlapResult r =
      branch_overlap(cfg, {up_pert, Branch::up, {}, traj},
                     {down_pert, Branch::down, {}, traj}, psi0, 20000);
  const double expected = phase_difference_one_branch(cfg, traj, c10);
  CHECK(detail::wrap_to_pi(r.phase - expected) ==
        Catch::Approx(0.0).margin(1e-3));
}

TEST_CASE("branch phase is converged in grid and step size") {
  const PerturbationSpec pert{c10, 0.0, 0.0};
  const double span = default_grid_span(cfg, traj, pert);
  auto phase_at = [&](int grid_n, int steps) {
    const GridWavefunction psi0 = ground_state(cfg, 0.0, grid_n, span);
    return branch_overlap(cfg, {pert, Branch::up, {}, traj},
                          {pert, Branch::down, {}, traj}, psi0, steps)
        .phase;
  };
  const double coarse = phase_at(1024, 25000);
  const double fine = phase_at(2048, 50000);
  CHECK(std::abs(detail::wrap_to_pi(fine - coarse)) < 1e-4);
}

TEST_CASE("lattice force profiles follow the cos(2kx) Taylor ladder") {
  LatticeSpec spec{0.0, 1.5e6, LatticeOrder::linear};
  const double f = 1e-20;
  const double x = 0.4 / spec.k;  // kx = 0.4
  CHECK(lattice_force_profile(spec, f, x).value == f);
  spec.order = LatticeOrder::cubic;
  CHECK(lattice_force_profile(spec, f, x).value ==
        Catch::Approx(f * (1.0 - 2.0 * 0.16)).epsilon(1e-14));
  spec.order = LatticeOrder::quintic;
  CHECK(lattice_force_profile(spec, f, x).value ==
        Catch::Approx(f * (1.0 - 0.32 + 2.0 / 3.0 * 0.0256)).epsilon(1e-13));
  spec.order = LatticeOrder::full;
  CHECK(lattice_force_profile(spec, f, x).value ==
        Catch::Approx(f * std::cos(0.8)).epsilon(1e-14));
  for (auto order : {LatticeOrder::linear, LatticeOrder::cubic,
                     LatticeOrder::quintic, LatticeOrder::full}) {
    spec.order = order;
    CHECK(lattice_force_profile(spec, f, 0.0).value == f);
  }
  // Truncated orders flag evaluation past the quarter wavelength.
  spec.order = LatticeOrder::cubic;
  CHECK(lattice_force_profile(spec, f, 2.0 / spec.k).out_of_range);
  spec.order = LatticeOrder::full;
  CHECK_FALSE(lattice_force_profile(spec, f, 2.0 / spec.k).out_of_range);
  spec.k = 0.0;
  CHECK_THROWS_AS(lattice_force_profile(spec, f, 0.0), domain_error);
}

TEST_CASE("higher truncation orders hug the full lattice force") {
  const double f = 1e-20;
  const double x = 0.4;  // in units of 1/k below
  LatticeSpec spec{0.0, 1.0, LatticeOrder::full};
  const double full = lattice_force_profile(spec, f, x).value;
  spec.order = LatticeOrder::cubic;
  const double cubic = lattice_force_profile(spec, f, x).value;
  spec.order = LatticeOrder::quintic;
  const double quintic = lattice_force_profile(spec, f, x).value;
  CHECK(std::abs(quintic - full) < std::abs(cubic - full));
}

TEST_CASE("lattice dephasing grows with the cubic metric") {
  // Same common force, same lattice constant; the trajectory with the
  // larger cubic metric accumulates the larger anharmonic phase error
  // relative to the homogeneous-force prediction.
  const PerturbationSpec pert{c10, 0.0, 0.0};
  const LatticeSpec lat{0.0, 1.5e6, LatticeOrder::full};
  auto discrepancy = [&](double m_nm) {
    const PolynomialTrajectory t = design_alpha_A(cfg, m_nm * units::nm);
    const double span = default_grid_span(cfg, t, pert);
    const GridWavefunction psi0 = ground_state(cfg, 0.0, 1024, span);
    const OverlapResult r =
        branch_overlap(cfg, {pert, Branch::up, lat, t},
                       {pert, Branch::down, lat, t}, psi0, 20000);
    const double ideal = phase_difference(cfg, t, pert);
    return std::abs(detail::wrap_to_pi(r.phase - ideal));
  };
  const double small = discrepancy(90.0);
  const double large = discrepancy(135.0);
  CHECK(large > 1e-3);        // effect clearly above solver noise
  CHECK(large > 2.0 * small); // metric ratio is (135/90)^3 = 3.4
}
