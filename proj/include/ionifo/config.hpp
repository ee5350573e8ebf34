#pragma once

#include <cmath>
#include <numbers>

#include "ionifo/constants.hpp"
#include "ionifo/errors.hpp"

namespace ionifo {

// Trap and pulse parameters shared by every module.  hbar is carried
// here so nothing downstream reaches for a different value.
struct PhysicalConfig {
  double mass = 0.0;     // kg
  double omega = 0.0;    // rad/s
  double t_final = 0.0;  // s
  double hbar = ionifo::hbar;  // J s
};

// Build a configuration from bench units: atomic mass units, trap
// frequency in MHz (omega = 2*pi*f), pulse duration in microseconds.
inline PhysicalConfig make_config(double mass_amu, double freq_megahertz,
                                  double t_final_us) {
  if (!(mass_amu > 0.0) || !(freq_megahertz > 0.0) || !(t_final_us > 0.0)) {
    throw domain_error("make_config: mass, frequency and duration must be positive");
  }
  PhysicalConfig cfg;
  cfg.mass = mass_amu * atomic_mass_unit;
  cfg.omega = 2.0 * std::numbers::pi * freq_megahertz * units::MHz;
  cfg.t_final = t_final_us * units::us;
  return cfg;
}

// m*omega^2, the spring constant: converts forces to equilibrium shifts.
inline double spring_constant(const PhysicalConfig& cfg) {
  return cfg.mass * cfg.omega * cfg.omega;
}

// Ground-state position spread sqrt(hbar/2m*omega); Var(x) = sigma^2.
inline double ground_state_sigma(const PhysicalConfig& cfg) {
  return std::sqrt(cfg.hbar / (2.0 * cfg.mass * cfg.omega));
}

// One trap period 2*pi/omega.
inline double trap_period(const PhysicalConfig& cfg) {
  return 2.0 * std::numbers::pi / cfg.omega;
}

}  // namespace ionifo
