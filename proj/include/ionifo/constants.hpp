#pragma once

// Physical constants (CODATA 2018) and the unit factors used at API
// boundaries.  Everything inside the library is strict SI; nm/us/zN/MHz
// conversions happen only where values enter or leave.

namespace ionifo {

inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

namespace units {
inline constexpr double nm = 1e-9;    // m
inline constexpr double us = 1e-6;    // s
inline constexpr double zN = 1e-21;   // N
inline constexpr double MHz = 1e6;    // Hz
inline constexpr double nm_us = 1e-15;      // m s   (sensitivity)
inline constexpr double nm3_us = 1e-33;     // m^3 s (cubic metric)
}  // namespace units

}  // namespace ionifo
