#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ionifo/constants.hpp"
#include "ionifo/errors.hpp"
#include "ionifo/interferometer.hpp"
#include "ionifo/overlap.hpp"
#include "ionifo/phases.hpp"
#include "ionifo/trajectory.hpp"
#include "ionifo/verify.hpp"

// JSON forms of the shareable value types.  Units at this boundary are
// the bench units (nm, us, zN); everything is validated strictly —
// unknown keys are rejected so a typo in a config cannot silently pass.

namespace ionifo {

using json = nlohmann::json;

inline std::string kind_to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::alpha_a: return "A";
    case TrajectoryKind::alpha_b: return "B";
    case TrajectoryKind::custom: return "custom";
  }
  return "custom";
}

inline TrajectoryKind kind_from_string(const std::string& s) {
  if (s == "A") return TrajectoryKind::alpha_a;
  if (s == "B") return TrajectoryKind::alpha_b;
  if (s == "custom") return TrajectoryKind::custom;
  throw config_error("trajectory json: unknown kind '" + s + "'");
}

inline json trajectory_to_json(const PolynomialTrajectory& traj) {
  json coeffs = json::array();
  for (double c : traj.coeffs) coeffs.push_back(c / units::nm);
  return {{"kind", kind_to_string(traj.kind)},
          {"t_final_us", traj.t_final / units::us},
          {"coeffs_nm", coeffs}};
}

inline PolynomialTrajectory trajectory_from_json(const json& j) {
  if (!j.is_object()) throw config_error("trajectory json: expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "kind" && key != "t_final_us" && key != "coeffs_nm") {
      throw config_error("trajectory json: unknown key '" + key + "'");
    }
  }
  if (!j.contains("kind") || !j.contains("t_final_us") || !j.contains("coeffs_nm")) {
    throw config_error("trajectory json: kind, t_final_us and coeffs_nm are required");
  }
  PolynomialTrajectory traj;
  traj.kind = kind_from_string(j.at("kind").get<std::string>());
  traj.t_final = j.at("t_final_us").get<double>() * units::us;
  if (!(traj.t_final > 0.0)) {
    throw config_error("trajectory json: t_final_us must be positive");
  }
  const auto& coeffs = j.at("coeffs_nm");
  if (!coeffs.is_array() || coeffs.empty() || coeffs.size() > 9) {
    throw config_error("trajectory json: coeffs_nm must hold 1..9 numbers");
  }
  for (const auto& c : coeffs) {
    if (!c.is_number()) throw config_error("trajectory json: coeffs_nm must be numeric");
    traj.coeffs.push_back(c.get<double>() * units::nm);
  }
  return traj;
}

inline json branch_report_to_json(const BranchPhaseReport& r) {
  return {{"g_up_rad", r.g_up},
          {"g_down_rad", r.g_down},
          {"delta_phi_rad", r.delta_phi},
          {"phi_dynamical_up_rad", r.phi_dynamical_up},
          {"phi_dynamical_down_rad", r.phi_dynamical_down},
          {"phi_geometric_up_rad", r.phi_geometric_up},
          {"phi_geometric_down_rad", r.phi_geometric_down}};
}

inline json overlap_to_json(const OverlapResult& o) {
  return {{"re", o.value.real()},
          {"im", o.value.imag()},
          {"modulus", o.modulus},
          {"phase_rad", o.phase}};
}

inline json extraction_to_json(const ExtractionResult& r) {
  return {{"c_zN", r.c_estimate / units::zN},
          {"period_nm_us", r.period_estimate / units::nm_us},
          {"residual", r.fit_residual}};
}

inline json checks_to_json(const std::vector<VerifyCheck>& checks) {
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"measured", c.measured},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass}});
  }
  return arr;
}

}  // namespace ionifo
