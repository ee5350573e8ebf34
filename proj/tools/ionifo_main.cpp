// Command-line front end for the driven trapped-ion interferometer
// library: trajectory design, branch phases and overlaps, population
// sweeps, force extraction, and the built-in verification suite.
//
// Exit codes: 0 success, 1 computation or check failure, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ionifo/ionifo.hpp"
#include "ionifo/serialize.hpp"

namespace {

using nlohmann::json;
using namespace ionifo;

// Bad invocations (unknown config keys, missing or conflicting flags)
// exit with code 2; everything else that throws exits with code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::set<std::string>& allowed_config_keys() {
  static const std::set<std::string> keys = {
      "mass_amu", "freq_mhz",  "tf_us",   "kind",    "M_nm",
      "S_nm_us",  "v_nm",      "traj",    "c_zN",    "eps_zN",
      "x0_nm",    "x0_auto",   "scenario", "engine",  "jobs",
      "M_from_nm", "M_to_nm",  "M_steps", "table",   "out",
      "quick",    "inject_fault"};
  return keys;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed_config_keys().count(key)) {
      throw UsageError("config file: unknown key '" + key + "'");
    }
  }
  return j;
}

// Config values fill in anything the command line left unset; explicit
// flags always win.
template <class T>
void overlay(const CLI::Option* opt, const json& cfg, const char* key, T& value) {
  if (opt != nullptr && opt->count() > 0) return;
  if (!cfg.contains(key)) return;
  try {
    value = cfg.at(key).get<T>();
  } catch (const std::exception&) {
    throw UsageError(std::string("config file: bad value for '") + key + "'");
  }
}

template <class T>
void overlay_opt(const CLI::Option* opt, const json& cfg, const char* key,
                 std::optional<T>& value) {
  if (opt != nullptr && opt->count() > 0) return;
  if (!cfg.contains(key)) return;
  try {
    value = cfg.at(key).get<T>();
  } catch (const std::exception&) {
    throw UsageError(std::string("config file: bad value for '") + key + "'");
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open output file: " + path);
  out << text;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

PolynomialTrajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open trajectory file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error("trajectory file " + path + ": " + e.what());
  }
  return trajectory_from_json(j);
}

int effective_jobs(int flag_jobs) {
  const char* env = std::getenv("ION_IFO_JOBS");
  if (env == nullptr || *env == '\0') return flag_jobs;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1 || v > 4096) {
    throw UsageError("ION_IFO_JOBS must be a positive integer");
  }
  return static_cast<int>(v);
}

// ---------------------------------------------------------------- design

struct DesignArgs {
  std::string kind;
  std::optional<double> tf_us, m_nm, s_nm_us, v_nm;
  double mass_amu = 9.012182;
  double freq_mhz = 2.0;
  std::string out = "trajectory.json";
  std::string profile;
  CLI::Option *kind_o = nullptr, *tf_o = nullptr, *m_o = nullptr, *s_o = nullptr,
              *v_o = nullptr, *mass_o = nullptr, *freq_o = nullptr,
              *out_o = nullptr;
};

int run_design(DesignArgs& a, const json& cfg_json) {
  overlay(a.kind_o, cfg_json, "kind", a.kind);
  overlay_opt(a.tf_o, cfg_json, "tf_us", a.tf_us);
  overlay_opt(a.m_o, cfg_json, "M_nm", a.m_nm);
  overlay_opt(a.s_o, cfg_json, "S_nm_us", a.s_nm_us);
  overlay_opt(a.v_o, cfg_json, "v_nm", a.v_nm);
  overlay(a.mass_o, cfg_json, "mass_amu", a.mass_amu);
  overlay(a.freq_o, cfg_json, "freq_mhz", a.freq_mhz);
  overlay(a.out_o, cfg_json, "out", a.out);

  if (a.kind != "A" && a.kind != "B") throw UsageError("design: --kind must be A or B");
  if (!a.tf_us) throw UsageError("design: --tf is required");
  const PhysicalConfig cfg = make_config(a.mass_amu, a.freq_mhz, *a.tf_us);

  PolynomialTrajectory traj;
  if (a.kind == "A") {
    if (!a.m_nm) throw UsageError("design: --kind A needs --M <nm>");
    if (a.s_nm_us || a.v_nm) throw UsageError("design: --kind A takes --M only");
    traj = design_alpha_A(cfg, *a.m_nm * units::nm);
  } else {
    if (!a.s_nm_us || !a.v_nm) throw UsageError("design: --kind B needs --S and --v");
    if (a.m_nm) throw UsageError("design: --kind B takes --S/--v, not --M");
    traj = design_alpha_B(cfg, *a.s_nm_us * units::nm_us, *a.v_nm * units::nm);
  }

  write_text(a.out, dump_json(trajectory_to_json(traj)));
  char line[160];
  std::snprintf(line, sizeof line, "S = %.6g nm*us, cubic metric = %.6g nm^3*us\n",
                sensitivity(traj) / units::nm_us,
                cubic_metric(traj) / units::nm3_us);
  std::cout << line;

  if (!a.profile.empty()) {
    std::ostringstream csv;
    csv << "t_us,alpha_nm,f_zN\n";
    char buf[128];
    for (int i = 0; i <= 400; ++i) {
      const double t = traj.t_final * i / 400.0;
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", t / units::us,
                    evaluate(traj, t).alpha / units::nm,
                    driving_force(traj, cfg, t) / units::zN);
      csv << buf;
    }
    write_text(a.profile, csv.str());
  }
  return 0;
}

// ----------------------------------------------------------------- phase

struct PhaseArgs {
  std::string traj_path;
  std::optional<double> c_zn;
  double eps_zn = 0.0;
  std::optional<double> x0_nm;
  bool x0_auto = false;
  std::string scenario = "both";
  double mass_amu = 9.012182;
  double freq_mhz = 2.0;
  std::string out;
  CLI::Option *traj_o = nullptr, *c_o = nullptr, *eps_o = nullptr,
              *x0_o = nullptr, *x0auto_o = nullptr, *scen_o = nullptr,
              *mass_o = nullptr, *freq_o = nullptr, *out_o = nullptr;
};

int run_phase(PhaseArgs& a, const json& cfg_json) {
  overlay(a.traj_o, cfg_json, "traj", a.traj_path);
  overlay_opt(a.c_o, cfg_json, "c_zN", a.c_zn);
  overlay(a.eps_o, cfg_json, "eps_zN", a.eps_zn);
  overlay_opt(a.x0_o, cfg_json, "x0_nm", a.x0_nm);
  overlay(a.x0auto_o, cfg_json, "x0_auto", a.x0_auto);
  overlay(a.scen_o, cfg_json, "scenario", a.scenario);
  overlay(a.mass_o, cfg_json, "mass_amu", a.mass_amu);
  overlay(a.freq_o, cfg_json, "freq_mhz", a.freq_mhz);
  overlay(a.out_o, cfg_json, "out", a.out);

  if (a.traj_path.empty()) throw UsageError("phase: --traj is required");
  if (!a.c_zn) throw UsageError("phase: --c is required");
  if (a.scenario != "both" && a.scenario != "one") {
    throw UsageError("phase: --scenario must be 'both' or 'one'");
  }
  if (a.x0_auto && a.x0_nm) throw UsageError("phase: --x0 and --x0-auto conflict");

  const PolynomialTrajectory traj = load_trajectory(a.traj_path);
  const PhysicalConfig cfg =
      make_config(a.mass_amu, a.freq_mhz, traj.t_final / units::us);
  const double c = *a.c_zn * units::zN;
  const double eps = a.eps_zn * units::zN;
  double x0 = a.x0_nm.value_or(0.0) * units::nm;
  if (a.x0_auto) x0 = c / spring_constant(cfg);

  const bool has_x0 = x0 != 0.0 || a.x0_auto;
  if (a.scenario == "one" && (has_x0 || eps != 0.0)) {
    throw UsageError("phase: the one-branch scenario supports neither --eps nor --x0");
  }
  if (eps != 0.0 && has_x0) {
    throw UsageError("phase: --eps together with a crossing point is not supported");
  }

  json report;
  report["scenario"] = a.scenario;
  report["c_zN"] = *a.c_zn;
  report["eps_zN"] = a.eps_zn;
  report["x0_nm"] = x0 / units::nm;

  OverlapResult overlap;
  if (a.scenario == "one") {
    const auto [g_up, g_dn] = branch_lr_phases_one(cfg, traj, c);
    report["branch_phases"] = {{"g_up_rad", g_up},
                               {"g_down_rad", g_dn},
                               {"delta_phi_rad", g_dn - g_up}};
    report["delta_phi_rad"] = g_dn - g_up;
    overlap = state_overlap(cfg, traj, {c, 0.0, 0.0}, ground_occupation(),
                            Scenario::one);
  } else if (eps != 0.0) {
    const auto [g_up, g_dn] = branch_lr_phases(cfg, traj, {c, eps, 0.0});
    const double dphi = phase_difference_with_error(cfg, traj, {c, eps, 0.0});
    report["branch_phases"] = {{"g_up_rad", g_up},
                               {"g_down_rad", g_dn},
                               {"delta_phi_rad", dphi}};
    report["delta_phi_rad"] = dphi;
    overlap = state_overlap(cfg, traj, {c, eps, 0.0}, ground_occupation(),
                            Scenario::both);
  } else {
    // Exact drive: full report including the dynamical/geometric split
    // along the actual classical trajectories (crossing point folded
    // into the effective common force).
    const BranchPhaseReport r =
        dynamical_geometric_split(cfg, traj, {c, 0.0, x0}, ComplexPhasePoint{});
    report["branch_phases"] = branch_report_to_json(r);
    report["delta_phi_rad"] = r.delta_phi;
    const PerturbationSpec eff{PerturbationSpec{c, 0.0, x0}.c_tilde(cfg), 0.0, 0.0};
    overlap = state_overlap(cfg, traj, eff, ground_occupation(), Scenario::both);
  }

  report["overlap"] = overlap_to_json(overlap);
  const auto [p_up, p_down] = populations(overlap);
  report["p_up"] = p_up;
  report["p_down"] = p_down;
  write_text(a.out, dump_json(report));
  return 0;
}

// ----------------------------------------------------------------- sweep

struct SweepArgs {
  std::optional<double> c_zn, m_from, m_to, tf_us;
  std::optional<int> m_steps;
  std::string engine = "analytic";
  int jobs = 1;
  double mass_amu = 9.012182;
  double freq_mhz = 2.0;
  std::string out;
  CLI::Option *c_o = nullptr, *from_o = nullptr, *to_o = nullptr,
              *steps_o = nullptr, *tf_o = nullptr, *engine_o = nullptr,
              *jobs_o = nullptr, *mass_o = nullptr, *freq_o = nullptr,
              *out_o = nullptr;
};

int run_sweep(SweepArgs& a, const json& cfg_json) {
  overlay_opt(a.c_o, cfg_json, "c_zN", a.c_zn);
  overlay_opt(a.from_o, cfg_json, "M_from_nm", a.m_from);
  overlay_opt(a.to_o, cfg_json, "M_to_nm", a.m_to);
  overlay_opt(a.steps_o, cfg_json, "M_steps", a.m_steps);
  overlay_opt(a.tf_o, cfg_json, "tf_us", a.tf_us);
  overlay(a.engine_o, cfg_json, "engine", a.engine);
  overlay(a.jobs_o, cfg_json, "jobs", a.jobs);
  overlay(a.mass_o, cfg_json, "mass_amu", a.mass_amu);
  overlay(a.freq_o, cfg_json, "freq_mhz", a.freq_mhz);
  overlay(a.out_o, cfg_json, "out", a.out);

  if (!a.c_zn) throw UsageError("sweep: --c is required");
  if (!a.m_from || !a.m_to || !a.m_steps) {
    throw UsageError("sweep: --M-from, --M-to and --M-steps are required");
  }
  if (!a.tf_us) throw UsageError("sweep: --tf is required");
  if (*a.m_steps < 1) throw UsageError("sweep: --M-steps must be >= 1");
  if (a.engine != "analytic" && a.engine != "tdse") {
    throw UsageError("sweep: --engine must be 'analytic' or 'tdse'");
  }
  const int jobs = effective_jobs(a.jobs);
  if (jobs < 1) throw UsageError("sweep: --jobs must be >= 1");

  const PhysicalConfig cfg = make_config(a.mass_amu, a.freq_mhz, *a.tf_us);
  std::vector<double> m_values;
  const int steps = *a.m_steps;
  for (int i = 0; i < steps; ++i) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    m_values.push_back((*a.m_from + frac * (*a.m_to - *a.m_from)) * units::nm);
  }
  const Engine engine = a.engine == "tdse" ? Engine::tdse : Engine::analytic;
  const SweepTable table =
      sensitivity_sweep(cfg, *a.c_zn * units::zN, m_values, engine, jobs);

  std::ostringstream csv;
  write_sweep_csv(table, csv);
  write_text(a.out, csv.str());
  return 0;
}

// --------------------------------------------------------------- extract

struct ExtractArgs {
  std::string table_path;
  std::string out;
  CLI::Option *table_o = nullptr, *out_o = nullptr;
};

int run_extract(ExtractArgs& a, const json& cfg_json) {
  overlay(a.table_o, cfg_json, "table", a.table_path);
  overlay(a.out_o, cfg_json, "out", a.out);
  if (a.table_path.empty()) throw UsageError("extract: --table is required");

  std::ifstream in(a.table_path);
  if (!in) throw config_error("cannot open table file: " + a.table_path);
  const SweepTable table = read_sweep_csv(in);
  const ExtractionResult result = extract_c(table);
  write_text(a.out, dump_json(extraction_to_json(result)));
  return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  bool quick = false;
  std::string inject_fault = "none";
  std::string out;
  CLI::Option *quick_o = nullptr, *fault_o = nullptr, *out_o = nullptr;
};

int run_verify(VerifyArgs& a, const json& cfg_json) {
  overlay(a.quick_o, cfg_json, "quick", a.quick);
  overlay(a.fault_o, cfg_json, "inject_fault", a.inject_fault);
  overlay(a.out_o, cfg_json, "out", a.out);

  VerifyOptions opt;
  opt.quick = a.quick;
  if (a.inject_fault == "none") {
    opt.fault = FaultInjection::none;
  } else if (a.inject_fault == "delta-alpha-sign") {
    opt.fault = FaultInjection::delta_alpha_sign;
  } else {
    throw UsageError("verify: unknown fault '" + a.inject_fault + "'");
  }

  const std::vector<VerifyCheck> checks = run_verification(opt);
  bool all_pass = true;
  for (const auto& c : checks) all_pass = all_pass && c.pass;
  json report;
  report["checks"] = checks_to_json(checks);
  report["all_pass"] = all_pass;
  write_text(a.out, dump_json(report));
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven trapped-ion interferometer toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON file providing defaults for any flag");

  DesignArgs d;
  CLI::App* design = app.add_subcommand(
      "design", "Design an inverse-engineered trajectory and report S");
  d.kind_o = design->add_option("--kind", d.kind, "Trajectory family: A or B");
  d.tf_o = design->add_option("--tf", d.tf_us, "Final time in us");
  d.m_o = design->add_option("--M", d.m_nm, "Midpoint displacement in nm (kind A)");
  d.s_o = design->add_option("--S", d.s_nm_us, "Target sensitivity in nm*us (kind B)");
  d.v_o = design->add_option("--v", d.v_nm, "Passage value at t_f/5 and 4t_f/5 in nm (kind B)");
  d.mass_o = design->add_option("--mass-amu", d.mass_amu, "Ion mass in amu");
  d.freq_o = design->add_option("--freq-mhz", d.freq_mhz, "Trap frequency in MHz");
  d.out_o = design->add_option("--out", d.out, "Trajectory JSON path");
  design->add_option("--profile", d.profile,
                     "Also write a t/alpha/force CSV to this path");

  PhaseArgs p;
  CLI::App* phase = app.add_subcommand(
      "phase", "Branch phases, overlap and populations for a trajectory");
  p.traj_o = phase->add_option("--traj", p.traj_path, "Trajectory JSON file");
  p.c_o = phase->add_option("--c", p.c_zn, "Common force in zN");
  p.eps_o = phase->add_option("--eps", p.eps_zn, "Drive error in zN");
  p.x0_o = phase->add_option("--x0", p.x0_nm, "Potential crossing point in nm");
  p.x0auto_o = phase->add_flag("--x0-auto", p.x0_auto,
                               "Set the crossing point to c/(m w^2)");
  p.scen_o = phase->add_option("--scenario", p.scenario,
                               "Force acts on 'both' branches or 'one'");
  p.mass_o = phase->add_option("--mass-amu", p.mass_amu, "Ion mass in amu");
  p.freq_o = phase->add_option("--freq-mhz", p.freq_mhz, "Trap frequency in MHz");
  p.out_o = phase->add_option("--out", p.out, "Report JSON path (default stdout)");

  SweepArgs s;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Population sweep over midpoint displacements at fixed t_f");
  s.c_o = sweep->add_option("--c", s.c_zn, "Common force in zN");
  s.from_o = sweep->add_option("--M-from", s.m_from, "First midpoint in nm");
  s.to_o = sweep->add_option("--M-to", s.m_to, "Last midpoint in nm");
  s.steps_o = sweep->add_option("--M-steps", s.m_steps, "Number of midpoints");
  s.tf_o = sweep->add_option("--tf", s.tf_us, "Final time in us");
  s.engine_o = sweep->add_option("--engine", s.engine, "'analytic' or 'tdse'");
  s.jobs_o = sweep->add_option("--jobs", s.jobs, "Worker threads (ION_IFO_JOBS overrides)");
  s.mass_o = sweep->add_option("--mass-amu", s.mass_amu, "Ion mass in amu");
  s.freq_o = sweep->add_option("--freq-mhz", s.freq_mhz, "Trap frequency in MHz");
  s.out_o = sweep->add_option("--out", s.out, "CSV path (default stdout)");

  ExtractArgs e;
  CLI::App* extract = app.add_subcommand(
      "extract", "Recover the unknown force from a sweep CSV");
  e.table_o = extract->add_option("--table", e.table_path, "Sweep CSV file");
  e.out_o = extract->add_option("--out", e.out, "Result JSON path (default stdout)");

  VerifyArgs v;
  CLI::App* verify = app.add_subcommand(
      "verify", "Run the built-in oracle-equivalence checks");
  v.quick_o = verify->add_flag("--quick", v.quick,
                               "Reduced grids with 10x tolerances");
  v.fault_o = verify->add_option("--inject-fault", v.inject_fault,
                                 "Self-test fixture: 'none' or 'delta-alpha-sign'");
  v.out_o = verify->add_option("--out", v.out, "Report JSON path (default stdout)");

  for (CLI::App* sub : {design, phase, sweep, extract, verify}) {
    sub->add_option("--config", config_path,
                    "JSON file providing defaults for any flag");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : 2;
  }

  try {
    const json cfg_json =
        config_path.empty() ? json::object() : load_config_file(config_path);
    if (design->parsed()) return run_design(d, cfg_json);
    if (phase->parsed()) return run_phase(p, cfg_json);
    if (sweep->parsed()) return run_sweep(s, cfg_json);
    if (extract->parsed()) return run_extract(e, cfg_json);
    if (verify->parsed()) return run_verify(v, cfg_json);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
