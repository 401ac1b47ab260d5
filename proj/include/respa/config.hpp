#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "respa/comb.hpp"
#include "respa/harmonic_balance.hpp"
#include "respa/resonator.hpp"

namespace respa {

/// One pump as written in a scenario file.
struct PumpSetting {
  double freq_ghz = 0.0;
  double power_dbm = -200.0;
  double phase_deg = 0.0;

  DriveTone tone() const;
  bool operator==(const PumpSetting&) const = default;
};

struct SweepSetting {
  double start_ghz = 0.0;
  double stop_ghz = 0.0;
  int points = 2001;
  int theta_points = 181;  ///< phase grid over [0, 2 pi)

  std::vector<double> omega_grid() const;
  double step() const;  ///< rad/s
  bool operator==(const SweepSetting&) const = default;
};

struct SolverSetting {
  int comb_order = 3;
  int sideband_order = 1;
  double tol = 1e-10;
  int continuation_steps = 24;
  double bifurcation_ratio = 1e-3;
  double merge_tol_hz = 0.0;  ///< pumps closer than this share one comb line

  HbSettings hb() const;
  bool operator==(const SolverSetting&) const = default;
};

struct TuneSetting {
  double target_db = 20.0;
  double span_mhz = 2.0;       ///< second-pump scan half-width
  int points = 81;             ///< second-pump scan points
  double power_step_db = 0.25; ///< applied to both pumps when the target is out of reach
  int max_power_steps = 24;
  bool operator==(const TuneSetting&) const = default;
};

struct OracleSetting {
  int probes = 11;
  double probe_dbc = -60.0;    ///< probe power relative to the first pump
  double beat_mhz = 0.2;       ///< probe offsets are multiples of this
  int periods = 50;
  double transient = 300.0;    ///< in units of 1 / kappa
  bool operator==(const OracleSetting&) const = default;
};

struct SensitivitySetting {
  double freq_step_mhz = 0.05;
  double power_step_db = 0.05;
  /// Degenerate reference point for the comparison table; skipped when the
  /// power is below -150 dBm.
  PumpSetting degenerate;
  bool operator==(const SensitivitySetting&) const = default;
};

/// A scenario: one experiment kind plus the sections it needs.
///
/// Units per key are fixed: geometry in SI (m, H/m, F/m, F, ohm, A), pump
/// frequencies in GHz, powers in dBm, phases in degrees.
struct ExperimentConfig {
  std::string kind;
  std::string name;
  int n_max = 4;                ///< harmonics extracted from the geometry
  std::vector<int> harmonics;   ///< harmonics kept in the modal solvers
  ResonatorGeometry geometry;
  std::vector<PumpSetting> pumps;
  SweepSetting sweep;
  SolverSetting solver;
  TuneSetting tune;
  OracleSetting oracle;
  SensitivitySetting sensitivity;

  std::vector<DriveTone> drive_tones() const;
  bool operator==(const ExperimentConfig&) const = default;
};

const std::vector<std::string>& experiment_kinds();

ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);
void write_config(const ExperimentConfig& config, std::ostream& os);
std::string config_to_string(const ExperimentConfig& config);

}  // namespace respa
