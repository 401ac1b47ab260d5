#pragma once

#include <string>
#include <utility>
#include <vector>

#include "respa/config.hpp"
#include "respa/intermod.hpp"
#include "respa/kerr.hpp"
#include "respa/modal_system.hpp"
#include "respa/scattering.hpp"
#include "respa/serialize.hpp"

namespace respa {

/// Mode set, Kerr couplings and scaled system for a scenario.
struct Prepared {
  ModeSet all;    ///< every extracted harmonic
  ModeSet modes;  ///< the harmonics listed in the scenario
  KerrMatrix kerr;
  ModalSystem sys;
};

Prepared prepare(const ExperimentConfig& config);

/// Pump solve at the given pump settings with the scenario's solver section.
PumpCombSolution solve_operating_point(const Prepared& p, const ExperimentConfig& config,
                                       const std::vector<PumpSetting>& pumps);

/// Window (rad/s) searched for the peak gain: between the pumps for
/// non-degenerate pumping, otherwise the sweep range.
std::pair<double, double> peak_window(const ExperimentConfig& config, const PumpComb& comb);

/// Refined phase-insensitive peak gain at an operating point. NaN when the
/// pump solve fails.
PeakGain operating_peak(const Prepared& p, const ExperimentConfig& config,
                        const std::vector<PumpSetting>& pumps);

struct Derivative {
  double value = 0.0;
  double step = 0.0;
  int shrinks = 0;
  bool converged = false;
};

struct PointSensitivity {
  std::vector<PumpSetting> pumps;
  double peak_db = 0.0;
  std::vector<Derivative> d_freq;   ///< dB per MHz, one per pump
  std::vector<Derivative> d_power;  ///< dB per dB, one per pump
};

struct SensitivityReport {
  PointSensitivity point;
  bool has_degenerate = false;
  PointSensitivity degenerate;
  bool matched = false;  ///< peak gains within 0.5 dB
  bool degenerate_more_sensitive = false;
};

PointSensitivity point_sensitivity(const Prepared& p, const ExperimentConfig& config,
                                   const std::vector<PumpSetting>& pumps);
SensitivityReport sensitivity(const ExperimentConfig& config);

struct CrossHarmonicResult {
  PumpCombSolution solution;
  GainProfile profile;
  GainBandwidth gain;
  SidebandReport sidebands;
  double expected_spacing = 0.0;  ///< rad/s, 2 |2 w_p1 - w_p2|
  std::vector<double> measured_spacing;  ///< per pump mode, rad/s
  double min_suppression_db = 0.0;       ///< weakest sideband below the strongest pump line
};

CrossHarmonicResult cross_harmonic(const ExperimentConfig& config);

struct ProbeCheck {
  double omega = 0.0;
  double hb_db = 0.0;
  double td_db = 0.0;
};

struct CombCheck {
  double omega = 0.0;
  std::size_t mode = 0;
  double level_db = 0.0;   ///< relative to the strongest line
  double rel_error = 0.0;
};

struct OracleReport {
  std::vector<ProbeCheck> probes;
  std::vector<CombCheck> comb;
  double max_gain_error_db = 0.0;
  double max_strong_rel_error = 0.0;  ///< lines within 60 dB of the strongest
  double max_weak_rel_error = 0.0;    ///< lines 60 dB or more below
  bool settled = true;
};

OracleReport oracle_check(const ExperimentConfig& config);

struct OutputFile {
  std::string name;
  std::string content;
};

struct ExperimentResult {
  json summary;
  std::vector<OutputFile> files;
};

/// Runs the scenario's experiment kind. The summary carries a "version"
/// field; everything else depends only on the config.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace respa
