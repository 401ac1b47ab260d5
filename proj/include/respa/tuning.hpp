#pragma once

#include <vector>

#include "respa/config.hpp"

namespace respa {

struct TuneStep {
  double power_offset_db = 0.0;
  double second_freq_ghz = 0.0;
  double peak_db = 0.0;
  bool usable = false;
};

struct TuneResult {
  std::vector<PumpSetting> pumps;
  double peak_db = 0.0;
  bool reached = false;
  std::vector<TuneStep> history;
};

/// Deterministic search for a two-pump operating point with the target peak
/// gain. At the configured powers the second pump is scanned over
/// +-span_mhz; the crossing of the target nearest the configured frequency is
/// refined by bisection. Without a crossing both powers are stepped by
/// power_step_db, upward if every scanned point fell short of the target and
/// downward otherwise. Points that fail to converge or are flagged bifurcated
/// are skipped.
TuneResult tune_operating_point(const ExperimentConfig& config, double target_db);

/// Power of a single pump at fixed frequency giving the target peak gain,
/// by bisection between the configured power and `max_power_dbm`.
TuneResult tune_single_pump(const ExperimentConfig& config, double target_db, double max_power_dbm);

/// Copy of `config` with the tuned pumps and kind "gain-sweep".
ExperimentConfig tuned_scenario(const ExperimentConfig& config, const TuneResult& result);

}  // namespace respa
