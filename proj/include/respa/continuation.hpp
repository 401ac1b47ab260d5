#pragma once

#include <vector>

#include <Eigen/Core>

#include "respa/harmonic_balance.hpp"

namespace respa {

struct BranchPoint {
  double drive_factor = 0.0;    ///< multiplies every drive amplitude
  double power_fraction = 0.0;  ///< drive_factor^2
  Eigen::MatrixXcd amplitudes;  ///< sqrt(J)
  double stored_energy = 0.0;   ///< J, summed over modes and lines
  double sigma_min = 0.0;
};

struct PowerBranch {
  std::vector<BranchPoint> points;
  std::vector<BranchPoint> folds;  ///< turning points in drive amplitude
};

struct ArclengthSettings {
  double initial_step = 0.05;
  double max_step = 0.5;
  double min_step = 1e-8;
  int max_points = 4000;
  double tol = 1e-11;
  int max_corrector = 25;
};

/// Pseudo-arclength continuation of the pump steady state in drive
/// amplitude, from near zero up to `max_drive_factor`. Passes through folds,
/// which are located to high precision and reported separately.
PowerBranch trace_power_branch(const ModalSystem& sys, const PumpComb& comb, double max_drive_factor,
                               const ArclengthSettings& settings = {});

}  // namespace respa
