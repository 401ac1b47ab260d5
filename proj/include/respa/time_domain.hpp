#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "respa/comb.hpp"
#include "respa/kerr.hpp"
#include "respa/modal_system.hpp"
#include "respa/resonator.hpp"

namespace respa {

struct TimeDomainSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;      ///< on scaled amplitudes
  double transient = 300.0;    ///< discarded lead-in, in units of 1/max kappa (>= 20)
  double ramp = 20.0;          ///< smooth drive turn-on, in units of 1/max kappa
  /// Record length is `periods` full periods of `beat` (rad/s). Every tone
  /// of interest should sit at an integer multiple of beat / periods away
  /// from the frame frequency so it falls on an exact bin.
  double beat = 0.0;
  int periods = 50;
  int samples_per_period = 64;  ///< samples per period of the fastest frame offset
  double frame_omega = 0.0;     ///< rotating frame; 0 selects the mean drive frequency
  double min_step = 1e-9;       ///< in units of 1/max kappa; smaller steps abort
  double settle_tol = 1e-4;     ///< relative energy drift between record halves
  /// Initial physical amplitudes sqrt(J) per mode; empty starts from rest.
  Eigen::VectorXcd initial;
};

/// Trajectory of the modal equations under a set of drive tones, recorded in
/// the rotating frame after the transient.
struct TimeDomainRun {
  TimeDomainSettings settings;
  std::vector<DriveTone> drives;
  double frame_omega = 0.0;  ///< rad/s
  double rate = 1.0;         ///< rad/s; time unit is 1/rate
  double energy = 1.0;       ///< J; amplitude unit is sqrt(energy)
  std::vector<double> time;  ///< s, since the start of the integration
  Eigen::MatrixXcd amplitudes;  ///< samples x modes, sqrt(J), rotating frame
  Eigen::VectorXcd output;      ///< output field sqrt(W), rotating frame
  long steps = 0;
  double smallest_step = 0.0;  ///< s
  double energy_trend = 0.0;   ///< relative change of mean energy between halves
  bool settled = false;
};

/// Adaptive Dormand-Prince integration of
///   da_m/dt = (i w_m - k_m / 2) a_m + i sum G conj(a_r) a_p a_q + sqrt(kc_m) b_in(t)
/// with the same coupling convention as the harmonic-balance solver.
TimeDomainRun integrate(const ModeSet& modes, const KerrMatrix& kerr, const std::vector<DriveTone>& drives,
                        const TimeDomainSettings& settings);

/// Flat-top windowed projection of the recorded output at absolute angular
/// frequency `omega`. Returns the complex amplitude of the e^{i omega t}
/// component. Throws Error("resolution") if a stronger component lies
/// within three bins.
std::complex<double> extract_tone(const TimeDomainRun& run, double omega);

/// Same projection applied to the amplitude of one mode.
std::complex<double> extract_mode_tone(const TimeDomainRun& run, std::size_t mode, double omega);

/// Flat-top projection of arbitrary uniformly sampled data at frequency
/// `offset` (rad per unit of `dt`). No resolution check.
std::complex<double> windowed_projection(const Eigen::VectorXcd& samples, double dt, double offset);

void write_trajectory_csv(const TimeDomainRun& run, std::ostream& os);

/// Slow up and down ramps of a single drive's power between `power_lo` and
/// `power_hi` (W); the energy of `mode` is recorded along both ramps.
struct HysteresisSweep {
  std::vector<double> power_up, energy_up;
  std::vector<double> power_down, energy_down;
  double jump_up = 0.0;    ///< W, where the up ramp jumps to the upper branch
  double jump_down = 0.0;  ///< W, where the down ramp falls back
  bool bistable = false;
};

HysteresisSweep hysteresis_sweep(const ModeSet& modes, const KerrMatrix& kerr, const DriveTone& drive,
                                 double power_lo, double power_hi, double ramp_time, std::size_t mode = 0,
                                 const TimeDomainSettings& settings = {});

}  // namespace respa
