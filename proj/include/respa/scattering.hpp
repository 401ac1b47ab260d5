#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "respa/harmonic_balance.hpp"
#include "respa/modal_system.hpp"

namespace respa {

/// Sideband frequencies coupled to a probe at omega_s by the pump comb:
/// the signal family omega_s + k * delta and the idler family
/// pump_sum - omega_s + k * delta, for k in `offsets`.
struct SidebandBasis {
  double omega_s = 0.0;
  double delta = 0.0;
  double pump_sum = 0.0;
  std::vector<int> offsets;
  std::vector<double> signal_freq;
  std::vector<double> idler_freq;
  std::size_t modes = 0;
  /// Offset k of the idler line that coincides with omega_s, if any.
  bool degenerate = false;
  int degenerate_offset = 0;

  std::size_t size() const { return offsets.size(); }
};

/// `extra_order`: sideband offsets span the comb's index range widened by
/// this many lines on each side. Lines at non-positive frequency are dropped.
SidebandBasis make_sideband_basis(const PumpComb& comb, std::size_t modes, double omega_s,
                                  int extra_order = 1, double coincidence_tol = 0.0);

struct SidebandResponse {
  std::complex<double> g_s{1.0, 0.0};  ///< output at omega_s per unit input
  std::complex<double> g_i{0.0, 0.0};  ///< output at pump_sum - omega_s per unit input
  /// Idler gain of the line landing on omega_s (equals g_i at the main
  /// degeneracy); zero when the basis is not degenerate.
  std::complex<double> g_coincident{0.0, 0.0};
  bool degenerate = false;
  bool singular = false;
  /// Output per unit input on every basis line, ordered as the basis offsets.
  std::vector<std::complex<double>> signal_out;
  std::vector<std::complex<double>> idler_out;
};

/// Small-signal (Bogoliubov) response around a pump steady state. Holds the
/// pump-dependent coupling tensors so repeated probes are cheap.
class SidebandSolver {
 public:
  SidebandSolver(const ModalSystem& sys, const PumpCombSolution& solution, int extra_order = 1);

  SidebandResponse respond(double omega_s) const;
  SidebandBasis basis(double omega_s) const;
  const ModalSystem& system() const { return sys_; }
  const PumpComb& comb() const { return comb_; }

 private:
  ModalSystem sys_;
  PumpComb comb_;
  int extra_order_ = 1;
  int pair_min_ = 0;
  int diff_min_ = 0;
  // conversion[d](m, x): coupling of X_{x, k-d} into row (m, k).
  std::vector<Eigen::MatrixXcd> conversion_;
  // pairing[s](m, x): coupling of Y_{x, s - c_hi - k} into row (m, k), s = c_j + c_l.
  std::vector<Eigen::MatrixXcd> pairing_;
};

struct GainPoint {
  double omega_s = 0.0;
  std::complex<double> g_s;
  std::complex<double> g_i;
  /// 20 log10 |g_s| relative to the unpumped reflection at omega_s. At a
  /// signal-idler coincidence this is the phase-optimal coherent gain.
  double gain_db = 0.0;
  bool degenerate = false;
  bool singular = false;
};

struct GainProfile {
  std::vector<GainPoint> points;
  int comb_order = 0;
  int sideband_order = 0;
  double pump_sum = 0.0;
};

GainProfile gain_profile(const ModalSystem& sys, const ModeSet& modes, const PumpCombSolution& solution,
                         const std::vector<double>& omega_grid, int extra_order = 1);
GainProfile gain_profile(const PumpCombSolution& solution, const ModeSet& modes, const KerrMatrix& kerr,
                         const std::vector<double>& omega_grid, int extra_order = 1);

struct QuadratureGains {
  double amplified = 0.0;  ///< power gain of the amplified quadrature
  double squeezed = 0.0;   ///< power gain of the squeezed quadrature
  double axis = 0.0;       ///< input phase (rad) of the amplified quadrature
};

/// Singular values of the real 2x2 map (Re x, Im x) -> (Re y, Im y) with
/// y = g_s x + g_i conj(x).
QuadratureGains quadrature_decomposition(std::complex<double> g_s, std::complex<double> g_i);

struct PhaseSweepResult {
  std::vector<double> theta;
  std::vector<double> gain_db;
  std::complex<double> g_s;
  std::complex<double> g_i;
  double max_db = 0.0;
  double min_db = 0.0;
  double period = 0.0;         ///< rad
  double period_error = 0.0;   ///< max |G(t) - G(t + period)| / max G
  double plateau_db = 0.0;     ///< phase-insensitive gain around the degeneracy
  QuadratureGains quadratures;
};

/// Gain versus input phase at omega_s = pump_sum / 2. The plateau is the mean
/// phase-insensitive power gain over +-10 steps of `plateau_step` (rad/s)
/// around the degeneracy, excluding the degenerate point itself.
PhaseSweepResult phase_sensitive_gain(const ModalSystem& sys, const ModeSet& modes,
                                      const PumpCombSolution& solution,
                                      const std::vector<double>& theta_grid, double plateau_step,
                                      int extra_order = 1);

struct GainBandwidth {
  double peak_gain = 0.0;  ///< amplitude gain
  double peak_db = 0.0;
  double peak_omega = 0.0;
  double bandwidth = 0.0;  ///< rad/s, full width at half peak power
  double lower_edge = 0.0;
  double upper_edge = 0.0;
  double product = 0.0;    ///< peak_gain * bandwidth, rad/s
};

/// Peak and 3-dB width of a profile. Degenerate and singular points are
/// skipped. Throws Error("window") when a half-power crossing is missing.
GainBandwidth gain_bandwidth(const GainProfile& profile);

/// Phase-insensitive peak gain between `lo` and `hi` (rad/s), coarse scan
/// followed by Brent refinement.
struct PeakGain {
  double omega = 0.0;
  double gain_db = 0.0;
};
PeakGain peak_gain(const SidebandSolver& solver, const ModeSet& modes, double lo, double hi,
                   int coarse_points = 201);

/// Power gain in dB of a phase-insensitive response, relative to the
/// unpumped reflection at the same frequency.
double relative_gain_db(std::complex<double> g, const ModeSet& modes, double omega);

}  // namespace respa
