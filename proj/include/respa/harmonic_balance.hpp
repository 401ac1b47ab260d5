#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <array>

#include "respa/comb.hpp"
#include "respa/kerr.hpp"
#include "respa/modal_system.hpp"
#include "respa/resonator.hpp"

namespace respa {

struct HbSettings {
  double tol = 1e-10;              ///< on the scaled residual infinity norm
  int continuation_steps = 24;     ///< geometric power ramp, >= 20
  double ramp_decades = 4.0;       ///< first step at 10^-ramp_decades of full power
  int max_newton = 60;
  int max_subdivisions = 10;
  double bifurcation_ratio = 1e-3; ///< relative to the zero-power value
};

struct PumpCombSolution {
  PumpComb comb;
  Eigen::MatrixXcd amplitudes;  ///< modes x lines, sqrt(J)
  double residual_norm = 0.0;
  double jacobian_min_singular_value = 0.0;
  double zero_power_min_singular_value = 0.0;
  bool converged = false;
  bool bifurcated = false;
  int newton_iterations = 0;
  std::string diagnostic;
};

/// Ordered comb-index triples (j, k, l) with f_j + f_k - f_l = f_n, per line n.
struct MixingTable {
  std::vector<std::vector<std::array<int, 3>>> triples;
};
MixingTable make_mixing_table(const PumpComb& comb);

/// Scaled harmonic-balance residual for scaled amplitudes `a` (modes x lines).
Eigen::MatrixXcd hb_residual(const ModalSystem& sys, const PumpComb& comb, const MixingTable& table,
                             const Eigen::MatrixXcd& a, double drive_factor = 1.0);

/// Real (doubled) Jacobian of the scaled residual, unknown ordering
/// [Re a ; Im a] with a flattened as m * lines + n.
Eigen::MatrixXd hb_jacobian(const ModalSystem& sys, const PumpComb& comb, const MixingTable& table,
                            const Eigen::MatrixXcd& a);

double min_singular_value(const Eigen::MatrixXd& j);

/// Doubled real layout [Re a ; Im a] of a modes x lines matrix (row-major).
Eigen::VectorXd pack_real(const Eigen::MatrixXcd& a);
Eigen::MatrixXcd unpack_real(const Eigen::VectorXd& x, Eigen::Index modes, Eigen::Index lines);

/// Damped Newton from a scaled initial guess. Returns scaled amplitudes.
struct NewtonResult {
  Eigen::MatrixXcd a;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};
NewtonResult newton_solve(const ModalSystem& sys, const PumpComb& comb, const MixingTable& table,
                          Eigen::MatrixXcd a0, double drive_factor, const HbSettings& settings);

/// Full solve: geometric power continuation from zero, warm-started.
PumpCombSolution solve_pump_steady_state(const ModalSystem& sys, const PumpComb& comb,
                                         const HbSettings& settings = {});
PumpCombSolution solve_pump_steady_state(const ModeSet& modes, const KerrMatrix& kerr,
                                         const PumpComb& comb, const HbSettings& settings = {});

/// Newton polish of a physical-unit initial guess at full drive, without
/// continuation. Used by sweeps that track a branch.
PumpCombSolution solve_from(const ModalSystem& sys, const PumpComb& comb,
                            const Eigen::MatrixXcd& initial, const HbSettings& settings = {});

struct SpectrumLine {
  double omega = 0.0;
  double power = 0.0;  ///< W
  std::complex<double> amplitude;  ///< C_n, sqrt(W)
  int comb_index = 0;
};

/// Output lines C_n = B_n - sum_m sqrt(kappa_c,m) A[m][n].
std::vector<SpectrumLine> comb_output_spectrum(const PumpCombSolution& solution, const ModeSet& modes);

}  // namespace respa
