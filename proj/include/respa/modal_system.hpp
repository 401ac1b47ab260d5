#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "respa/kerr.hpp"
#include "respa/resonator.hpp"

namespace respa {

/// Mode parameters and four-wave couplings in the dimensionless units the
/// solvers work in: time in 1/rate, energy in `energy`, so that amplitudes
/// at interesting operating points are O(1).
///
///   amplitude a = A / sqrt(energy)
///   drive     b = B / sqrt(rate * energy)
///   coupling  g = G * energy / rate
struct ModalSystem {
  double rate = 1.0;    ///< rad/s
  double energy = 1.0;  ///< J
  std::vector<double> omega;  ///< rad/s, unscaled
  Eigen::VectorXd kappa;      ///< scaled total linewidth
  Eigen::VectorXd sqrt_kc;    ///< sqrt(kappa_c / rate)
  std::vector<double> gamma;  ///< scaled couplings, M^4 row-major

  std::size_t size() const { return omega.size(); }
  double g(std::size_t m, std::size_t r, std::size_t p, std::size_t q) const {
    const std::size_t n = omega.size();
    return gamma[((m * n + r) * n + p) * n + q];
  }
  /// Scaled complex linear coefficient i (omega_m - f) - kappa_m / 2.
  std::complex<double> linear(std::size_t m, double f) const {
    return {-0.5 * kappa(static_cast<Eigen::Index>(m)), (omega[m] - f) / rate};
  }
  double amplitude_scale() const { return std::sqrt(energy); }
  double drive_scale() const { return std::sqrt(rate * energy); }
};

ModalSystem make_modal_system(const ModeSet& modes, const KerrMatrix& kerr);

}  // namespace respa
