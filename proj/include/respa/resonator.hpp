#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "respa/units.hpp"

namespace respa {

/// Physical description of the series-coupled half-wave line.
///
/// All quantities SI. `l_per_len` is the total (geometric plus kinetic)
/// inductance per unit length; `i_star` sets the current scale of the
/// quadratic inductance correction and may be +inf for a linear line.
struct ResonatorGeometry {
  double length = 0.0;
  double l_per_len = 0.0;
  double c_per_len = 0.0;
  double c_couple_in = 0.0;
  double c_couple_out = 0.0;
  double q_internal = 1.0;
  double z_env = 50.0;
  double i_star = std::numeric_limits<double>::infinity();

  double phase_velocity() const;
  double line_impedance() const;
  /// Zero-coupling half-wave frequency of harmonic n (rad/s).
  double bare_omega(int n) const;
  void validate() const;

  bool operator==(const ResonatorGeometry&) const = default;
};

struct Mode {
  int index = 1;
  double omega0 = 0.0;
  double kappa_c = 0.0;
  double kappa_i = 0.0;
  std::string current_profile_id;

  double kappa() const { return kappa_c + kappa_i; }
};

struct ModeSet {
  std::vector<Mode> modes;
  ResonatorGeometry geometry;

  std::size_t size() const { return modes.size(); }
  const Mode& operator[](std::size_t i) const { return modes[i]; }
  /// Subset with the given harmonic numbers, in increasing order.
  ModeSet select(const std::vector<int>& harmonics) const;
  /// Position of harmonic n in this set, or -1.
  int position_of(int harmonic) const;
};

std::string sinusoidal_profile_id(int n);

ModeSet find_modes(const ResonatorGeometry& geom, int n_max);

/// Single-port reflection assembled from the mode parameters.
std::complex<double> linear_response(const ModeSet& modes, double omega);

// ---------------------------------------------------------------------------
// Cascaded two-port network (ABCD), templated on scalar so the same algebra
// evaluates on the real axis and at complex natural frequencies.

template <typename Scalar>
using Abcd = Eigen::Matrix<Scalar, 2, 2>;

/// Series element given by its admittance, scaled by that admittance so that
/// an open (zero-admittance) element stays finite: y * [[1, 1/y], [0, 1]].
template <typename Scalar>
Abcd<Scalar> scaled_series_admittance(Scalar y) {
  Abcd<Scalar> m;
  m << y, Scalar(1), Scalar(0), y;
  return m;
}

template <typename Scalar>
Abcd<Scalar> transmission_line(Scalar electrical_length, Scalar z0) {
  using std::cos;
  using std::sin;
  const Scalar i(std::complex<double>(0.0, 1.0));
  Abcd<Scalar> m;
  m << cos(electrical_length), i * z0 * sin(electrical_length),
      i * sin(electrical_length) / z0, cos(electrical_length);
  return m;
}

/// Scaled ABCD of C_in -- line -- C_out at complex angular frequency `omega`.
/// The result equals (y_in * y_out) times the physical ABCD matrix.
/// `lossy` adds the attenuation implied by q_internal.
Abcd<std::complex<double>> coupled_line_abcd(const ResonatorGeometry& geom,
                                            std::complex<double> omega, bool lossy,
                                            bool include_out = true);

/// Denominator of S21 (both ports terminated in z_env), scaled as above.
/// Its complex zeros are the loaded natural frequencies.
std::complex<double> network_pole_function(const ResonatorGeometry& geom,
                                           std::complex<double> omega, bool lossy,
                                           bool include_out = true);

/// Direct network S21 with z_env terminations.
std::complex<double> network_s21(const ResonatorGeometry& geom, double omega, bool lossy);

/// Real-axis resonance condition of the network with zero-impedance ports.
double resonance_condition(const ResonatorGeometry& geom, double omega);

/// Complex natural frequency of the loaded network near `guess`
/// (Im > 0 for a decaying e^{i w t} mode).
std::complex<double> natural_frequency(const ResonatorGeometry& geom, double guess,
                                       bool lossy, bool include_out = true);

/// Product of the two port coupling amplitudes of a mode, sqrt(kappa_in
/// kappa_out) times the phase the coupling capacitors impart, taken from the
/// residue of the network transmission at the loaded pole.
std::complex<double> transmission_coupling(const ResonatorGeometry& geom, const Mode& mode);

/// Two-port transmission built from the mode parameters; the oracle
/// counterpart of network_s21.
std::complex<double> modal_s21(const ResonatorGeometry& geom, const ModeSet& modes, double omega);

}  // namespace respa
