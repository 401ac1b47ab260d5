#pragma once

#include <complex>
#include <vector>

namespace respa {

struct DriveTone {
  double omega = 0.0;     ///< rad/s
  double power_in = 0.0;  ///< W at the device port
  double phase = 0.0;     ///< rad

  /// Complex input amplitude with |B|^2 = power.
  std::complex<double> amplitude() const { return std::polar(std::sqrt(power_in), phase); }
  void validate() const;
};

/// Lines f_n = omega_base + n * delta for the integer indices in `index`.
///
/// The lower pump sits at n = 0 and the upper pump at n = 1; a single pump
/// (or two merged pumps) gives one line at n = 0 with delta = 0. Lines at
/// non-positive frequency are dropped.
struct PumpComb {
  double omega_base = 0.0;
  double delta = 0.0;
  int order = 0;
  std::vector<int> index;
  std::vector<double> freq;
  std::vector<std::complex<double>> drive;  ///< B_n, sqrt(W)

  std::size_t size() const { return freq.size(); }
  bool degenerate() const { return delta == 0.0; }
  /// Comb index of the upper pump (0 when degenerate).
  int upper_pump_index() const { return degenerate() ? 0 : 1; }
  /// omega_p1 + omega_p2 (2 omega_p when degenerate).
  double pump_sum() const { return 2.0 * omega_base + upper_pump_index() * delta; }
  /// Position of comb index n in the line arrays, or -1.
  int position_of(int n) const;
};

/// `merge_tolerance` (rad/s): two pumps closer than this collapse onto one
/// line whose power is the sum of both.
PumpComb build_comb(const std::vector<DriveTone>& pumps, int n_max_order,
                    double merge_tolerance = 0.0);

/// Same comb geometry with every drive amplitude multiplied by `factor`.
PumpComb scale_drive(const PumpComb& comb, double factor);

}  // namespace respa
