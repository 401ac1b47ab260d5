#pragma once

#include <vector>

#include <Eigen/Core>

#include "respa/resonator.hpp"

namespace respa {

/// Spatial average over the line of the product of four standing-wave
/// current profiles sin(n pi x / length). Exact for integer harmonics:
/// 3/8 when all four agree, 1/4 for two distinct pairs, and so on.
double current_overlap(int a, int b, int c, int d);

/// Self- and cross-Kerr coefficients of a ModeSet.
///
/// Mode amplitudes are normalized so that |a_m|^2 is the stored energy in
/// joules. In these units the modal equations carry the cubic term
///
///     i * sum_{r,p,q} G(m,r,p,q) * conj(a_r) * a_p * a_q
///
/// with G(m,r,p,q) = scale * current_overlap(n_m, n_r, n_p, n_q). The
/// diagonal self-phase term |a_m|^2 a_m therefore has weight 1 and the
/// cross-phase term |a_k|^2 a_m weight 2. k(m, n) = G(m, m, n, n).
struct KerrMatrix {
  Eigen::MatrixXd k;          ///< rad/(s J), symmetric, non-positive
  std::vector<int> harmonic;  ///< harmonic number of each row
  double scale = 0.0;         ///< rad/(s J); coefficient multiplying the overlaps
  double reference_omega = 0.0;
  static constexpr const char* normalization = "|a|^2 = stored energy (J)";

  std::size_t size() const { return harmonic.size(); }
  double coupling(std::size_t m, std::size_t r, std::size_t p, std::size_t q) const {
    return scale * current_overlap(harmonic[m], harmonic[r], harmonic[p], harmonic[q]);
  }
};

/// Modal reduction of the quadratic kinetic-inductance nonlinearity.
/// See docs/kerr_reduction.md for the derivation of `scale`.
KerrMatrix reduce_kerr(const ResonatorGeometry& geom, const ModeSet& modes);

}  // namespace respa
