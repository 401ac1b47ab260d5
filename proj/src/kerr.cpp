#include "respa/kerr.hpp"

#include <cmath>
#include <cstdlib>

namespace respa {

namespace {

// Average over x in [0, 1] of cos(u pi x) cos(v pi x) for integers u, v.
double cos_product_mean(int u, int v) {
  u = std::abs(u);
  v = std::abs(v);
  if (u == 0 && v == 0) return 1.0;
  return u == v ? 0.5 : 0.0;
}

}  // namespace

double current_overlap(int a, int b, int c, int d) {
  // sin(a)sin(b) = [cos(a-b) - cos(a+b)] / 2
  return 0.25 * (cos_product_mean(a - b, c - d) - cos_product_mean(a - b, c + d) -
                 cos_product_mean(a + b, c - d) + cos_product_mean(a + b, c + d));
}

KerrMatrix reduce_kerr(const ResonatorGeometry& geom, const ModeSet& modes) {
  geom.validate();
  KerrMatrix out;
  const std::size_t n = modes.size();
  out.harmonic.resize(n);
  double log_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.harmonic[i] = modes[i].index;
    log_sum += std::log(modes[i].omega0);
  }
  out.reference_omega = n > 0 ? std::exp(log_sum / static_cast<double>(n)) : 0.0;

  // First-order frequency pull of a line mode from the fundamental of
  // L0 (I + I^3 / I*^2), with peak current I^2 = 4 E / (L0 length).
  const double inductance = geom.l_per_len * geom.length;
  out.scale = std::isinf(geom.i_star)
                  ? 0.0
                  : -3.0 * out.reference_omega / (inductance * geom.i_star * geom.i_star);

  out.k.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = out.coupling(i, i, j, j);
  return out;
}

}  // namespace respa
