#include "respa/modal_system.hpp"

#include <algorithm>
#include <cmath>

#include "respa/units.hpp"

namespace respa {

ModalSystem make_modal_system(const ModeSet& modes, const KerrMatrix& kerr) {
  if (modes.size() == 0) throw Error("modes", "empty mode set");
  if (kerr.size() != modes.size()) throw Error("kerr", "Kerr matrix does not match the mode set");
  const std::size_t n = modes.size();
  ModalSystem sys;
  sys.rate = 0.0;
  for (const Mode& m : modes.modes) sys.rate = std::max(sys.rate, m.kappa());
  if (!(sys.rate > 0.0)) throw Error("modes", "modes must have a finite linewidth");

  double g_max = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) g_max = std::max(g_max, std::abs(kerr.coupling(a, b, c, d)));
  // Energy at which the strongest Kerr shift equals one linewidth.
  sys.energy = g_max > 0.0 ? sys.rate / g_max : 1e-15;

  sys.kappa.resize(static_cast<Eigen::Index>(n));
  sys.sqrt_kc.resize(static_cast<Eigen::Index>(n));
  for (std::size_t m = 0; m < n; ++m) {
    sys.omega.push_back(modes[m].omega0);
    sys.kappa(static_cast<Eigen::Index>(m)) = modes[m].kappa() / sys.rate;
    sys.sqrt_kc(static_cast<Eigen::Index>(m)) = std::sqrt(modes[m].kappa_c / sys.rate);
  }
  sys.gamma.resize(n * n * n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d)
          sys.gamma[((a * n + b) * n + c) * n + d] = kerr.coupling(a, b, c, d) * sys.energy / sys.rate;
  return sys;
}

}  // namespace respa
