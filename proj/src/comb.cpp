#include "respa/comb.hpp"

#include <cmath>

#include "respa/units.hpp"

namespace respa {

void DriveTone::validate() const {
  if (!(omega > 0.0)) throw Error("drive", "drive frequency must be positive");
  if (!(power_in >= 0.0)) throw Error("drive", "drive power must be non-negative");
}

int PumpComb::position_of(int n) const {
  for (std::size_t i = 0; i < index.size(); ++i)
    if (index[i] == n) return static_cast<int>(i);
  return -1;
}

PumpComb build_comb(const std::vector<DriveTone>& pumps, int n_max_order, double merge_tolerance) {
  if (pumps.empty()) throw Error("comb", "at least one pump tone is required");
  if (pumps.size() > 2) throw Error("comb", "more than two pump tones are not supported");
  if (n_max_order < 0) throw Error("comb", "comb order must be non-negative");
  for (const auto& p : pumps) p.validate();

  PumpComb comb;
  comb.order = n_max_order;
  const bool merged =
      pumps.size() == 1 || std::abs(pumps[0].omega - pumps[1].omega) <= merge_tolerance;
  if (merged) {
    double power = 0.0;
    for (const auto& p : pumps) power += p.power_in;
    comb.omega_base = pumps.size() == 1 ? pumps[0].omega : 0.5 * (pumps[0].omega + pumps[1].omega);
    comb.delta = 0.0;
    comb.index = {0};
    comb.freq = {comb.omega_base};
    comb.drive = {std::polar(std::sqrt(power), pumps[0].phase)};
    return comb;
  }
  const DriveTone& lo = pumps[0].omega < pumps[1].omega ? pumps[0] : pumps[1];
  const DriveTone& hi = pumps[0].omega < pumps[1].omega ? pumps[1] : pumps[0];
  comb.omega_base = lo.omega;
  comb.delta = hi.omega - lo.omega;
  for (int n = -n_max_order; n <= n_max_order + 1; ++n) {
    const double f = comb.omega_base + n * comb.delta;
    if (f <= 0.0) continue;
    comb.index.push_back(n);
    comb.freq.push_back(f);
    comb.drive.push_back(n == 0 ? lo.amplitude() : n == 1 ? hi.amplitude() : 0.0);
  }
  return comb;
}

PumpComb scale_drive(const PumpComb& comb, double factor) {
  PumpComb out = comb;
  for (auto& b : out.drive) b *= factor;
  return out;
}

}  // namespace respa
