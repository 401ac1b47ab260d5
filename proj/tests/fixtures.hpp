#pragma once

#include <string>

#include "respa/config.hpp"
#include "respa/resonator.hpp"

namespace fixtures {

// Geometry shared by the scenario files: harmonics near 2.16, 4.33, 6.49 and 8.65 GHz.
inline respa::ResonatorGeometry reference_geometry() {
  respa::ResonatorGeometry g;
  g.length = 9.445e-3;
  g.l_per_len = 3.6e-6;
  g.c_per_len = 1.6e-10;
  g.c_couple_in = 15e-15;
  g.c_couple_out = 15e-15;
  g.q_internal = 2e4;
  g.z_env = 50.0;
  g.i_star = 1.5e-3;
  return g;
}

inline std::string scenario(const std::string& name) {
  return std::string(RESPA_SCENARIO_DIR) + "/" + name + ".ini";
}

}  // namespace fixtures
