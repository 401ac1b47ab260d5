#pragma once

#include <vector>

#include "respa/harmonic_balance.hpp"
#include "respa/modal_system.hpp"
#include "respa/resonator.hpp"

namespace respa {

/// A mixing product generated outside the pump comb by the full (non
/// rotating-wave) cubic nonlinearity.
struct Sideband {
  double omega = 0.0;   ///< rad/s
  double power = 0.0;   ///< W at the output port
  int cascade = 1;      ///< 1: products of comb lines, 2: products involving a first-cascade line
  std::size_t nearest_mode = 0;  ///< position in the ModeSet
};

struct SidebandReport {
  std::vector<Sideband> lines;  ///< sorted by frequency
  double strongest_pump = 0.0;  ///< W, strongest output comb line
};

/// Perturbative non-rotating-wave products of a converged comb.
///
/// The comb's real field x = sum(a + conj(a)) is cubed; the a a conj(a)
/// products are the rotating-wave terms already balanced by the solver
/// (weight G), a a a products carry G / 3 and a conj(a) conj(a) products
/// carry G. Each product drives every mode through its linear response. A
/// second cascade mixes the first-cascade lines with the comb. Lines within
/// `window` (rad/s) of a mode and above `floor` (W) are kept.
SidebandReport non_rwa_products(const ModalSystem& sys, const ModeSet& modes,
                                const PumpCombSolution& solution, double window, double floor = 0.0);

}  // namespace respa
