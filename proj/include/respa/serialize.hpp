#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "respa/harmonic_balance.hpp"
#include "respa/kerr.hpp"
#include "respa/resonator.hpp"
#include "respa/scattering.hpp"

namespace respa {

using json = nlohmann::ordered_json;

inline constexpr const char* version_stamp = "respa 1.0.0";

json to_json(const ResonatorGeometry& g);
json to_json(const ModeSet& modes);
json to_json(const KerrMatrix& k);
/// Complex numbers as {"re": x, "im": y}.
json to_json(std::complex<double> z);
json to_json(const PumpCombSolution& s);

/// Columns freq_ghz, gain_db, g_s_re, g_s_im, g_i_re, g_i_im, degenerate, singular.
void write_gain_csv(const GainProfile& profile, std::ostream& os);
/// Columns theta_rad, gain_db.
void write_phase_csv(const PhaseSweepResult& sweep, std::ostream& os);

/// Shortest representation that parses back to the same double.
std::string format_double(double x);

/// Deterministic JSON text (fixed key order, round-trip doubles).
std::string dump(const json& j);

}  // namespace respa
