#include "respa/serialize.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace respa {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json to_json(std::complex<double> z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json to_json(const ResonatorGeometry& g) {
  json j;
  j["length"] = g.length;
  j["l_per_len"] = g.l_per_len;
  j["c_per_len"] = g.c_per_len;
  j["c_couple_in"] = g.c_couple_in;
  j["c_couple_out"] = g.c_couple_out;
  j["q_internal"] = g.q_internal;
  j["z_env"] = g.z_env;
  j["i_star"] = std::isfinite(g.i_star) ? json(g.i_star) : json("inf");
  return j;
}

json to_json(const ModeSet& modes) {
  json arr = json::array();
  for (const Mode& m : modes.modes)
    arr.push_back({{"index", m.index},
                   {"omega0", m.omega0},
                   {"kappa_c", m.kappa_c},
                   {"kappa_i", m.kappa_i},
                   {"current_profile_id", m.current_profile_id}});
  return json{{"modes", arr}, {"geometry", to_json(modes.geometry)}};
}

json to_json(const KerrMatrix& k) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < k.k.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < k.k.cols(); ++c) row.push_back(k.k(r, c));
    rows.push_back(row);
  }
  return json{{"k", rows},
              {"units", "rad/(s J)"},
              {"harmonics", k.harmonic},
              {"scale", k.scale},
              {"reference_omega", k.reference_omega},
              {"normalization", KerrMatrix::normalization}};
}

json to_json(const PumpCombSolution& s) {
  json lines = json::array();
  for (std::size_t n = 0; n < s.comb.size(); ++n) {
    json amps = json::array();
    for (Eigen::Index m = 0; m < s.amplitudes.rows(); ++m)
      amps.push_back(to_json(s.amplitudes(m, static_cast<Eigen::Index>(n))));
    lines.push_back({{"index", s.comb.index[n]},
                     {"omega", s.comb.freq[n]},
                     {"drive", to_json(s.comb.drive[n])},
                     {"amplitudes", amps}});
  }
  return json{{"omega_base", s.comb.omega_base},
              {"delta", s.comb.delta},
              {"order", s.comb.order},
              {"lines", lines},
              {"residual_norm", s.residual_norm},
              {"jacobian_min_singular_value", s.jacobian_min_singular_value},
              {"zero_power_min_singular_value", s.zero_power_min_singular_value},
              {"converged", s.converged},
              {"bifurcated", s.bifurcated},
              {"newton_iterations", s.newton_iterations},
              {"diagnostic", s.diagnostic}};
}

void write_gain_csv(const GainProfile& profile, std::ostream& os) {
  os << "freq_ghz,gain_db,g_s_re,g_s_im,g_i_re,g_i_im,degenerate,singular\n";
  for (const GainPoint& p : profile.points)
    os << format_double(rad_to_ghz(p.omega_s)) << ',' << format_double(p.gain_db) << ','
       << format_double(p.g_s.real()) << ',' << format_double(p.g_s.imag()) << ','
       << format_double(p.g_i.real()) << ',' << format_double(p.g_i.imag()) << ',' << int(p.degenerate) << ','
       << int(p.singular) << '\n';
}

void write_phase_csv(const PhaseSweepResult& sweep, std::ostream& os) {
  os << "theta_rad,gain_db\n";
  for (std::size_t i = 0; i < sweep.theta.size(); ++i)
    os << format_double(sweep.theta[i]) << ',' << format_double(sweep.gain_db[i]) << '\n';
}

}  // namespace respa
