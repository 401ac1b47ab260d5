#include "respa/resonator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

namespace respa {

namespace {

using cplx = std::complex<double>;
constexpr cplx I(0.0, 1.0);

cplx propagation_length(const ResonatorGeometry& g, cplx omega, bool lossy) {
  cplx beta = omega / g.phase_velocity();
  if (lossy) beta *= cplx(1.0, -0.5 / g.q_internal);
  return beta * g.length;
}

}  // namespace

double ResonatorGeometry::phase_velocity() const { return 1.0 / std::sqrt(l_per_len * c_per_len); }

double ResonatorGeometry::line_impedance() const { return std::sqrt(l_per_len / c_per_len); }

double ResonatorGeometry::bare_omega(int n) const {
  return n * std::numbers::pi * phase_velocity() / length;
}

void ResonatorGeometry::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || std::isnan(v))
      throw Error("geometry", std::string(name) + " must be strictly positive");
  };
  positive(length, "length");
  positive(l_per_len, "l_per_len");
  positive(c_per_len, "c_per_len");
  positive(z_env, "z_env");
  positive(i_star, "i_star");
  if (!(c_couple_in >= 0.0) || !(c_couple_out >= 0.0))
    throw Error("geometry", "coupling capacitances must be non-negative");
  if (!(q_internal >= 1.0)) throw Error("geometry", "q_internal must be >= 1");
  const double v = phase_velocity();
  if (!std::isfinite(v) || v <= 0.0) throw Error("geometry", "phase velocity not finite");
}

std::string sinusoidal_profile_id(int n) { return "sin(" + std::to_string(n) + "*pi*x/length)"; }

ModeSet ModeSet::select(const std::vector<int>& harmonics) const {
  ModeSet out;
  out.geometry = geometry;
  std::vector<int> sorted = harmonics;
  std::sort(sorted.begin(), sorted.end());
  for (int h : sorted) {
    const int pos = position_of(h);
    if (pos < 0) throw Error("modes", "harmonic " + std::to_string(h) + " not in mode set");
    out.modes.push_back(modes[static_cast<std::size_t>(pos)]);
  }
  return out;
}

int ModeSet::position_of(int harmonic) const {
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i].index == harmonic) return static_cast<int>(i);
  return -1;
}

Abcd<cplx> coupled_line_abcd(const ResonatorGeometry& geom, cplx omega, bool lossy,
                             bool include_out) {
  const cplx y_in = I * omega * geom.c_couple_in;
  const cplx y_out = I * omega * geom.c_couple_out;
  const cplx z0(geom.line_impedance(), 0.0);
  Abcd<cplx> m = scaled_series_admittance(y_in) *
                 transmission_line(propagation_length(geom, omega, lossy), z0);
  if (include_out) m = m * scaled_series_admittance(y_out);
  return m;
}

cplx network_pole_function(const ResonatorGeometry& geom, cplx omega, bool lossy,
                           bool include_out) {
  const auto m = coupled_line_abcd(geom, omega, lossy, include_out);
  const double z = geom.z_env;
  if (!include_out) return m(0, 0) + z * m(1, 0);
  return m(0, 0) * z + m(0, 1) + m(1, 0) * z * z + m(1, 1) * z;
}

cplx network_s21(const ResonatorGeometry& geom, double omega, bool lossy) {
  const auto m = coupled_line_abcd(geom, cplx(omega, 0.0), lossy);
  const double z = geom.z_env;
  const cplx scale = (I * omega * geom.c_couple_in) * (I * omega * geom.c_couple_out);
  return 2.0 * scale / (m(0, 0) + m(0, 1) / z + m(1, 0) * z + m(1, 1));
}

double resonance_condition(const ResonatorGeometry& geom, double omega) {
  const double theta = omega / geom.phase_velocity() * geom.length;
  const double z0 = geom.line_impedance();
  const double ci = geom.c_couple_in;
  const double co = geom.c_couple_out;
  return std::sin(theta) * (1.0 / z0 - z0 * omega * omega * ci * co) +
         omega * (ci + co) * std::cos(theta);
}

cplx natural_frequency(const ResonatorGeometry& geom, double guess, bool lossy, bool include_out) {
  cplx w(guess, 0.0);
  // A tiny positive imaginary seed keeps the iteration off the real axis
  // where the lossless function can be purely imaginary.
  w += cplx(0.0, guess * 1e-9);
  for (int it = 0; it < 200; ++it) {
    const double h = 1e-7 * std::abs(w);
    const cplx f = network_pole_function(geom, w, lossy, include_out);
    const cplx df = (network_pole_function(geom, w + h, lossy, include_out) -
                     network_pole_function(geom, w - h, lossy, include_out)) /
                    (2.0 * h);
    if (df == cplx(0.0)) break;
    const cplx step = f / df;
    w -= step;
    if (std::abs(step) < 1e-15 * std::abs(w)) break;
  }
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || std::abs(w.real() - guess) > 0.5 * guess)
    throw Error("pole", "natural frequency search diverged near " + std::to_string(guess));
  return w;
}

ModeSet find_modes(const ResonatorGeometry& geom, int n_max) {
  geom.validate();
  if (n_max < 1) throw Error("modes", "n_max must be >= 1");
  ModeSet set;
  set.geometry = geom;
  const double fsr = geom.bare_omega(1);
  const bool uncoupled = geom.c_couple_in == 0.0 && geom.c_couple_out == 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double centre = geom.bare_omega(n);
    double lo = centre - 0.25 * fsr;
    double hi = centre + 0.25 * fsr;
    auto f = [&](double w) { return resonance_condition(geom, w); };
    double flo = f(lo);
    double fhi = f(hi);
    if (flo * fhi > 0.0) {
      std::ostringstream msg;
      msg << "no resonance root bracketed for harmonic " << n;
      throw Error("bracket", msg.str());
    }
    std::uintmax_t max_iter = 200;
    const auto root = boost::math::tools::toms748_solve(
        f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), max_iter);
    double omega0 = 0.5 * (root.first + root.second);
    if (max_iter >= 200 || std::abs(root.second - root.first) > 1e-10 * omega0) {
      throw Error("bracket", "resonance root did not converge for harmonic " + std::to_string(n));
    }

    Mode mode;
    mode.index = n;
    mode.current_profile_id = sinusoidal_profile_id(n);
    if (uncoupled) {
      mode.omega0 = omega0;
      mode.kappa_c = 0.0;
    } else {
      const cplx pole = natural_frequency(geom, omega0, false);
      mode.omega0 = pole.real();
      mode.kappa_c = 2.0 * std::abs(pole.imag());
    }
    mode.kappa_i = mode.omega0 / geom.q_internal;
    if (mode.kappa() / mode.omega0 >= 0.1) {
      throw Error("modes", "harmonic " + std::to_string(n) + " linewidth too large (kappa/omega0 >= 0.1)");
    }
    if (!set.modes.empty()) {
      const Mode& prev = set.modes.back();
      if (mode.omega0 - prev.omega0 < std::max(mode.kappa(), prev.kappa())) {
        throw Error("modes", "harmonics " + std::to_string(prev.index) + " and " +
                                 std::to_string(n) + " overlap within one linewidth");
      }
    }
    set.modes.push_back(mode);
  }
  return set;
}

std::complex<double> linear_response(const ModeSet& modes, double omega) {
  if (!(omega > 0.0)) throw Error("domain", "linear_response requires omega > 0");
  cplx s(1.0, 0.0);
  for (const Mode& m : modes.modes) s -= m.kappa_c / (0.5 * m.kappa() + I * (omega - m.omega0));
  return s;
}

cplx transmission_coupling(const ResonatorGeometry& geom, const Mode& mode) {
  const cplx pole = natural_frequency(geom, mode.omega0, true);
  const double z = geom.z_env;
  const double h = 1e-7 * std::abs(pole);
  const cplx slope = (network_pole_function(geom, pole + h, true) - network_pole_function(geom, pole - h, true)) / (2.0 * h);
  const cplx scale = (I * pole * geom.c_couple_in) * (I * pole * geom.c_couple_out);
  // S21 ~ residue / (omega - pole) and omega - pole = -i (kappa/2 + i (omega - omega0)).
  return I * 2.0 * scale * z / slope;
}

std::complex<double> modal_s21(const ResonatorGeometry& geom, const ModeSet& modes, double omega) {
  cplx t(0.0, 0.0);
  for (const Mode& m : modes.modes)
    t += transmission_coupling(geom, m) / (0.5 * m.kappa() + I * (omega - m.omega0));
  return t;
}

}  // namespace respa
