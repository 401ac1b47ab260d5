#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "respa/resonator.hpp"
#include "respa/units.hpp"

using namespace respa;
using namespace std::complex_literals;

namespace {

// Dense |S21|^2 scan: peak position and half-power width by linear interpolation.
struct ScanResult {
  double peak = 0.0;
  double width = 0.0;
};

ScanResult scan_s21(const ResonatorGeometry& g, double center, double span, int points) {
  std::vector<double> w(points), p(points);
  int best = 0;
  for (int i = 0; i < points; ++i) {
    w[i] = center - span + 2.0 * span * i / (points - 1);
    p[i] = std::norm(network_s21(g, w[i], true));
    if (p[i] > p[best]) best = i;
  }
  // Parabola through the three highest samples.
  const double y0 = p[best - 1], y1 = p[best], y2 = p[best + 1];
  const double h = w[1] - w[0];
  const double peak = w[best] + 0.5 * h * (y0 - y2) / (y0 - 2.0 * y1 + y2);
  const double half = 0.5 * y1;
  auto crossing = [&](int dir) {
    int i = best;
    while (p[i + dir] > half) i += dir;
    const double t = (p[i] - half) / (p[i] - p[i + dir]);
    return w[i] + dir * t * h;
  };
  return {peak, crossing(1) - crossing(-1)};
}

ModeSet single_mode(double omega0, double kappa_c, double kappa_i) {
  ModeSet s;
  Mode m;
  m.omega0 = omega0;
  m.kappa_c = kappa_c;
  m.kappa_i = kappa_i;
  s.modes.push_back(m);
  return s;
}

}  // namespace

TEST_CASE("uncoupled line has the half-wave ladder") {
  ResonatorGeometry g = fixtures::reference_geometry();
  g.c_couple_in = g.c_couple_out = 0.0;
  // v / (2 length) = 2.15 GHz
  g.length = g.phase_velocity() / (2.0 * 2.15e9);
  const ModeSet modes = find_modes(g, 3);
  REQUIRE(modes.size() == 3);
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK(rad_to_ghz(modes[n].omega0) == doctest::Approx(2.15 * (n + 1)).epsilon(1e-12));
    CHECK(std::abs(modes[n].omega0 - (n + 1) * modes[0].omega0) / modes[0].omega0 < 1e-9);
    CHECK(modes[n].kappa_c == doctest::Approx(0.0));
  }
}

TEST_CASE("coupling capacitors pull every harmonic down") {
  const ResonatorGeometry g = fixtures::reference_geometry();
  const ModeSet modes = find_modes(g, 4);
  for (const Mode& m : modes.modes) {
    CHECK(m.omega0 < g.bare_omega(m.index));
    CHECK(m.kappa_c > 0.0);
    CHECK(m.kappa_i == doctest::Approx(m.omega0 / g.q_internal).epsilon(1e-14));
    CHECK(m.current_profile_id == sinusoidal_profile_id(m.index));
  }
  for (std::size_t n = 1; n < modes.size(); ++n) CHECK(modes[n].omega0 > modes[n - 1].omega0);
}

TEST_CASE("mode parameters match a brute-force scan of the network") {
  const ResonatorGeometry g = fixtures::reference_geometry();
  const ModeSet modes = find_modes(g, 4);
  for (const Mode& m : modes.modes) {
    CAPTURE(m.index);
    const ScanResult s = scan_s21(g, m.omega0, 5.0 * m.kappa(), 20001);
    CHECK(std::abs(s.peak - m.omega0) < m.kappa() / 100.0);
    CHECK(s.width == doctest::Approx(m.kappa()).epsilon(0.01));
  }
}

TEST_CASE("modal two-port response tracks the network within ten linewidths") {
  const ResonatorGeometry g = fixtures::reference_geometry();
  const ModeSet modes = find_modes(g, 4);
  for (const Mode& m : modes.modes) {
    double worst = 0.0;
    for (int i = -200; i <= 200; ++i) {
      const double w = m.omega0 + 0.05 * i * m.kappa();
      worst = std::max(worst, std::abs(modal_s21(g, modes, w) - network_s21(g, w, true)));
    }
    CAPTURE(m.index);
    // Residual is the non-resonant background, of order kappa / omega0.
    CHECK(worst < 5e-3 * std::abs(network_s21(g, m.omega0, true)));
  }
}

TEST_CASE("reflection from mode parameters") {
  SUBCASE("far from resonance") {
    const ModeSet modes = find_modes(fixtures::reference_geometry(), 4);
    const Mode& m = modes[2];
    CHECK(std::abs(linear_response(modes, m.omega0 + 150.0 * m.kappa())) > 0.999);
  }
  SUBCASE("lossless mode reflects with a pi phase on resonance") {
    const ModeSet s = single_mode(2e10, 3e7, 0.0);
    const auto r = linear_response(s, 2e10);
    CHECK(r.real() == -1.0);
    CHECK(r.imag() == 0.0);
  }
  SUBCASE("critical coupling nulls the reflection") {
    const ModeSet s = single_mode(2e10, 3e7, 3e7);
    CHECK(std::abs(linear_response(s, 2e10)) < 1e-12);
  }
  SUBCASE("each mode is passive on a dense grid") {
    const ModeSet modes = find_modes(fixtures::reference_geometry(), 4);
    for (const Mode& m : modes.modes) {
      const ModeSet one = modes.select({m.index});
      double worst = 0.0;
      for (int i = 1; i <= 50000; ++i) worst = std::max(worst, std::abs(linear_response(one, ghz_to_rad(9.5) * i / 50000.0)));
      CAPTURE(m.index);
      CHECK(worst <= 1.0 + 1e-12);
    }
  }
  SUBCASE("full mode set exceeds unity by at most the off-resonant tails") {
    const ModeSet modes = find_modes(fixtures::reference_geometry(), 4);
    for (int i = 1; i <= 50000; ++i) {
      const double w = ghz_to_rad(9.5) * i / 50000.0;
      std::size_t nearest = 0;
      for (std::size_t k = 1; k < modes.size(); ++k)
        if (std::abs(w - modes[k].omega0) < std::abs(w - modes[nearest].omega0)) nearest = k;
      double tails = 0.0;
      for (std::size_t k = 0; k < modes.size(); ++k)
        if (k != nearest) tails += modes[k].kappa_c / std::abs(0.5 * modes[k].kappa() + 1i * (w - modes[k].omega0));
      CAPTURE(w);
      REQUIRE(std::abs(linear_response(modes, w)) <= 1.0 + tails + 1e-12);
    }
  }
  SUBCASE("rejects non-positive frequency") { CHECK_THROWS_AS(linear_response(single_mode(1e10, 1e6, 1e5), 0.0), Error); }
}

TEST_CASE("geometry validation") {
  ResonatorGeometry g = fixtures::reference_geometry();
  SUBCASE("q_internal below one") {
    g.q_internal = 0.5;
    CHECK_THROWS_AS(find_modes(g, 2), Error);
  }
  SUBCASE("non-positive length") {
    g.length = 0.0;
    CHECK_THROWS_AS(find_modes(g, 2), Error);
  }
  SUBCASE("linewidth too large for a mode description") {
    g.c_couple_in = g.c_couple_out = 2e-12;
    CHECK_THROWS_AS(find_modes(g, 2), Error);
  }
  SUBCASE("n_max below one") { CHECK_THROWS_AS(find_modes(g, 0), Error); }
}

TEST_CASE("harmonic selection") {
  const ModeSet all = find_modes(fixtures::reference_geometry(), 4);
  const ModeSet sub = all.select({4, 2});
  REQUIRE(sub.size() == 2);
  CHECK(sub[0].index == 2);
  CHECK(sub[1].index == 4);
  CHECK(sub.position_of(4) == 1);
  CHECK(sub.position_of(3) == -1);
  CHECK_THROWS_AS(all.select({5}), Error);
}
