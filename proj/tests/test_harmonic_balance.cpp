#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "respa/continuation.hpp"
#include "respa/harmonic_balance.hpp"
#include "respa/time_domain.hpp"

using namespace respa;
using namespace std::complex_literals;

namespace {

struct Device {
  ModeSet modes;
  KerrMatrix kerr;
  ModalSystem sys;
};

Device device(const std::vector<int>& harmonics, double q_internal = 2e4) {
  ResonatorGeometry g = fixtures::reference_geometry();
  g.q_internal = q_internal;
  Device d;
  d.modes = find_modes(g, 4).select(harmonics);
  d.kerr = reduce_kerr(g, d.modes);
  d.sys = make_modal_system(d.modes, d.kerr);
  return d;
}

DriveTone tone(double ghz, double dbm) { return {ghz_to_rad(ghz), dbm_to_watts(dbm), 0.0}; }

// Reference two-pump operating point around the third harmonic.
std::vector<DriveTone> reference_pumps(double dbm) { return {tone(6.47041, dbm), tone(6.48741, dbm)}; }

// Residual in physical units evaluated in the time domain: the cubic term is
// formed from samples of sum_n A_n e^{i n delta t} and projected back onto
// each comb line, independent of any mixing table.
Eigen::MatrixXcd time_domain_residual(const ModeSet& modes, const KerrMatrix& kerr, const PumpComb& comb,
                                      const Eigen::MatrixXcd& amp) {
  const auto nm = static_cast<Eigen::Index>(modes.size());
  const auto nl = static_cast<Eigen::Index>(comb.size());
  const int samples = 64 * std::max(1, static_cast<int>(comb.size()));
  std::vector<Eigen::VectorXcd> a(samples, Eigen::VectorXcd::Zero(nm));
  for (int s = 0; s < samples; ++s) {
    const double phase = 2.0 * std::numbers::pi * s / samples;
    for (Eigen::Index n = 0; n < nl; ++n)
      a[s] += amp.col(n) * std::exp(1i * (comb.index[n] * phase));
  }
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(nm, nl);
  for (int s = 0; s < samples; ++s) {
    const double phase = 2.0 * std::numbers::pi * s / samples;
    for (Eigen::Index m = 0; m < nm; ++m) {
      std::complex<double> cubic = 0.0;
      for (Eigen::Index rr = 0; rr < nm; ++rr)
        for (Eigen::Index p = 0; p < nm; ++p)
          for (Eigen::Index q = 0; q < nm; ++q)
            cubic += kerr.coupling(m, rr, p, q) * std::conj(a[s](rr)) * a[s](p) * a[s](q);
      for (Eigen::Index n = 0; n < nl; ++n) r(m, n) += cubic * std::exp(-1i * (comb.index[n] * phase)) / double(samples);
    }
  }
  for (Eigen::Index m = 0; m < nm; ++m)
    for (Eigen::Index n = 0; n < nl; ++n) {
      const Mode& md = modes[m];
      r(m, n) = 1i * r(m, n) + (1i * (md.omega0 - comb.freq[n]) - 0.5 * md.kappa()) * amp(m, n) +
                std::sqrt(md.kappa_c) * comb.drive[n];
    }
  return r;
}

// Single-mode Kerr steady state: n [(d + K n)^2 + k^2/4] = kc P with n = |A|^2.
struct Folds {
  double p_low = 0.0;
  double p_high = 0.0;
};
Folds analytic_folds(const Mode& m, double k_self, double omega_p) {
  const double d = m.omega0 - omega_p, k = m.kappa(), K = k_self;
  const double disc = 16.0 * K * K * d * d - 12.0 * K * K * (d * d + 0.25 * k * k);
  REQUIRE(disc > 0.0);
  auto power = [&](double n) { return n * ((d + K * n) * (d + K * n) + 0.25 * k * k) / m.kappa_c; };
  const double n1 = (-4.0 * K * d - std::sqrt(disc)) / (6.0 * K * K);
  const double n2 = (-4.0 * K * d + std::sqrt(disc)) / (6.0 * K * K);
  const double a = power(n1), b = power(n2);
  return {std::min(a, b), std::max(a, b)};
}

}  // namespace

TEST_CASE("comb construction") {
  SUBCASE("two pumps, order two") {
    const PumpComb c = build_comb({tone(6.4585, -60), tone(6.4720, -60)}, 2);
    REQUIRE(c.size() == 6);
    CHECK(c.index == std::vector<int>{-2, -1, 0, 1, 2, 3});
    const std::vector<double> ghz{6.4315, 6.4450, 6.4585, 6.4720, 6.4855, 6.4990};
    for (std::size_t i = 0; i < 6; ++i) CHECK(rad_to_ghz(c.freq[i]) == doctest::Approx(ghz[i]).epsilon(1e-12));
    CHECK(std::abs(c.drive[2]) == doctest::Approx(std::sqrt(dbm_to_watts(-60))));
    CHECK(std::abs(c.drive[0]) == 0.0);
    CHECK(rad_to_ghz(c.pump_sum()) == doctest::Approx(6.4585 + 6.4720).epsilon(1e-14));
  }
  SUBCASE("pump order does not matter") {
    const PumpComb a = build_comb({tone(6.4585, -60), tone(6.4720, -61)}, 2);
    const PumpComb b = build_comb({tone(6.4720, -61), tone(6.4585, -60)}, 2);
    CHECK(a.freq == b.freq);
    CHECK(a.drive == b.drive);
  }
  SUBCASE("single pump is one line") {
    const PumpComb c = build_comb({tone(6.48, -60)}, 3);
    REQUIRE(c.size() == 1);
    CHECK(c.degenerate());
    CHECK(c.pump_sum() == doctest::Approx(2.0 * ghz_to_rad(6.48)));
  }
  SUBCASE("cross-harmonic pumps space the comb by their difference") {
    const PumpComb c = build_comb({tone(4.3218, -50), tone(8.6224, -49)}, 1);
    CHECK(rad_to_ghz(c.delta) == doctest::Approx(4.3006).epsilon(1e-12));
    // 2 f1 - f2 is 21.2 MHz and kept; the next line down is negative and dropped.
    CHECK(c.index.front() == -1);
    CHECK(rad_to_ghz(c.freq.front()) == doctest::Approx(0.0212).epsilon(1e-9));
  }
  SUBCASE("close pumps merge") {
    const PumpComb c = build_comb({tone(6.48, -60), {ghz_to_rad(6.48) + 1e-3, dbm_to_watts(-60), 0.0}}, 3, 1.0);
    REQUIRE(c.size() == 1);
    CHECK(std::norm(c.drive[0]) == doctest::Approx(2.0 * dbm_to_watts(-60)));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(build_comb({}, 2), Error);
    CHECK_THROWS_AS(build_comb({tone(6.4, -60), tone(6.5, -60), tone(6.6, -60)}, 2), Error);
    CHECK_THROWS_AS(build_comb({tone(6.4, -60)}, -1), Error);
    CHECK_THROWS_AS(build_comb({{-1.0, 1e-9, 0.0}}, 1), Error);
  }
}

TEST_CASE("residual matches a time-domain evaluation of the cubic term") {
  const Device d = device({2, 3, 4});
  const PumpComb comb = build_comb(reference_pumps(-58.0), 2);
  const MixingTable table = make_mixing_table(comb);
  std::mt19937 rng(7);
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd a(d.sys.size(), comb.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = {normal(rng), normal(rng)};
  const Eigen::MatrixXcd scaled = hb_residual(d.sys, comb, table, a);
  const Eigen::MatrixXcd physical = time_domain_residual(d.modes, d.kerr, comb, a * d.sys.amplitude_scale());
  const Eigen::MatrixXcd expected = physical / (d.sys.rate * d.sys.amplitude_scale());
  CHECK((scaled - expected).norm() <= 1e-10 * expected.norm());
}

TEST_CASE("Jacobian matches finite differences of the residual") {
  const Device d = device({3, 4});
  const PumpComb comb = build_comb(reference_pumps(-58.0), 1);
  const MixingTable table = make_mixing_table(comb);
  std::mt19937 rng(3);
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd a(d.sys.size(), comb.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = {normal(rng), normal(rng)};
  const Eigen::MatrixXd j = hb_jacobian(d.sys, comb, table, a);
  const Eigen::VectorXd x = pack_real(a);
  const double h = 1e-6;
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Eigen::VectorXd xp = x, xm = x;
    xp(c) += h;
    xm(c) -= h;
    const Eigen::VectorXd fd = (pack_real(hb_residual(d.sys, comb, table, unpack_real(xp, a.rows(), a.cols()))) -
                                pack_real(hb_residual(d.sys, comb, table, unpack_real(xm, a.rows(), a.cols())))) /
                               (2.0 * h);
    CAPTURE(c);
    REQUIRE((j.col(c) - fd).norm() <= 1e-6 * (1.0 + fd.norm()));
  }
}

TEST_CASE("zero pump power leaves the resonator empty") {
  const Device d = device({3});
  const PumpCombSolution s = solve_pump_steady_state(d.sys, build_comb({{ghz_to_rad(6.48), 0.0, 0.0}}, 2));
  CHECK(s.converged);
  CHECK(s.amplitudes.norm() == 0.0);
}

TEST_CASE("weak pump follows the linear Lorentzian") {
  const Device d = device({3});
  const Mode& m = d.modes[0];
  for (double x : {-3.0, -1.0, -0.25, 0.0, 0.5, 2.0}) {
    CAPTURE(x);
    const double omega = m.omega0 + x * m.kappa();
    const double power = dbm_to_watts(-100.0);
    const PumpCombSolution s = solve_pump_steady_state(d.sys, build_comb({{omega, power, 0.0}}, 0));
    REQUIRE(s.converged);
    const double energy = std::norm(s.amplitudes(0, 0));
    const double lorentzian =
        m.kappa_c * power / (0.25 * m.kappa() * m.kappa() + (m.omega0 - omega) * (m.omega0 - omega));
    CHECK(energy == doctest::Approx(lorentzian).epsilon(0.01));
  }
}

TEST_CASE("lossless resonator conserves pump power") {
  // Exact for one mode. With several modes the reflection is a sum of
  // Lorentzians and the off-resonant tails of the distant modes break
  // unitarity at the level of kappa_c / (mode spacing).
  for (const auto& [harmonics, tol] : {std::pair{std::vector<int>{3}, 1e-9}, {std::vector<int>{2, 3, 4}, 5e-3}}) {
    const Device d = device(harmonics, std::numeric_limits<double>::infinity());
    const PumpCombSolution s = solve_pump_steady_state(d.sys, build_comb(reference_pumps(-60.0), 3));
    REQUIRE(s.converged);
    double in = 0.0, out = 0.0;
    for (const auto& b : s.comb.drive) in += std::norm(b);
    for (const SpectrumLine& l : comb_output_spectrum(s, d.modes)) out += l.power;
    CAPTURE(harmonics.size());
    CHECK(std::abs(out - in) <= tol * in);
  }
}

TEST_CASE("pumping pulls the resonance down") {
  // Effective resonance read off the solution: A (i (w_eff - f) - k/2) = -sqrt(kc) B.
  const Device d = device({3});
  const Mode& m = d.modes[0];
  for (double x : {-4.0, -1.0, 0.0, 1.0})
    for (double dbm : {-80.0, -65.0, -60.0}) {
      const double f = m.omega0 + x * m.kappa();
      const PumpCombSolution s = solve_pump_steady_state(d.sys, build_comb({{f, dbm_to_watts(dbm), 0.0}}, 0));
      if (!s.converged) continue;
      const auto ratio = -std::sqrt(m.kappa_c) * s.comb.drive[0] / s.amplitudes(0, 0);
      const double w_eff = f + ratio.imag();
      CAPTURE(x);
      CAPTURE(dbm);
      CHECK(w_eff <= m.omega0);
      CHECK(std::abs(w_eff - m.omega0 - d.kerr.k(0, 0) * std::norm(s.amplitudes(0, 0))) < 1e-6 * m.kappa());
    }
}

TEST_CASE("coincident pumps reduce to a single pump of the summed power") {
  const Device d = device({3});
  const double f = ghz_to_rad(6.48391465);
  const PumpComb merged =
      build_comb({{f, dbm_to_watts(-63.0), 0.0}, {f + 1e-3, dbm_to_watts(-63.0), 0.0}}, 3, 1.0);
  const PumpComb single = build_comb({{f, 2.0 * dbm_to_watts(-63.0), 0.0}}, 3);
  const PumpCombSolution a = solve_pump_steady_state(d.sys, merged);
  const PumpCombSolution b = solve_pump_steady_state(d.sys, single);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(std::abs(a.amplitudes(0, 0) - b.amplitudes(0, 0)) <= 1e-9 * std::abs(b.amplitudes(0, 0)));
}

TEST_CASE("comb truncation converges") {
  const Device d = device({3});
  const PumpCombSolution lo = solve_pump_steady_state(d.sys, build_comb(reference_pumps(-58.0), 3));
  const PumpCombSolution hi = solve_pump_steady_state(d.sys, build_comb(reference_pumps(-58.0), 5));
  REQUIRE(lo.converged);
  REQUIRE(hi.converged);
  for (int n : {0, 1}) {
    const auto a = lo.amplitudes(0, lo.comb.position_of(n));
    const auto b = hi.amplitudes(0, hi.comb.position_of(n));
    CAPTURE(n);
    CHECK(std::abs(a - b) <= 1e-4 * std::abs(b));
  }
}

TEST_CASE("fold points of a single driven mode") {
  const Device d = device({3});
  const Mode& m = d.modes[0];
  const double omega = m.omega0 - 3.0 * m.kappa();
  const Folds expected = analytic_folds(m, d.kerr.k(0, 0), omega);
  const double reference_power = 2.0 * expected.p_high;
  const PumpComb comb = build_comb({{omega, reference_power, 0.0}}, 0);

  SUBCASE("arclength continuation locates both folds") {
    const PowerBranch branch = trace_power_branch(d.sys, comb, 1.0);
    REQUIRE(branch.folds.size() == 2);
    std::vector<double> p;
    for (const BranchPoint& f : branch.folds) p.push_back(f.power_fraction * reference_power);
    std::sort(p.begin(), p.end());
    CHECK(p[0] == doctest::Approx(expected.p_low).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(expected.p_high).epsilon(1e-6));
  }
  SUBCASE("plain continuation reports the bifurcation") {
    const PumpCombSolution s = solve_pump_steady_state(d.sys, comb);
    CHECK((!s.converged || s.bifurcated));
    CHECK(!s.diagnostic.empty());
  }
  SUBCASE("time-domain ramps jump near the folds") {
    TimeDomainSettings ts;
    ts.transient = 20.0;
    const double ramp_time = 4000.0 / m.kappa();
    const HysteresisSweep h = hysteresis_sweep(d.modes, d.kerr, {omega, 1.0, 0.0}, 0.25 * expected.p_low,
                                               1.5 * expected.p_high, ramp_time, 0, ts);
    CHECK(h.bistable);
    CHECK(h.jump_up == doctest::Approx(expected.p_high).epsilon(0.05));
    CHECK(h.jump_down == doctest::Approx(expected.p_low).epsilon(0.05));
  }
}
