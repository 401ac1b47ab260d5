// Acceptance checks, one line per criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "respa/experiment.hpp"
#include "respa/tuning.hpp"
#include "respa/units.hpp"

using namespace respa;

namespace {

std::string scenario(const std::string& name) { return std::string(RESPA_SCENARIO_DIR) + "/" + name + ".ini"; }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %2d %s: %s (%s; %.2f s)\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str(), seconds);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GainProfile sweep(const Prepared& p, const ExperimentConfig& c, const PumpCombSolution& s) {
  return gain_profile(p.sys, p.modes, s, c.sweep.omega_grid(), c.solver.sideband_order);
}

Outcome unity_baseline() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig c = load_config(scenario("unpumped"));
  const Prepared p = prepare(c);
  const PumpCombSolution s = solve_operating_point(p, c, c.pumps);
  const GainProfile g = sweep(p, c, s);
  const double seconds = elapsed_since(t0);
  double worst = 0.0;
  for (const auto& pt : g.points) worst = std::max(worst, std::abs(pt.gain_db));
  return {g.points.size() == 2001 && worst <= 1e-9 && seconds < 5.0,
          fmt("%zu points, max |gain| %.2e dB, sweep %.2f s", g.points.size(), worst, seconds)};
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig c = load_config(scenario("oracle"));
  const OracleReport o = oracle_check(c);
  const double seconds = elapsed_since(t0);
  double peak = -1e9;
  for (const auto& pc : o.probes) peak = std::max(peak, pc.hb_db);
  const double comb_err = std::max(o.max_strong_rel_error, o.max_weak_rel_error);
  return {o.probes.size() == 11 && o.max_gain_error_db <= 0.1 && comb_err <= 1e-3 && o.settled && seconds < 600.0,
          fmt("%zu probes up to %.2f dB, max gain error %.2e dB, comb rel error %.2e over %zu lines", o.probes.size(),
              peak, o.max_gain_error_db, comb_err, o.comb.size())};
}

Outcome nondegenerate_structure() {
  const ExperimentConfig c = load_config(scenario("tune"));
  const TuneResult t = tune_operating_point(c, c.tune.target_db);
  const ExperimentConfig tuned = tuned_scenario(c, t);
  const ExperimentResult r = run_experiment(tuned);
  const json& s = r.summary;
  if (!s.value("converged", false) || !s.value("window_ok", false)) return {false, "tuned point has no full gain window"};
  double min_sep = std::numeric_limits<double>::infinity();
  for (const auto& x : s["pump_separation_bandwidths"]) min_sep = std::min(min_sep, x.get<double>());
  const double peak = s["peak_gain_db"].get<double>();
  return {t.reached && peak >= 20.0 && min_sep >= 10.0,
          fmt("peak %.2f dB, 3-dB bandwidth %.3f MHz, pumps %.1f bandwidths from the peak (closest)", peak,
              s["bandwidth_mhz"].get<double>(), min_sep)};
}

Outcome intermix_comb() {
  const ExperimentConfig c = load_config(scenario("pump_solve"));
  const Prepared p = prepare(c);
  const PumpCombSolution s = solve_operating_point(p, c, c.pumps);
  if (!s.converged) return {false, "pump solve did not converge"};
  const auto lines = comb_output_spectrum(s, p.modes);
  auto power_at = [&](int n) {
    for (const auto& l : lines)
      if (l.comb_index == n) return l.power;
    return 0.0;
  };
  // Pump 1 sits at index 0 and pump 2 at index 1.
  bool present = true;
  for (int n = -2; n <= 3; ++n) present &= power_at(n) > 0.0;
  const double pump = std::min(power_at(0), power_at(1));
  const Mode& m = p.modes[0];
  bool weaker = true;
  bool decreasing = true;
  int outside = 0;
  for (const auto& l : lines) {
    if (l.comb_index == 0 || l.comb_index == 1) continue;
    if (std::abs(l.omega - m.omega0) <= 0.5 * m.kappa()) continue;
    ++outside;
    weaker &= l.power < pump;
    const int inner = l.comb_index < 0 ? l.comb_index + 1 : l.comb_index - 1;
    if (inner != 0 && inner != 1) decreasing &= l.power < power_at(inner);
  }
  return {present && weaker && decreasing && outside > 0,
          fmt("lines n=-2..3 present: %s; %d lines outside the linewidth, all weaker than the pumps: %s, "
              "decreasing outward: %s; first products %.1f and %.1f dBc",
              present ? "yes" : "no", outside, weaker ? "yes" : "no", decreasing ? "yes" : "no",
              10.0 * std::log10(power_at(-1) / pump), 10.0 * std::log10(power_at(2) / pump))};
}

Outcome phase_sensitive_peak() {
  const ExperimentConfig c = load_config(scenario("phase_sweep"));
  const ExperimentResult r = run_experiment(c);
  const json& s = r.summary;
  const double plateau = s["plateau_db"].get<double>();
  const double excess = s["excess_over_plateau_db"].get<double>();
  const double period_rel = std::abs(s["period_rad"].get<double>() - std::numbers::pi) / std::numbers::pi;
  const double period_err = s["period_error"].get<double>();
  return {plateau >= 17.0 && std::abs(excess - 20.0 * std::log10(2.0)) <= 0.3 && period_rel <= 1e-6 &&
              period_err <= 1e-6,
          fmt("plateau %.2f dB, peak %.2f dB above it, period pi to %.1e (G(t+pi)-G(t) %.1e)", plateau, excess,
              period_rel, period_err)};
}

Outcome lossless_identities() {
  double worst_pair = 0.0, worst_sum = 0.0, worst_product = 0.0, worst_balance = 0.0;
  auto balance = [&](const Prepared& p, const PumpCombSolution& s) {
    double in = 0.0, out = 0.0;
    for (auto d : s.comb.drive) in += std::norm(d);
    for (const auto& l : comb_output_spectrum(s, p.modes)) out += l.power;
    worst_balance = std::max(worst_balance, std::abs(out - in) / in);
  };

  // Single pump: signal and idler form a closed pair.
  {
    ExperimentConfig c = load_config(scenario("oracle"));
    c.geometry.q_internal = std::numeric_limits<double>::infinity();
    c.pumps[0].power_dbm = -61.0;
    const Prepared p = prepare(c);
    const PumpCombSolution s = solve_operating_point(p, c, c.pumps);
    if (!s.converged) return {false, "lossless single-pump solve did not converge"};
    balance(p, s);
    const SidebandSolver solver(p.sys, s, c.solver.sideband_order);
    for (double off : {-3.0, -1.0, -0.25, 0.4, 1.5, 3.0}) {
      const SidebandResponse r = solver.respond(s.comb.omega_base + mhz_to_rad(off));
      worst_pair = std::max(worst_pair, std::abs(std::norm(r.g_s) - std::norm(r.g_i) - 1.0));
    }
    // Signal and idler coincide at the pump frequency.
    const SidebandResponse r = solver.respond(s.comb.omega_base);
    const QuadratureGains q = quadrature_decomposition(r.g_s, r.g_coincident);
    worst_product = std::abs(std::sqrt(q.amplified * q.squeezed) - 1.0);
  }
  // Two pumps: power reaches the outer sidebands, so the identity is summed over every line.
  {
    ExperimentConfig c = load_config(scenario("gain_sweep"));
    c.geometry.q_internal = std::numeric_limits<double>::infinity();
    const Prepared p = prepare(c);
    const PumpCombSolution s = solve_operating_point(p, c, c.pumps);
    if (!s.converged) return {false, "lossless two-pump solve did not converge"};
    balance(p, s);
    const SidebandSolver solver(p.sys, s, c.solver.sideband_order);
    for (double off : {-3.0, -1.0, -0.25, 0.4, 1.5, 3.0}) {
      const SidebandResponse r = solver.respond(0.5 * s.comb.pump_sum() + mhz_to_rad(off));
      double sum = 0.0;
      for (auto z : r.signal_out) sum += std::norm(z);
      for (auto z : r.idler_out) sum -= std::norm(z);
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
  }
  return {worst_pair <= 1e-6 && worst_sum <= 1e-6 && worst_product <= 1e-6 && worst_balance <= 1e-9,
          fmt("|gs|^2-|gi|^2-1 %.1e (single pump), summed over all sidebands %.1e (two pumps), "
              "Gmax*Gmin-1 %.1e, comb power balance %.1e",
              worst_pair, worst_sum, worst_product, worst_balance)};
}

Outcome gain_bandwidth_product() {
  const ExperimentConfig c = load_config(scenario("tune"));
  std::string detail;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool ok = true;
  for (double target : {10.0, 18.0, 26.0}) {
    const TuneResult t = tune_operating_point(c, target);
    ok &= t.reached;
    const ExperimentConfig tuned = tuned_scenario(c, t);
    const Prepared p = prepare(tuned);
    const PumpCombSolution s = solve_operating_point(p, tuned, tuned.pumps);
    const GainBandwidth gb = gain_bandwidth(sweep(p, tuned, s));
    const double product = rad_to_mhz(gb.product);
    lo = std::min(lo, product);
    hi = std::max(hi, product);
    detail += fmt("%.1f dB x %.3f MHz -> %.3f MHz; ", gb.peak_db, rad_to_mhz(gb.bandwidth), product);
  }
  detail += fmt("max/min %.3f", hi / lo);
  return {ok && hi / lo <= 1.2, detail};
}

Outcome failure_modes() {
  const json close = run_experiment(load_config(scenario("close_pumps"))).summary;
  const json miss = run_experiment(load_config(scenario("misaligned"))).summary;
  const double g_close = close["peak_gain_db"].get<double>();
  const int lines = close["intermix_lines_within_30db"].get<int>();
  const double g_miss = miss["peak_gain_db"].get<double>();
  return {g_close < 3.0 && lines >= 6 && g_miss < 1.0,
          fmt("close pumps: peak %.2f dB with %d intermix lines within 30 dB; misaligned midpoint: peak %.4f dB",
              g_close, lines, g_miss)};
}

Outcome sensitivity_ordering() {
  const SensitivityReport r = sensitivity(load_config(scenario("sensitivity")));
  bool converged = r.degenerate.d_freq.front().converged;
  for (const auto& d : r.point.d_freq) converged &= d.converged;
  return {r.has_degenerate && r.matched && r.degenerate_more_sensitive && converged,
          fmt("gains %.2f / %.2f dB; |dG/df| degenerate %.1f dB/MHz vs non-degenerate %.2f and %.2f dB/MHz",
              r.degenerate.peak_db, r.point.peak_db, std::abs(r.degenerate.d_freq.front().value),
              std::abs(r.point.d_freq[0].value), std::abs(r.point.d_freq[1].value))};
}

Outcome cross_harmonic_check() {
  const ExperimentConfig c = load_config(scenario("cross_harmonic"));
  const CrossHarmonicResult x = cross_harmonic(c);
  if (!x.solution.converged) return {false, "pump solve did not converge"};
  const double step = c.sweep.step();
  bool spacing = !x.measured_spacing.empty();
  for (double s : x.measured_spacing) spacing &= std::abs(s - x.expected_spacing) <= step;
  return {x.gain.peak_db >= 10.0 && spacing && x.min_suppression_db >= 50.0,
          fmt("mid-band peak %.2f dB, sideband spacing %.4f MHz vs expected %.4f MHz, sidebands %.1f dB below the pumps",
              x.gain.peak_db, rad_to_mhz(x.measured_spacing.front()), rad_to_mhz(x.expected_spacing),
              x.min_suppression_db)};
}

Outcome determinism() {
  int scenarios = 0;
  std::string mismatch;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(RESPA_SCENARIO_DIR))
    if (e.path().extension() == ".ini") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const ExperimentConfig c = load_config(f.string());
    ExperimentResult a = run_experiment(c);
    ExperimentResult b = run_experiment(c);
    a.summary.erase("version");
    b.summary.erase("version");
    bool same = dump(a.summary) == dump(b.summary) && a.files.size() == b.files.size();
    for (std::size_t i = 0; same && i < a.files.size(); ++i)
      same = a.files[i].name == b.files[i].name && a.files[i].content == b.files[i].content;
    if (!same) mismatch += " " + f.filename().string();
    ++scenarios;
  }
  return {mismatch.empty() && scenarios > 0,
          mismatch.empty() ? fmt("%d scenarios re-run byte-identical", scenarios) : "differs:" + mismatch};
}

}  // namespace

int main() {
  report(1, "unity-gain baseline", unity_baseline);
  report(2, "oracle equivalence", oracle_equivalence);
  report(3, "non-degenerate structure", nondegenerate_structure);
  report(4, "intermix comb", intermix_comb);
  report(5, "phase-sensitive peak", phase_sensitive_peak);
  report(6, "lossless identities", lossless_identities);
  report(7, "gain-bandwidth product", gain_bandwidth_product);
  report(8, "failure modes", failure_modes);
  report(9, "sensitivity ordering", sensitivity_ordering);
  report(10, "cross-harmonic pumping", cross_harmonic_check);
  report(11, "determinism", determinism);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
