#include "respa/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "respa/time_domain.hpp"
#include "respa/tuning.hpp"
#include "respa/units.hpp"

namespace respa {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double to_db(double power_ratio) { return 10.0 * std::log10(power_ratio); }

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json pumps_json(const std::vector<PumpSetting>& pumps) {
  json arr = json::array();
  for (const auto& p : pumps)
    arr.push_back({{"freq_ghz", p.freq_ghz}, {"power_dbm", nullable(p.power_dbm)}, {"phase_deg", p.phase_deg}});
  return arr;
}

json base_summary(const ExperimentConfig& c) {
  return json{{"version", version_stamp}, {"kind", c.kind}, {"name", c.name}};
}

// Mode whose resonance is closest to `omega`.
const Mode& nearest_mode(const ModeSet& modes, double omega) {
  std::size_t best = 0;
  for (std::size_t m = 1; m < modes.size(); ++m)
    if (std::abs(modes[m].omega0 - omega) < std::abs(modes[best].omega0 - omega)) best = m;
  return modes[best];
}

std::string spectrum_csv(const std::vector<SpectrumLine>& lines) {
  std::ostringstream os;
  os << "freq_ghz,power_dbm,comb_index\n";
  for (const auto& l : lines)
    os << format_double(rad_to_ghz(l.omega)) << ',' << format_double(l.power > 0 ? watts_to_dbm(l.power) : -400.0)
       << ',' << l.comb_index << '\n';
  return os.str();
}

json spectrum_json(const std::vector<SpectrumLine>& lines) {
  json arr = json::array();
  for (const auto& l : lines)
    arr.push_back({{"freq_ghz", rad_to_ghz(l.omega)},
                   {"power_dbm", l.power > 0 ? json(watts_to_dbm(l.power)) : json(nullptr)},
                   {"comb_index", l.comb_index}});
  return arr;
}

// Non-pump comb lines within 30 dB of the strongest pump line.
int intermix_within_30db(const std::vector<SpectrumLine>& lines) {
  double pump = 0.0;
  for (const auto& l : lines)
    if (l.comb_index == 0 || l.comb_index == 1) pump = std::max(pump, l.power);
  int count = 0;
  for (const auto& l : lines)
    if (l.comb_index != 0 && l.comb_index != 1 && pump > 0.0 && l.power >= pump * 1e-3) ++count;
  return count;
}

json gain_summary(const GainProfile& profile, const ModeSet& modes, const PumpComb& comb, json& out) {
  try {
    const GainBandwidth gb = gain_bandwidth(profile);
    const double kappa = nearest_mode(modes, 0.5 * comb.pump_sum()).kappa();
    out["peak_gain_db"] = gb.peak_db;
    out["peak_freq_ghz"] = rad_to_ghz(gb.peak_omega);
    out["bandwidth_mhz"] = rad_to_mhz(gb.bandwidth);
    out["gain_bandwidth_mhz"] = rad_to_mhz(gb.product);
    out["kappa_mhz"] = rad_to_mhz(kappa);
    out["gain_bandwidth_over_kappa"] = gb.product / kappa;
    json sep = json::array();
    for (std::size_t n = 0; n < comb.size(); ++n)
      if (comb.index[n] == 0 || (!comb.degenerate() && comb.index[n] == 1))
        sep.push_back(std::abs(comb.freq[n] - gb.peak_omega) / gb.bandwidth);
    out["pump_separation_bandwidths"] = sep;
    out["window_ok"] = true;
  } catch (const Error& e) {
    double peak = -std::numeric_limits<double>::infinity();
    double at = nan;
    for (const auto& p : profile.points)
      if (!p.degenerate && !p.singular && p.gain_db > peak) {
        peak = p.gain_db;
        at = p.omega_s;
      }
    out["peak_gain_db"] = nullable(peak);
    out["peak_freq_ghz"] = nullable(rad_to_ghz(at));
    out["window_ok"] = false;
    out["window_error"] = e.what();
  }
  int singular = 0;
  for (const auto& p : profile.points) singular += p.singular;
  out["singular_points"] = singular;
  return out;
}

std::string gain_csv(const GainProfile& profile) {
  std::ostringstream os;
  write_gain_csv(profile, os);
  return os.str();
}

void solution_fields(const PumpCombSolution& s, json& out) {
  out["converged"] = s.converged;
  out["bifurcated"] = s.bifurcated;
  out["residual_norm"] = s.residual_norm;
  out["sigma_ratio"] = s.zero_power_min_singular_value > 0
                           ? json(s.jacobian_min_singular_value / s.zero_power_min_singular_value)
                           : json(nullptr);
  if (!s.converged) out["failure"] = s.diagnostic;
}

ExperimentResult run_resonances(const ExperimentConfig& c) {
  const Prepared p = prepare(c);
  ExperimentResult r;
  r.summary = base_summary(c);
  json modes = json::array();
  for (const Mode& m : p.all.modes)
    modes.push_back({{"index", m.index},
                     {"freq_ghz", rad_to_ghz(m.omega0)},
                     {"kappa_c_mhz", rad_to_mhz(m.kappa_c)},
                     {"kappa_i_mhz", rad_to_mhz(m.kappa_i)},
                     {"bare_freq_ghz", rad_to_ghz(c.geometry.bare_omega(m.index))}});
  r.summary["modes"] = modes;
  r.files.push_back({"modes.json", dump(to_json(p.all))});
  r.files.push_back({"kerr.json", dump(to_json(p.kerr))});
  return r;
}

ExperimentResult run_pump_solve(const ExperimentConfig& c) {
  const Prepared p = prepare(c);
  const PumpCombSolution s = solve_operating_point(p, c, c.pumps);
  ExperimentResult r;
  r.summary = base_summary(c);
  r.summary["pumps"] = pumps_json(c.pumps);
  solution_fields(s, r.summary);
  const auto spectrum = comb_output_spectrum(s, p.modes);
  r.summary["spectrum"] = spectrum_json(spectrum);
  r.summary["intermix_lines_within_30db"] = intermix_within_30db(spectrum);
  r.files.push_back({"pump_solution.json", dump(to_json(s))});
  r.files.push_back({"spectrum.csv", spectrum_csv(spectrum)});
  return r;
}

// Degenerate points of a profile: height over the mean of the neighbours and
// the nearest midpoint of consecutive comb lines.
json spike_report(const GainProfile& profile, const PumpComb& comb) {
  json arr = json::array();
  const auto& pts = profile.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i].degenerate || pts[i].singular) continue;
    double acc = 0.0;
    int count = 0;
    for (std::size_t j : {i - 1, i + 1})
      if (j < pts.size() && !pts[j].degenerate && std::isfinite(pts[j].gain_db)) {
        acc += pts[j].gain_db;
        ++count;
      }
    double midpoint = nan;
    for (std::size_t n = 0; n + 1 < comb.size(); ++n) {
      const double mid = 0.5 * (comb.freq[n] + comb.freq[n + 1]);
      if (!std::isfinite(midpoint) || std::abs(mid - pts[i].omega_s) < std::abs(midpoint - pts[i].omega_s))
        midpoint = mid;
    }
    arr.push_back({{"freq_ghz", rad_to_ghz(pts[i].omega_s)},
                   {"gain_db", pts[i].gain_db},
                   {"height_db", count ? json(pts[i].gain_db - acc / count) : json(nullptr)},
                   {"nearest_midpoint_ghz", nullable(rad_to_ghz(midpoint))},
                   {"offset_from_midpoint_hz", nullable((pts[i].omega_s - midpoint) / two_pi)}});
  }
  return arr;
}

ExperimentResult run_gain_sweep(const ExperimentConfig& c, bool wide) {
  const Prepared p = prepare(c);
  const PumpCombSolution s = solve_operating_point(p, c, c.pumps);
  ExperimentResult r;
  r.summary = base_summary(c);
  r.summary["pumps"] = pumps_json(c.pumps);
  solution_fields(s, r.summary);
  const auto spectrum = comb_output_spectrum(s, p.modes);
  r.summary["intermix_lines_within_30db"] = intermix_within_30db(spectrum);
  r.files.push_back({"spectrum.csv", spectrum_csv(spectrum)});
  if (!s.converged) return r;
  const GainProfile profile = gain_profile(p.sys, p.modes, s, c.sweep.omega_grid(), c.solver.sideband_order);
  gain_summary(profile, p.modes, s.comb, r.summary);
  r.summary["sweep_step_hz"] = c.sweep.step() / two_pi;
  if (wide) {
    r.summary["spectrum"] = spectrum_json(spectrum);
    r.summary["degenerate_points"] = spike_report(profile, s.comb);
  }
  r.files.push_back({"gain.csv", gain_csv(profile)});
  return r;
}

ExperimentResult run_phase_sweep(const ExperimentConfig& c) {
  const Prepared p = prepare(c);
  const PumpCombSolution s = solve_operating_point(p, c, c.pumps);
  ExperimentResult r;
  r.summary = base_summary(c);
  r.summary["pumps"] = pumps_json(c.pumps);
  solution_fields(s, r.summary);
  if (!s.converged) return r;
  std::vector<double> theta(static_cast<std::size_t>(c.sweep.theta_points));
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = two_pi * static_cast<double>(i) / static_cast<double>(theta.size());
  const PhaseSweepResult ph = phase_sensitive_gain(p.sys, p.modes, s, theta, c.sweep.step(), c.solver.sideband_order);
  r.summary["degenerate_freq_ghz"] = rad_to_ghz(0.5 * s.comb.pump_sum());
  r.summary["max_gain_db"] = ph.max_db;
  r.summary["min_gain_db"] = ph.min_db;
  r.summary["plateau_db"] = ph.plateau_db;
  r.summary["excess_over_plateau_db"] = ph.max_db - ph.plateau_db;
  r.summary["period_rad"] = ph.period;
  r.summary["period_error"] = ph.period_error;
  r.summary["amplified_quadrature_db"] = to_db(ph.quadratures.amplified);
  r.summary["squeezed_quadrature_db"] = to_db(ph.quadratures.squeezed);
  r.summary["amplified_axis_rad"] = ph.quadratures.axis;
  r.summary["g_s"] = to_json(ph.g_s);
  r.summary["g_i"] = to_json(ph.g_i);
  std::ostringstream os;
  write_phase_csv(ph, os);
  r.files.push_back({"phase.csv", os.str()});
  return r;
}

json sensitivity_json(const PointSensitivity& s) {
  json df = json::array(), dp = json::array();
  for (const auto& d : s.d_freq)
    df.push_back({{"value", d.converged ? json(d.value) : json(nullptr)}, {"step", d.step}, {"shrinks", d.shrinks}});
  for (const auto& d : s.d_power)
    dp.push_back({{"value", d.converged ? json(d.value) : json(nullptr)}, {"step", d.step}, {"shrinks", d.shrinks}});
  return json{{"pumps", pumps_json(s.pumps)},
              {"peak_gain_db", nullable(s.peak_db)},
              {"dgain_dfreq_db_per_mhz", df},
              {"dgain_dpower_db_per_db", dp}};
}

ExperimentResult run_sensitivity(const ExperimentConfig& c) {
  const SensitivityReport rep = sensitivity(c);
  ExperimentResult r;
  r.summary = base_summary(c);
  r.summary["operating_point"] = sensitivity_json(rep.point);
  if (rep.has_degenerate) {
    r.summary["degenerate"] = sensitivity_json(rep.degenerate);
    r.summary["matched_within_0p5_db"] = rep.matched;
    r.summary["degenerate_more_sensitive"] = rep.degenerate_more_sensitive;
  }
  return r;
}

ExperimentResult run_cross_harmonic(const ExperimentConfig& c) {
  const CrossHarmonicResult x = cross_harmonic(c);
  const Prepared p = prepare(c);
  ExperimentResult r;
  r.summary = base_summary(c);
  r.summary["pumps"] = pumps_json(c.pumps);
  solution_fields(x.solution, r.summary);
  if (!x.solution.converged) return r;
  gain_summary(x.profile, p.modes, x.solution.comb, r.summary);
  r.summary["sweep_step_hz"] = c.sweep.step() / two_pi;
  r.summary["expected_spacing_mhz"] = rad_to_mhz(x.expected_spacing);
  json spacing = json::array();
  for (double s : x.measured_spacing) spacing.push_back(nullable(rad_to_mhz(s)));
  r.summary["measured_spacing_mhz"] = spacing;
  r.summary["min_sideband_suppression_db"] = nullable(x.min_suppression_db);
  r.summary["sideband_count"] = x.sidebands.lines.size();
  std::ostringstream os;
  os << "freq_ghz,power_dbm,dbc,cascade,mode\n";
  for (const auto& l : x.sidebands.lines)
    os << format_double(rad_to_ghz(l.omega)) << ',' << format_double(watts_to_dbm(l.power)) << ','
       << format_double(to_db(l.power / x.sidebands.strongest_pump)) << ',' << l.cascade << ','
       << p.modes[l.nearest_mode].index << '\n';
  r.files.push_back({"gain.csv", gain_csv(x.profile)});
  r.files.push_back({"sidebands.csv", os.str()});
  return r;
}

ExperimentResult run_oracle_check(const ExperimentConfig& c) {
  const OracleReport o = oracle_check(c);
  ExperimentResult r;
  r.summary = base_summary(c);
  r.summary["pumps"] = pumps_json(c.pumps);
  json probes = json::array();
  for (const auto& p : o.probes)
    probes.push_back({{"freq_ghz", rad_to_ghz(p.omega)}, {"hb_gain_db", p.hb_db}, {"td_gain_db", p.td_db}});
  r.summary["probes"] = probes;
  r.summary["max_gain_error_db"] = o.max_gain_error_db;
  r.summary["max_strong_line_rel_error"] = o.max_strong_rel_error;
  r.summary["max_weak_line_rel_error"] = o.max_weak_rel_error;
  r.summary["comb_lines_checked"] = o.comb.size();
  r.summary["settled"] = o.settled;
  return r;
}

ExperimentResult run_tune(const ExperimentConfig& c) {
  const TuneResult t = tune_operating_point(c, c.tune.target_db);
  ExperimentResult r;
  r.summary = base_summary(c);
  r.summary["target_db"] = c.tune.target_db;
  r.summary["reached"] = t.reached;
  r.summary["peak_gain_db"] = nullable(t.peak_db);
  r.summary["pumps"] = pumps_json(t.pumps);
  r.summary["evaluations"] = t.history.size();
  r.files.push_back({"tuned.ini", config_to_string(tuned_scenario(c, t))});
  return r;
}

}  // namespace

Prepared prepare(const ExperimentConfig& config) {
  Prepared p;
  p.all = find_modes(config.geometry, config.n_max);
  p.modes = p.all.select(config.harmonics);
  p.kerr = reduce_kerr(config.geometry, p.modes);
  p.sys = make_modal_system(p.modes, p.kerr);
  return p;
}

PumpCombSolution solve_operating_point(const Prepared& p, const ExperimentConfig& config,
                                       const std::vector<PumpSetting>& pumps) {
  std::vector<DriveTone> tones;
  for (const auto& s : pumps) tones.push_back(s.tone());
  const double merge = std::max(two_pi * config.solver.merge_tol_hz, 1e-6 * p.sys.rate);
  const PumpComb comb = build_comb(tones, config.solver.comb_order, merge);
  return solve_pump_steady_state(p.sys, comb, config.solver.hb());
}

std::pair<double, double> peak_window(const ExperimentConfig& config, const PumpComb& comb) {
  if (!comb.degenerate()) {
    const double margin = 0.05 * comb.delta;
    return {comb.omega_base + margin, comb.omega_base + comb.delta - margin};
  }
  const double half = 0.5 * ghz_to_rad(config.sweep.stop_ghz - config.sweep.start_ghz);
  return {comb.omega_base - half, comb.omega_base + half};
}

PeakGain operating_peak(const Prepared& p, const ExperimentConfig& config, const std::vector<PumpSetting>& pumps) {
  const PumpCombSolution s = solve_operating_point(p, config, pumps);
  if (!s.converged) return {nan, nan};
  const SidebandSolver solver(p.sys, s, config.solver.sideband_order);
  const auto [lo, hi] = peak_window(config, s.comb);
  return peak_gain(solver, p.modes, lo, hi);
}

namespace {

template <typename F>
Derivative central_difference(F&& f, double h0) {
  Derivative d;
  auto estimate = [&](double h) -> std::optional<double> {
    const double a = f(h);
    const double b = f(-h);
    if (!std::isfinite(a) || !std::isfinite(b)) return std::nullopt;
    return (a - b) / (2.0 * h);
  };
  double h = h0;
  std::optional<double> prev = estimate(h);
  while (!prev && d.shrinks < 5) {
    h *= 0.5;
    ++d.shrinks;
    prev = estimate(h);
  }
  if (!prev) return d;
  while (d.shrinks < 5) {
    h *= 0.5;
    ++d.shrinks;
    const std::optional<double> cur = estimate(h);
    if (!cur) continue;
    const double scale = std::max(std::abs(*cur), std::abs(*prev));
    if (scale < 1e-9 || std::abs(*cur - *prev) <= 0.01 * scale) {
      d.value = *cur;
      d.step = h;
      d.converged = true;
      return d;
    }
    prev = cur;
  }
  d.value = *prev;
  d.step = h;
  return d;
}

}  // namespace

PointSensitivity point_sensitivity(const Prepared& p, const ExperimentConfig& config,
                                   const std::vector<PumpSetting>& pumps) {
  PointSensitivity out;
  out.pumps = pumps;
  out.peak_db = operating_peak(p, config, pumps).gain_db;
  for (std::size_t i = 0; i < pumps.size(); ++i) {
    // Unpumped points have no gain to perturb.
    if (!std::isfinite(pumps[i].power_dbm)) {
      out.d_freq.push_back({0.0, 0.0, 0, true});
      out.d_power.push_back({0.0, 0.0, 0, true});
      continue;
    }
    out.d_freq.push_back(central_difference(
        [&](double h) {
          auto q = pumps;
          q[i].freq_ghz += h * 1e-3;
          return operating_peak(p, config, q).gain_db;
        },
        config.sensitivity.freq_step_mhz));
    out.d_power.push_back(central_difference(
        [&](double h) {
          auto q = pumps;
          q[i].power_dbm += h;
          return operating_peak(p, config, q).gain_db;
        },
        config.sensitivity.power_step_db));
  }
  return out;
}

SensitivityReport sensitivity(const ExperimentConfig& config) {
  const Prepared p = prepare(config);
  SensitivityReport rep;
  rep.point = point_sensitivity(p, config, config.pumps);
  if (config.sensitivity.degenerate.power_dbm > -150.0) {
    rep.has_degenerate = true;
    rep.degenerate = point_sensitivity(p, config, {config.sensitivity.degenerate});
    rep.matched = std::abs(rep.degenerate.peak_db - rep.point.peak_db) <= 0.5;
    const double deg = std::abs(rep.degenerate.d_freq.front().value);
    rep.degenerate_more_sensitive = true;
    for (const auto& d : rep.point.d_freq) rep.degenerate_more_sensitive &= deg > std::abs(d.value);
  }
  return rep;
}

CrossHarmonicResult cross_harmonic(const ExperimentConfig& config) {
  const Prepared p = prepare(config);
  if (p.modes.size() < 3) throw Error("operating-point", "cross-harmonic pumping needs three modes");
  if (config.pumps.size() != 2) throw Error("operating-point", "cross-harmonic pumping needs two pumps");
  const std::size_t mid = p.modes.size() / 2;
  const Mode& below = p.modes[mid - 1];
  const Mode& above = p.modes[mid + 1];
  double f1 = config.pumps[0].tone().omega;
  double f2 = config.pumps[1].tone().omega;
  if (f1 > f2) std::swap(f1, f2);
  if (std::abs(f1 - below.omega0) > 10.0 * below.kappa() || std::abs(f2 - above.omega0) > 10.0 * above.kappa())
    throw Error("operating-point", "pumps must lie within 10 linewidths of the modes adjacent to the signal mode");

  CrossHarmonicResult x;
  x.solution = solve_operating_point(p, config, config.pumps);
  if (!x.solution.converged) return x;
  x.profile = gain_profile(p.sys, p.modes, x.solution, config.sweep.omega_grid(), config.solver.sideband_order);
  try {
    x.gain = gain_bandwidth(x.profile);
  } catch (const Error&) {
  }
  x.expected_spacing = 2.0 * std::abs(2.0 * f1 - f2);
  x.sidebands = non_rwa_products(p.sys, p.modes, x.solution, 3.0 * x.expected_spacing);
  double strongest_sideband = 0.0;
  for (std::size_t pos : {mid - 1, mid + 1}) {
    const double pump = pos < mid ? f1 : f2;
    const Sideband* best = nullptr;
    for (const auto& l : x.sidebands.lines)
      if (l.nearest_mode == pos && (!best || l.power > best->power)) best = &l;
    x.measured_spacing.push_back(best ? std::abs(best->omega - pump) : nan);
  }
  for (const auto& l : x.sidebands.lines) strongest_sideband = std::max(strongest_sideband, l.power);
  x.min_suppression_db = strongest_sideband > 0.0 ? to_db(x.sidebands.strongest_pump / strongest_sideband)
                                                  : std::numeric_limits<double>::infinity();
  return x;
}

OracleReport oracle_check(const ExperimentConfig& config) {
  const Prepared p = prepare(config);
  const PumpCombSolution s = solve_operating_point(p, config, config.pumps);
  if (!s.converged) throw Error("solution", "pump solve did not converge: " + s.diagnostic);
  const SidebandSolver solver(p.sys, s, config.solver.sideband_order);
  const std::vector<DriveTone> pumps = config.drive_tones();
  const PumpComb& comb = s.comb;
  const double frame = comb.degenerate() ? comb.omega_base : 0.5 * comb.pump_sum();

  // Every tone must land on the beat grid around the frame.
  double beat = mhz_to_rad(config.oracle.beat_mhz);
  if (!comb.degenerate()) beat = 0.5 * comb.delta / std::max(1.0, std::round(0.5 * comb.delta / beat));

  TimeDomainSettings td;
  td.frame_omega = frame;
  td.periods = config.oracle.periods;
  td.transient = config.oracle.transient;

  OracleReport rep;
  // Pump-only run for the comb amplitudes.
  {
    TimeDomainSettings t = td;
    t.beat = comb.degenerate() ? 0.0 : 0.5 * comb.delta;
    const TimeDomainRun run = integrate(p.modes, p.kerr, pumps, t);
    rep.settled &= run.settled;
    const double strongest = s.amplitudes.cwiseAbs().maxCoeff();
    for (std::size_t n = 0; n < comb.size(); ++n)
      for (std::size_t m = 0; m < p.modes.size(); ++m) {
        const std::complex<double> hb = s.amplitudes(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
        const double level = 20.0 * std::log10(std::abs(hb) / strongest);
        // Below this the integrator tolerance, not the harmonic balance, sets the error.
        if (!(level > -100.0)) continue;
        const std::complex<double> tdv = extract_mode_tone(run, m, comb.freq[n]);
        const double err = std::abs(tdv - hb) / std::abs(hb);
        rep.comb.push_back({comb.freq[n], m, level, err});
        if (level > -60.0)
          rep.max_strong_rel_error = std::max(rep.max_strong_rel_error, err);
        else
          rep.max_weak_rel_error = std::max(rep.max_weak_rel_error, err);
      }
  }

  // Probe offsets on the beat grid, avoiding the degeneracy and the comb.
  const double lo = ghz_to_rad(config.sweep.start_ghz);
  const double hi = ghz_to_rad(config.sweep.stop_ghz);
  const auto k_lo = static_cast<long>(std::ceil((lo - frame) / beat));
  const auto k_hi = static_cast<long>(std::floor((hi - frame) / beat));
  auto forbidden = [&](long k) {
    if (k == 0) return true;
    for (double f : comb.freq)
      if (std::abs(frame + k * beat - f) < 0.5 * beat) return true;
    return false;
  };
  std::vector<long> ks;
  const int count = std::max(1, config.oracle.probes);
  for (int i = 0; i < count; ++i) {
    long k = count == 1 ? (k_lo + k_hi) / 2
                        : k_lo + static_cast<long>(std::llround(static_cast<double>(i) * (k_hi - k_lo) / (count - 1)));
    while (forbidden(k) || std::find(ks.begin(), ks.end(), k) != ks.end()) ++k;
    ks.push_back(k);
  }
  const double probe_power = pumps.front().power_in * std::pow(10.0, config.oracle.probe_dbc / 10.0);
  for (long k : ks) {
    const double w = frame + k * beat;
    std::vector<DriveTone> drives = pumps;
    drives.push_back({w, probe_power, 0.0});
    TimeDomainSettings t = td;
    t.beat = beat;
    const TimeDomainRun run = integrate(p.modes, p.kerr, drives, t);
    rep.settled &= run.settled;
    const std::complex<double> g_td = extract_tone(run, w) / drives.back().amplitude();
    const std::complex<double> g_hb = solver.respond(w).g_s;
    ProbeCheck pc{w, 20.0 * std::log10(std::abs(g_hb)), 20.0 * std::log10(std::abs(g_td))};
    rep.max_gain_error_db = std::max(rep.max_gain_error_db, std::abs(pc.hb_db - pc.td_db));
    rep.probes.push_back(pc);
  }
  return rep;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const std::string& k = config.kind;
  if (k == "resonances") return run_resonances(config);
  if (k == "pump-solve") return run_pump_solve(config);
  if (k == "gain-sweep") return run_gain_sweep(config, false);
  if (k == "wide-scan") return run_gain_sweep(config, true);
  if (k == "phase-sweep") return run_phase_sweep(config);
  if (k == "sensitivity") return run_sensitivity(config);
  if (k == "cross-harmonic") return run_cross_harmonic(config);
  if (k == "oracle-check") return run_oracle_check(config);
  if (k == "tune") return run_tune(config);
  throw Error("config", "unknown experiment kind '" + k + "'");
}

}  // namespace respa
