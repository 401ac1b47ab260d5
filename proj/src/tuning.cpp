#include "respa/tuning.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <algorithm>

#include "respa/experiment.hpp"

namespace respa {

namespace {

constexpr double gain_tol_db = 0.005;

struct Evaluation {
  double peak_db = std::numeric_limits<double>::quiet_NaN();
  bool usable = false;
};

Evaluation evaluate(const Prepared& p, const ExperimentConfig& config, const std::vector<PumpSetting>& pumps) {
  const PumpCombSolution s = solve_operating_point(p, config, pumps);
  if (!s.converged || s.bifurcated) return {};
  const SidebandSolver solver(p.sys, s, config.solver.sideband_order);
  const auto [lo, hi] = peak_window(config, s.comb);
  const PeakGain g = peak_gain(solver, p.modes, lo, hi);
  return {g.gain_db, std::isfinite(g.gain_db)};
}

TuneResult unpumped(const ExperimentConfig& config) {
  TuneResult r;
  r.pumps = config.pumps;
  for (auto& p : r.pumps) p.power_dbm = -std::numeric_limits<double>::infinity();
  r.reached = true;
  return r;
}

}  // namespace

TuneResult tune_single_pump(const ExperimentConfig& config, double target_db, double max_power_dbm) {
  if (target_db <= 0.0) return unpumped(config);
  const Prepared p = prepare(config);
  TuneResult r;
  std::vector<PumpSetting> pumps = config.pumps;
  auto at = [&](double power) {
    pumps.front().power_dbm = power;
    const Evaluation e = evaluate(p, config, pumps);
    r.history.push_back({power - config.pumps.front().power_dbm, pumps.front().freq_ghz, e.peak_db, e.usable});
    return e;
  };
  double lo = config.pumps.front().power_dbm;
  double hi = max_power_dbm;
  Evaluation best = at(lo);
  if (best.usable && best.peak_db >= target_db) hi = lo;
  double best_power = lo;
  for (int i = 0; i < 60 && hi - lo > 1e-9; ++i) {
    const double mid = 0.5 * (lo + hi);
    const Evaluation e = at(mid);
    // Unusable points sit past the bistability threshold: too much power.
    if (e.usable && e.peak_db < target_db) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (e.usable && (!best.usable || std::abs(e.peak_db - target_db) < std::abs(best.peak_db - target_db))) {
      best = e;
      best_power = mid;
    }
    if (best.usable && std::abs(best.peak_db - target_db) < gain_tol_db) break;
  }
  r.pumps = config.pumps;
  r.pumps.front().power_dbm = best_power;
  r.peak_db = best.peak_db;
  r.reached = best.usable && std::abs(best.peak_db - target_db) < 10.0 * gain_tol_db;
  return r;
}

TuneResult tune_operating_point(const ExperimentConfig& config, double target_db) {
  if (target_db <= 0.0) return unpumped(config);
  const TuneSetting& t = config.tune;
  if (config.pumps.size() == 1)
    return tune_single_pump(config, target_db,
                            config.pumps.front().power_dbm + t.max_power_steps * t.power_step_db);
  if (config.pumps.size() != 2) throw Error("config", "tuning needs one or two pumps");

  const Prepared p = prepare(config);
  TuneResult r;
  const double f2_centre = config.pumps[1].freq_ghz;
  const double span = t.span_mhz * 1e-3;
  double direction = 0.0;
  for (int step = 0; step <= t.max_power_steps; ++step) {
    const double offset = direction * step * t.power_step_db;
    std::vector<PumpSetting> pumps = config.pumps;
    for (auto& q : pumps) q.power_dbm += offset;
    auto at = [&](double f2) {
      pumps[1].freq_ghz = f2;
      const Evaluation e = evaluate(p, config, pumps);
      r.history.push_back({offset, f2, e.peak_db, e.usable});
      return e;
    };
    std::vector<std::pair<double, Evaluation>> scan;
    for (int i = 0; i < t.points; ++i) {
      const double f2 = f2_centre - span + 2.0 * span * i / std::max(1, t.points - 1);
      const Evaluation e = at(f2);
      if (e.usable) scan.emplace_back(f2, e);
    }
    // Crossing of the target closest to the configured second-pump frequency.
    std::optional<std::size_t> crossing;
    for (std::size_t i = 0; i + 1 < scan.size(); ++i) {
      const double a = scan[i].second.peak_db - target_db;
      const double b = scan[i + 1].second.peak_db - target_db;
      if (a * b > 0.0) continue;
      const double mid = 0.5 * (scan[i].first + scan[i + 1].first);
      if (!crossing || std::abs(mid - f2_centre) <
                           std::abs(0.5 * (scan[*crossing].first + scan[*crossing + 1].first) - f2_centre))
        crossing = i;
    }
    if (crossing) {
      // Bisection keeps `below` under the target; bifurcated points count as above.
      double below = scan[*crossing].first, above = scan[*crossing + 1].first;
      Evaluation best = scan[*crossing].second;
      double best_f = below;
      if (best.peak_db >= target_db) std::swap(below, above);
      if (std::abs(scan[*crossing + 1].second.peak_db - target_db) < std::abs(best.peak_db - target_db)) {
        best = scan[*crossing + 1].second;
        best_f = scan[*crossing + 1].first;
      }
      for (int k = 0; k < 50 && std::abs(best.peak_db - target_db) >= gain_tol_db; ++k) {
        const double mid = 0.5 * (below + above);
        const Evaluation m = at(mid);
        if (m.usable && m.peak_db < target_db) {
          below = mid;
        } else {
          above = mid;
        }
        if (m.usable && std::abs(m.peak_db - target_db) < std::abs(best.peak_db - target_db)) {
          best = m;
          best_f = mid;
        }
      }
      r.pumps = pumps;
      r.pumps[1].freq_ghz = best_f;
      r.peak_db = best.peak_db;
      r.reached = std::abs(best.peak_db - target_db) < 10.0 * gain_tol_db;
      return r;
    }
    if (step == 0) {
      // Raise the powers if every usable point is short of the target, else lower them.
      const bool short_of = std::all_of(scan.begin(), scan.end(),
                                        [&](const auto& x) { return x.second.peak_db < target_db; });
      direction = short_of ? 1.0 : -1.0;
    }
  }
  r.pumps = config.pumps;
  r.peak_db = std::numeric_limits<double>::quiet_NaN();
  return r;
}

ExperimentConfig tuned_scenario(const ExperimentConfig& config, const TuneResult& result) {
  ExperimentConfig c = config;
  c.kind = "gain-sweep";
  c.pumps = result.pumps;
  return c;
}

}  // namespace respa
