#include "respa/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>
#include <boost/math/tools/minima.hpp>

namespace respa {

namespace {

using cplx = std::complex<double>;
constexpr cplx I(0.0, 1.0);
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

SidebandBasis make_sideband_basis(const PumpComb& comb, std::size_t modes, double omega_s,
                                  int extra_order, double coincidence_tol) {
  SidebandBasis b;
  b.omega_s = omega_s;
  b.delta = comb.delta;
  b.pump_sum = comb.pump_sum();
  b.modes = modes;
  std::vector<int> candidates;
  if (comb.degenerate()) {
    candidates = {0};
  } else {
    const auto [lo, hi] = std::minmax_element(comb.index.begin(), comb.index.end());
    const int span = std::max(-*lo, *hi) + extra_order;
    for (int k = -span; k <= span; ++k) candidates.push_back(k);
  }
  for (int k : candidates) {
    const double s = omega_s + k * b.delta;
    const double i = b.pump_sum - omega_s + k * b.delta;
    // The probe line itself is always kept, as is its direct idler.
    if (k != 0 && (s <= 0.0 || i <= 0.0)) continue;
    b.offsets.push_back(k);
    b.signal_freq.push_back(s);
    b.idler_freq.push_back(i);
  }
  for (std::size_t n = 0; n < b.offsets.size(); ++n)
    if (std::abs(b.idler_freq[n] - omega_s) <= coincidence_tol) {
      b.degenerate = true;
      b.degenerate_offset = b.offsets[n];
      break;
    }
  return b;
}

SidebandSolver::SidebandSolver(const ModalSystem& sys, const PumpCombSolution& solution, int extra_order)
    : sys_(sys), comb_(solution.comb), extra_order_(extra_order) {
  const std::size_t modes = sys_.size();
  const std::size_t lines = comb_.size();
  const Eigen::MatrixXcd a = solution.amplitudes / sys_.amplitude_scale();
  const auto [lo, hi] = std::minmax_element(comb_.index.begin(), comb_.index.end());
  diff_min_ = *lo - *hi;
  pair_min_ = 2 * *lo;
  const auto md = static_cast<Eigen::Index>(modes);
  conversion_.assign(static_cast<std::size_t>(2 * (*hi - *lo) + 1), Eigen::MatrixXcd::Zero(md, md));
  pairing_.assign(static_cast<std::size_t>(2 * (*hi - *lo) + 1), Eigen::MatrixXcd::Zero(md, md));

  for (std::size_t j = 0; j < lines; ++j)
    for (std::size_t l = 0; l < lines; ++l) {
      Eigen::MatrixXcd& conv = conversion_[static_cast<std::size_t>(comb_.index[j] - comb_.index[l] - diff_min_)];
      Eigen::MatrixXcd& pair = pairing_[static_cast<std::size_t>(comb_.index[j] + comb_.index[l] - pair_min_)];
      for (std::size_t m = 0; m < modes; ++m)
        for (std::size_t r = 0; r < modes; ++r)
          for (std::size_t p = 0; p < modes; ++p)
            for (std::size_t q = 0; q < modes; ++q) {
              const double g = sys_.g(m, r, p, q);
              if (g == 0.0) continue;
              const cplx ap = a(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j));
              const cplx aq_j = a(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(j));
              const cplx ar = std::conj(a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l)));
              const cplx aq_l = a(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(l));
              const auto mi = static_cast<Eigen::Index>(m);
              // d/d a_q with a_p at line j, and d/d a_p with a_q at line j.
              conv(mi, static_cast<Eigen::Index>(q)) += g * ap * ar;
              conv(mi, static_cast<Eigen::Index>(p)) += g * aq_j * ar;
              // d/d conj(a_r) with a_p at j and a_q at l.
              pair(mi, static_cast<Eigen::Index>(r)) += g * ap * aq_l;
            }
    }
}

SidebandBasis SidebandSolver::basis(double omega_s) const {
  return make_sideband_basis(comb_, sys_.size(), omega_s, extra_order_, 1e-6 * sys_.rate);
}

SidebandResponse SidebandSolver::respond(double omega_s) const {
  const SidebandBasis b = basis(omega_s);
  const auto modes = static_cast<Eigen::Index>(sys_.size());
  const auto lines = static_cast<Eigen::Index>(b.size());
  const Eigen::Index half = modes * lines;
  const int c_hi = comb_.upper_pump_index();
  auto pos = [&](int k) -> Eigen::Index {
    for (Eigen::Index n = 0; n < lines; ++n)
      if (b.offsets[static_cast<std::size_t>(n)] == k) return n;
    return -1;
  };
  // Unknowns: X (signal family) then Y (conjugated idler family), index m * lines + n.
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(2 * half, 2 * half);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(2 * half);

  for (Eigen::Index n = 0; n < lines; ++n) {
    const int k = b.offsets[static_cast<std::size_t>(n)];
    for (Eigen::Index m = 0; m < modes; ++m) {
      const Eigen::Index xs = m * lines + n;
      const Eigen::Index ys = half + m * lines + n;
      mat(xs, xs) += sys_.linear(static_cast<std::size_t>(m), b.signal_freq[static_cast<std::size_t>(n)]);
      mat(ys, ys) += std::conj(sys_.linear(static_cast<std::size_t>(m), b.idler_freq[static_cast<std::size_t>(n)]));
      if (k == 0) rhs(xs) = -sys_.sqrt_kc(m);

      for (std::size_t d = 0; d < conversion_.size(); ++d) {
        const Eigen::Index src = pos(k - (static_cast<int>(d) + diff_min_));
        if (src < 0) continue;
        for (Eigen::Index x = 0; x < modes; ++x) {
          const cplx c = conversion_[d](m, x);
          if (c == 0.0) continue;
          mat(xs, x * lines + src) += I * c;
          mat(ys, half + x * lines + src) += -I * std::conj(c);
        }
      }
      for (std::size_t s = 0; s < pairing_.size(); ++s) {
        const Eigen::Index src = pos(static_cast<int>(s) + pair_min_ - c_hi - k);
        if (src < 0) continue;
        for (Eigen::Index x = 0; x < modes; ++x) {
          const cplx c = pairing_[s](m, x);
          if (c == 0.0) continue;
          mat(xs, half + x * lines + src) += I * c;
          mat(ys, x * lines + src) += -I * std::conj(c);
        }
      }
    }
  }

  SidebandResponse out;
  out.degenerate = b.degenerate;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(mat);
  const double rcond = lu.rcond();
  const Eigen::VectorXcd sol = lu.solve(rhs);
  if (!(rcond > 1e-14) || !sol.allFinite()) {
    out.singular = true;
    out.g_s = out.g_i = out.g_coincident = cplx(nan, nan);
    return out;
  }
  out.signal_out.assign(static_cast<std::size_t>(lines), cplx(0.0, 0.0));
  out.idler_out.assign(static_cast<std::size_t>(lines), cplx(0.0, 0.0));
  for (Eigen::Index n = 0; n < lines; ++n)
    for (Eigen::Index m = 0; m < modes; ++m) {
      out.signal_out[static_cast<std::size_t>(n)] -= sys_.sqrt_kc(m) * sol(m * lines + n);
      out.idler_out[static_cast<std::size_t>(n)] -= sys_.sqrt_kc(m) * std::conj(sol(half + m * lines + n));
    }
  const Eigen::Index n0 = pos(0);
  out.signal_out[static_cast<std::size_t>(n0)] += 1.0;
  out.g_s = 1.0;
  out.g_i = 0.0;
  for (Eigen::Index m = 0; m < modes; ++m) {
    out.g_s -= sys_.sqrt_kc(m) * sol(m * lines + n0);
    out.g_i -= sys_.sqrt_kc(m) * std::conj(sol(half + m * lines + n0));
  }
  if (b.degenerate) {
    const Eigen::Index nk = pos(b.degenerate_offset);
    for (Eigen::Index m = 0; m < modes; ++m)
      out.g_coincident -= sys_.sqrt_kc(m) * std::conj(sol(half + m * lines + nk));
  }
  return out;
}

double relative_gain_db(cplx g, const ModeSet& modes, double omega) {
  return 20.0 * std::log10(std::abs(g) / std::abs(linear_response(modes, omega)));
}

namespace {

GainPoint make_point(const SidebandSolver& solver, const ModeSet& modes, double omega) {
  const SidebandResponse r = solver.respond(omega);
  GainPoint p;
  p.omega_s = omega;
  p.g_s = r.g_s;
  p.g_i = r.g_i;
  p.degenerate = r.degenerate;
  p.singular = r.singular;
  if (r.singular) {
    p.gain_db = nan;
  } else if (r.degenerate) {
    p.gain_db = relative_gain_db(std::abs(r.g_s) + std::abs(r.g_coincident), modes, omega);
  } else {
    p.gain_db = relative_gain_db(r.g_s, modes, omega);
  }
  return p;
}

}  // namespace

GainProfile gain_profile(const ModalSystem& sys, const ModeSet& modes, const PumpCombSolution& solution,
                         const std::vector<double>& omega_grid, int extra_order) {
  if (!solution.converged) throw Error("solution", "gain profile requires a converged pump solution");
  const SidebandSolver solver(sys, solution, extra_order);
  GainProfile profile;
  profile.comb_order = solution.comb.order;
  profile.sideband_order = extra_order;
  profile.pump_sum = solution.comb.pump_sum();
  profile.points.reserve(omega_grid.size());
  for (double w : omega_grid) {
    if (!(w > 0.0)) throw Error("domain", "signal frequencies must be positive");
    profile.points.push_back(make_point(solver, modes, w));
  }
  return profile;
}

GainProfile gain_profile(const PumpCombSolution& solution, const ModeSet& modes, const KerrMatrix& kerr,
                         const std::vector<double>& omega_grid, int extra_order) {
  return gain_profile(make_modal_system(modes, kerr), modes, solution, omega_grid, extra_order);
}

QuadratureGains quadrature_decomposition(cplx g_s, cplx g_i) {
  Eigen::Matrix2d m;
  m << g_s.real() + g_i.real(), -g_s.imag() + g_i.imag(),
       g_s.imag() + g_i.imag(), g_s.real() - g_i.real();
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(m, Eigen::ComputeFullV);
  QuadratureGains q;
  q.amplified = svd.singularValues()(0) * svd.singularValues()(0);
  q.squeezed = svd.singularValues()(1) * svd.singularValues()(1);
  q.axis = std::atan2(svd.matrixV()(1, 0), svd.matrixV()(0, 0));
  return q;
}

PhaseSweepResult phase_sensitive_gain(const ModalSystem& sys, const ModeSet& modes,
                                      const PumpCombSolution& solution,
                                      const std::vector<double>& theta_grid, double plateau_step,
                                      int extra_order) {
  if (solution.comb.degenerate())
    throw Error("degenerate", "phase-sensitive gain needs two distinct pump lines");
  if (!solution.converged) throw Error("solution", "phase sweep requires a converged pump solution");
  const SidebandSolver solver(sys, solution, extra_order);
  const double center = 0.5 * solution.comb.pump_sum();
  const SidebandResponse r = solver.respond(center);
  if (r.singular) throw Error("singular", "sideband system is singular at the degeneracy");

  PhaseSweepResult out;
  out.g_s = r.g_s;
  out.g_i = r.g_coincident;
  const double ref = std::norm(linear_response(modes, center));
  auto power = [&](double t) { return std::norm(out.g_s * std::polar(1.0, t) + out.g_i * std::polar(1.0, -t)) / ref; };

  out.theta = theta_grid;
  double g_max = 0.0;
  double g_min = std::numeric_limits<double>::infinity();
  for (double t : theta_grid) {
    const double g = power(t);
    out.gain_db.push_back(10.0 * std::log10(g));
    g_max = std::max(g_max, g);
    g_min = std::min(g_min, g);
  }
  out.quadratures = quadrature_decomposition(out.g_s / std::sqrt(ref), out.g_i / std::sqrt(ref));
  // Extremes are attained at phases the grid may miss; the quadrature map gives them exactly.
  out.max_db = 10.0 * std::log10(std::max(g_max, out.quadratures.amplified));
  out.min_db = 10.0 * std::log10(std::min(g_min, out.quadratures.squeezed));

  // Dominant Fourier harmonic of G over one full turn sets the period.
  constexpr int samples = 256;
  int best = 0;
  double best_amp = 0.0;
  for (int h = 1; h <= 4; ++h) {
    cplx c(0.0, 0.0);
    for (int s = 0; s < samples; ++s) {
      const double t = two_pi * s / samples;
      c += power(t) * std::polar(1.0, -h * t);
    }
    if (std::abs(c) > best_amp * (1.0 + 1e-12)) {
      best_amp = std::abs(c);
      best = h;
    }
  }
  out.period = best_amp > 1e-14 * samples ? two_pi / best : std::numbers::pi;
  double err = 0.0;
  for (double t : theta_grid) err = std::max(err, std::abs(power(t) - power(t + out.period)));
  out.period_error = g_max > 0.0 ? err / g_max : 0.0;

  double acc = 0.0;
  int count = 0;
  for (int j = -10; j <= 10; ++j) {
    if (j == 0) continue;
    const double w = center + j * plateau_step;
    const SidebandResponse p = solver.respond(w);
    if (p.singular || p.degenerate) continue;
    acc += std::norm(p.g_s) / std::norm(linear_response(modes, w));
    ++count;
  }
  out.plateau_db = count ? 10.0 * std::log10(acc / count) : nan;
  return out;
}

GainBandwidth gain_bandwidth(const GainProfile& profile) {
  const auto& pts = profile.points;
  std::size_t peak = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].degenerate || pts[i].singular || !std::isfinite(pts[i].gain_db)) continue;
    if (peak == pts.size() || pts[i].gain_db > pts[peak].gain_db) peak = i;
  }
  if (peak == pts.size()) throw Error("window", "profile has no usable points");
  GainBandwidth gb;
  gb.peak_db = pts[peak].gain_db;
  gb.peak_gain = std::pow(10.0, gb.peak_db / 20.0);
  gb.peak_omega = pts[peak].omega_s;
  const double half = std::pow(10.0, gb.peak_db / 10.0) / 2.0;
  auto lin = [&](std::size_t i) { return std::pow(10.0, pts[i].gain_db / 10.0); };
  auto usable = [&](std::size_t i) {
    return !pts[i].degenerate && !pts[i].singular && std::isfinite(pts[i].gain_db);
  };
  auto crossing = [&](std::size_t inner, std::size_t outer) {
    const double a = lin(inner);
    const double b = lin(outer);
    const double t = (a - half) / (a - b);
    return pts[inner].omega_s + t * (pts[outer].omega_s - pts[inner].omega_s);
  };

  bool found_lo = false;
  for (std::size_t i = peak, prev = peak; i-- > 0;) {
    if (!usable(i)) continue;
    if (lin(i) <= half) {
      gb.lower_edge = crossing(prev, i);
      found_lo = true;
      break;
    }
    prev = i;
  }
  bool found_hi = false;
  for (std::size_t i = peak + 1, prev = peak; i < pts.size(); ++i) {
    if (!usable(i)) continue;
    if (lin(i) <= half) {
      gb.upper_edge = crossing(prev, i);
      found_hi = true;
      break;
    }
    prev = i;
  }
  if (!found_lo || !found_hi)
    throw Error("window", "no 3 dB crossing inside the sweep window; widen the sweep");
  gb.bandwidth = gb.upper_edge - gb.lower_edge;
  gb.product = gb.peak_gain * gb.bandwidth;
  return gb;
}

PeakGain peak_gain(const SidebandSolver& solver, const ModeSet& modes, double lo, double hi,
                   int coarse_points) {
  if (!(hi > lo) || coarse_points < 3) throw Error("domain", "invalid peak search window");
  auto db = [&](double w) {
    const SidebandResponse r = solver.respond(w);
    if (r.singular) return std::numeric_limits<double>::infinity();
    return -relative_gain_db(r.g_s, modes, w);
  };
  const double step = (hi - lo) / (coarse_points - 1);
  int best = 0;
  double best_val = db(lo);
  for (int i = 1; i < coarse_points; ++i) {
    const double v = db(lo + i * step);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double a = lo + std::max(0, best - 1) * step;
  const double b = lo + std::min(coarse_points - 1, best + 1) * step;
  const auto [w, v] = boost::math::tools::brent_find_minima(db, a, b, 40);
  PeakGain p;
  if (v < best_val) {
    p.omega = w;
    p.gain_db = -v;
  } else {
    p.omega = lo + best * step;
    p.gain_db = -best_val;
  }
  return p;
}

}  // namespace respa
