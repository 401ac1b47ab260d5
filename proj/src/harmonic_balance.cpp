#include "respa/harmonic_balance.hpp"

#include <cmath>
#include <map>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace respa {

namespace {

using cplx = std::complex<double>;
constexpr cplx I(0.0, 1.0);

Eigen::Index flat(std::size_t m, std::size_t n, std::size_t lines) {
  return static_cast<Eigen::Index>(m * lines + n);
}

}  // namespace

Eigen::VectorXd pack_real(const Eigen::MatrixXcd& a) {
  const Eigen::Index u = a.size();
  Eigen::VectorXd x(2 * u);
  for (Eigen::Index m = 0; m < a.rows(); ++m)
    for (Eigen::Index n = 0; n < a.cols(); ++n) {
      const Eigen::Index k = m * a.cols() + n;
      x(k) = a(m, n).real();
      x(u + k) = a(m, n).imag();
    }
  return x;
}

Eigen::MatrixXcd unpack_real(const Eigen::VectorXd& x, Eigen::Index modes, Eigen::Index lines) {
  const Eigen::Index u = modes * lines;
  Eigen::MatrixXcd a(modes, lines);
  for (Eigen::Index m = 0; m < modes; ++m)
    for (Eigen::Index n = 0; n < lines; ++n) a(m, n) = cplx(x(m * lines + n), x(u + m * lines + n));
  return a;
}

namespace {

double inf_norm(const Eigen::MatrixXcd& r) {
  return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
}

}  // namespace

MixingTable make_mixing_table(const PumpComb& comb) {
  MixingTable table;
  const std::size_t lines = comb.size();
  table.triples.resize(lines);
  std::map<int, int> pos;
  for (std::size_t i = 0; i < lines; ++i) pos[comb.index[i]] = static_cast<int>(i);
  for (std::size_t n = 0; n < lines; ++n)
    for (std::size_t j = 0; j < lines; ++j)
      for (std::size_t k = 0; k < lines; ++k) {
        const int target = comb.index[j] + comb.index[k] - comb.index[n];
        auto it = pos.find(target);
        if (it != pos.end())
          table.triples[n].push_back({static_cast<int>(j), static_cast<int>(k), it->second});
      }
  return table;
}

Eigen::MatrixXcd hb_residual(const ModalSystem& sys, const PumpComb& comb, const MixingTable& table,
                             const Eigen::MatrixXcd& a, double drive_factor) {
  const std::size_t modes = sys.size();
  const std::size_t lines = comb.size();
  Eigen::MatrixXcd r(static_cast<Eigen::Index>(modes), static_cast<Eigen::Index>(lines));
  const double bscale = drive_factor / sys.drive_scale();
  for (std::size_t m = 0; m < modes; ++m) {
    const auto mi = static_cast<Eigen::Index>(m);
    for (std::size_t n = 0; n < lines; ++n) {
      const auto ni = static_cast<Eigen::Index>(n);
      cplx kerr(0.0, 0.0);
      for (const auto& [j, k, l] : table.triples[n])
        for (std::size_t rr = 0; rr < modes; ++rr)
          for (std::size_t p = 0; p < modes; ++p)
            for (std::size_t q = 0; q < modes; ++q) {
              const double g = sys.g(m, rr, p, q);
              if (g == 0.0) continue;
              kerr += g * a(static_cast<Eigen::Index>(p), j) * a(static_cast<Eigen::Index>(q), k) *
                      std::conj(a(static_cast<Eigen::Index>(rr), l));
            }
      r(mi, ni) = sys.linear(m, comb.freq[n]) * a(mi, ni) + I * kerr +
                  sys.sqrt_kc(mi) * comb.drive[n] * bscale;
    }
  }
  return r;
}

Eigen::MatrixXd hb_jacobian(const ModalSystem& sys, const PumpComb& comb, const MixingTable& table,
                            const Eigen::MatrixXcd& a) {
  const std::size_t modes = sys.size();
  const std::size_t lines = comb.size();
  const auto u = static_cast<Eigen::Index>(modes * lines);
  Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(u, u);
  Eigen::MatrixXcd jc = Eigen::MatrixXcd::Zero(u, u);
  for (std::size_t m = 0; m < modes; ++m)
    for (std::size_t n = 0; n < lines; ++n) {
      const Eigen::Index row = flat(m, n, lines);
      jz(row, row) += sys.linear(m, comb.freq[n]);
      for (const auto& [j, k, l] : table.triples[n])
        for (std::size_t rr = 0; rr < modes; ++rr)
          for (std::size_t p = 0; p < modes; ++p)
            for (std::size_t q = 0; q < modes; ++q) {
              const double g = sys.g(m, rr, p, q);
              if (g == 0.0) continue;
              const cplx ap = a(static_cast<Eigen::Index>(p), j);
              const cplx aq = a(static_cast<Eigen::Index>(q), k);
              const cplx ar = std::conj(a(static_cast<Eigen::Index>(rr), l));
              jz(row, flat(p, static_cast<std::size_t>(j), lines)) += I * g * aq * ar;
              jz(row, flat(q, static_cast<std::size_t>(k), lines)) += I * g * ap * ar;
              jc(row, flat(rr, static_cast<std::size_t>(l), lines)) += I * g * ap * aq;
            }
    }
  // dR = jz da + jc conj(da); da = du + i dv.
  Eigen::MatrixXd jr(2 * u, 2 * u);
  const Eigen::MatrixXcd plus = jz + jc;
  const Eigen::MatrixXcd minus = jz - jc;
  jr.topLeftCorner(u, u) = plus.real();
  jr.topRightCorner(u, u) = -minus.imag();
  jr.bottomLeftCorner(u, u) = plus.imag();
  jr.bottomRightCorner(u, u) = minus.real();
  return jr;
}

double min_singular_value(const Eigen::MatrixXd& j) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  const auto& s = svd.singularValues();
  return s.size() ? s(s.size() - 1) : 0.0;
}

NewtonResult newton_solve(const ModalSystem& sys, const PumpComb& comb, const MixingTable& table,
                          Eigen::MatrixXcd a0, double drive_factor, const HbSettings& settings) {
  NewtonResult out;
  out.a = std::move(a0);
  Eigen::MatrixXcd r = hb_residual(sys, comb, table, out.a, drive_factor);
  double norm = inf_norm(r);
  const auto rows = out.a.rows();
  const auto cols = out.a.cols();
  for (int it = 0; it < settings.max_newton; ++it) {
    out.iterations = it;
    if (norm < settings.tol) break;
    const Eigen::MatrixXd j = hb_jacobian(sys, comb, table, out.a);
    const Eigen::VectorXd step = j.partialPivLu().solve(-pack_real(r));
    if (!step.allFinite()) break;
    const Eigen::VectorXd x = pack_real(out.a);
    double lambda = 1.0;
    bool accepted = false;
    const double merit = r.squaredNorm();
    for (int damp = 0; damp < 30; ++damp) {
      Eigen::MatrixXcd trial = unpack_real(x + lambda * step, rows, cols);
      Eigen::MatrixXcd rt = hb_residual(sys, comb, table, trial, drive_factor);
      if (rt.allFinite() && rt.squaredNorm() < merit) {
        out.a = std::move(trial);
        r = std::move(rt);
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    norm = inf_norm(r);
    if (!accepted) break;
  }
  out.residual_norm = norm;
  out.converged = norm < settings.tol && out.a.allFinite();
  return out;
}

namespace {

double zero_power_sigma(const ModalSystem& sys, const PumpComb& comb) {
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < sys.size(); ++m)
    for (double f : comb.freq) s = std::min(s, std::abs(sys.linear(m, f)));
  return s;
}

PumpCombSolution finish(const ModalSystem& sys, const PumpComb& comb, const MixingTable& table,
                        const NewtonResult& nr, const HbSettings& settings) {
  PumpCombSolution sol;
  sol.comb = comb;
  sol.amplitudes = nr.a * sys.amplitude_scale();
  sol.residual_norm = nr.residual_norm;
  sol.converged = nr.converged;
  sol.newton_iterations = nr.iterations;
  sol.zero_power_min_singular_value = zero_power_sigma(sys, comb);
  sol.jacobian_min_singular_value = min_singular_value(hb_jacobian(sys, comb, table, nr.a));
  sol.bifurcated =
      sol.jacobian_min_singular_value < settings.bifurcation_ratio * sol.zero_power_min_singular_value;
  if (!sol.converged) sol.diagnostic = "newton did not reach tolerance";
  return sol;
}

}  // namespace

PumpCombSolution solve_pump_steady_state(const ModalSystem& sys, const PumpComb& comb,
                                         const HbSettings& settings) {
  if (!(settings.tol > 0.0)) throw Error("solver", "tolerance must be positive");
  const MixingTable table = make_mixing_table(comb);
  const auto modes = static_cast<Eigen::Index>(sys.size());
  const auto lines = static_cast<Eigen::Index>(comb.size());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(modes, lines);

  bool any_drive = false;
  for (const auto& b : comb.drive) any_drive = any_drive || std::abs(b) > 0.0;
  if (!any_drive) {
    NewtonResult nr;
    nr.a = a;
    nr.converged = true;
    return finish(sys, comb, table, nr, settings);
  }

  const int steps = std::max(settings.continuation_steps, 20);
  // Power fraction at step k (1..steps), geometric from 10^-decades to 1.
  auto fraction = [&](double k) { return std::pow(10.0, -settings.ramp_decades * (1.0 - k / steps)); };

  double done = 0.0;  // continuation coordinate reached
  double prev_fraction = 0.0;
  NewtonResult last;
  last.a = a;
  last.converged = true;
  int total_iterations = 0;
  while (done < steps) {
    double step = 1.0;
    int depth = 0;
    NewtonResult nr;
    for (;;) {
      const double target = std::min<double>(steps, done + step);
      const double frac = fraction(target);
      Eigen::MatrixXcd guess = last.a;
      if (prev_fraction == 0.0) {
        // Linear response guess for the very first step.
        for (Eigen::Index m = 0; m < modes; ++m)
          for (Eigen::Index n = 0; n < lines; ++n)
            guess(m, n) = -sys.sqrt_kc(m) * comb.drive[static_cast<std::size_t>(n)] *
                          std::sqrt(frac) / sys.drive_scale() /
                          sys.linear(static_cast<std::size_t>(m), comb.freq[static_cast<std::size_t>(n)]);
      }
      nr = newton_solve(sys, comb, table, guess, std::sqrt(frac), settings);
      total_iterations += nr.iterations;
      if (nr.converged) {
        done = target;
        prev_fraction = frac;
        last = nr;
        break;
      }
      if (++depth > settings.max_subdivisions) {
        PumpCombSolution sol = finish(sys, comb, table, last, settings);
        sol.converged = false;
        sol.residual_norm = nr.residual_norm;
        sol.newton_iterations = total_iterations;
        sol.diagnostic = "continuation stalled at power fraction " + std::to_string(prev_fraction);
        return sol;
      }
      step *= 0.5;
    }
  }
  PumpCombSolution sol = finish(sys, comb, table, last, settings);
  sol.newton_iterations = total_iterations;
  return sol;
}

PumpCombSolution solve_pump_steady_state(const ModeSet& modes, const KerrMatrix& kerr,
                                         const PumpComb& comb, const HbSettings& settings) {
  return solve_pump_steady_state(make_modal_system(modes, kerr), comb, settings);
}

PumpCombSolution solve_from(const ModalSystem& sys, const PumpComb& comb,
                            const Eigen::MatrixXcd& initial, const HbSettings& settings) {
  const MixingTable table = make_mixing_table(comb);
  NewtonResult nr = newton_solve(sys, comb, table, initial / sys.amplitude_scale(), 1.0, settings);
  return finish(sys, comb, table, nr, settings);
}

std::vector<SpectrumLine> comb_output_spectrum(const PumpCombSolution& solution, const ModeSet& modes) {
  std::vector<SpectrumLine> out;
  const PumpComb& comb = solution.comb;
  for (std::size_t n = 0; n < comb.size(); ++n) {
    cplx c = comb.drive[n];
    for (std::size_t m = 0; m < modes.size(); ++m)
      c -= std::sqrt(modes[m].kappa_c) * solution.amplitudes(static_cast<Eigen::Index>(m),
                                                             static_cast<Eigen::Index>(n));
    out.push_back({comb.freq[n], std::norm(c), c, comb.index[n]});
  }
  return out;
}

}  // namespace respa
