#include "respa/intermod.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace respa {

namespace {

using cplx = std::complex<double>;
constexpr cplx I(0.0, 1.0);

struct Line {
  double omega;               // rad/s
  Eigen::VectorXcd amp;       // scaled amplitude per mode
};

// Frequencies are integer combinations of the pumps; a millihertz grid keys them exactly.
long long key(double omega) { return std::llround(omega / two_pi * 1e3); }

// sum_{r,p,q} G(m, r, p, q) u_r v_p w_q for every m.
Eigen::VectorXcd contract(const ModalSystem& sys, const Eigen::VectorXcd& u, const Eigen::VectorXcd& v,
                          const Eigen::VectorXcd& w) {
  const std::size_t n = sys.size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
          const double g = sys.g(m, r, p, q);
          if (g != 0.0)
            out(static_cast<Eigen::Index>(m)) += g * u(static_cast<Eigen::Index>(r)) *
                                                 v(static_cast<Eigen::Index>(p)) *
                                                 w(static_cast<Eigen::Index>(q));
        }
  return out;
}

// Accumulates the cubic drive of one ordered line triple into `drives`.
// Sign pattern: 0 = (+,+,+), 1 = (+,+,-), 2 = (+,-,-).
void mix(const ModalSystem& sys, const Line& a, const Line& b, const Line& c, int pattern,
         std::map<long long, std::pair<double, Eigen::VectorXcd>>& drives) {
  double omega = 0.0;
  double weight = 1.0;
  Eigen::VectorXcd term;
  switch (pattern) {
    case 0:
      omega = a.omega + b.omega + c.omega;
      weight = 1.0 / 3.0;
      term = contract(sys, a.amp, b.amp, c.amp);
      break;
    case 1:
      omega = a.omega + b.omega - c.omega;
      term = contract(sys, c.amp.conjugate(), a.amp, b.amp);
      break;
    default:
      omega = a.omega - b.omega - c.omega;
      term = contract(sys, a.amp, b.amp.conjugate(), c.amp.conjugate());
      break;
  }
  if (!(omega > 0.0)) return;
  auto [it, fresh] = drives.try_emplace(key(omega), omega, Eigen::VectorXcd::Zero(term.size()));
  it->second.second += I * weight * term;
}

// Linear response of every mode to the drives; returns lines not in `known`.
std::vector<Line> respond(const ModalSystem& sys,
                          const std::map<long long, std::pair<double, Eigen::VectorXcd>>& drives,
                          const std::map<long long, bool>& known) {
  std::vector<Line> out;
  for (const auto& [k, entry] : drives) {
    if (known.count(k)) continue;
    const auto& [omega, f] = entry;
    Line line{omega, Eigen::VectorXcd(f.size())};
    for (Eigen::Index m = 0; m < f.size(); ++m)
      line.amp(m) = -f(m) / sys.linear(static_cast<std::size_t>(m), omega);
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace

SidebandReport non_rwa_products(const ModalSystem& sys, const ModeSet& modes,
                                const PumpCombSolution& solution, double window, double floor) {
  const PumpComb& comb = solution.comb;
  const Eigen::MatrixXcd a = solution.amplitudes / sys.amplitude_scale();
  std::vector<Line> comb_lines;
  std::map<long long, bool> known;
  for (std::size_t n = 0; n < comb.size(); ++n) {
    comb_lines.push_back({comb.freq[n], a.col(static_cast<Eigen::Index>(n))});
    known[key(comb.freq[n])] = true;
  }

  std::map<long long, std::pair<double, Eigen::VectorXcd>> drives;
  for (const Line& x : comb_lines)
    for (const Line& y : comb_lines)
      for (const Line& z : comb_lines) {
        mix(sys, x, y, z, 0, drives);
        mix(sys, x, y, z, 2, drives);
      }
  const std::vector<Line> first = respond(sys, drives, known);
  for (const Line& l : first) known[key(l.omega)] = true;

  drives.clear();
  for (const Line& s : first)
    for (const Line& y : comb_lines)
      for (const Line& z : comb_lines)
        for (int pattern = 0; pattern < 3; ++pattern) {
          mix(sys, s, y, z, pattern, drives);
          mix(sys, y, s, z, pattern, drives);
          mix(sys, y, z, s, pattern, drives);
        }
  const std::vector<Line> second = respond(sys, drives, known);

  SidebandReport report;
  for (std::size_t n = 0; n < comb.size(); ++n) {
    cplx c = comb.drive[n] / sys.drive_scale();
    for (Eigen::Index m = 0; m < a.rows(); ++m) c -= sys.sqrt_kc(m) * a(m, static_cast<Eigen::Index>(n));
    report.strongest_pump = std::max(report.strongest_pump, std::norm(c) * sys.drive_scale() * sys.drive_scale());
  }
  auto add = [&](const std::vector<Line>& lines, int cascade) {
    for (const Line& l : lines) {
      std::size_t nearest = 0;
      for (std::size_t m = 1; m < modes.size(); ++m)
        if (std::abs(modes[m].omega0 - l.omega) < std::abs(modes[nearest].omega0 - l.omega)) nearest = m;
      if (std::abs(modes[nearest].omega0 - l.omega) > window) continue;
      cplx c(0.0, 0.0);
      for (Eigen::Index m = 0; m < l.amp.size(); ++m) c -= sys.sqrt_kc(m) * l.amp(m);
      const double power = std::norm(c) * sys.drive_scale() * sys.drive_scale();
      if (power <= floor) continue;
      report.lines.push_back({l.omega, power, cascade, nearest});
    }
  };
  add(first, 1);
  add(second, 2);
  std::sort(report.lines.begin(), report.lines.end(),
            [](const Sideband& x, const Sideband& y) { return x.omega < y.omega; });
  return report;
}

}  // namespace respa
