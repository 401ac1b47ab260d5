#include "respa/continuation.hpp"

#include <cmath>

#include <Eigen/LU>

namespace respa {

namespace {

struct Augmented {
  const ModalSystem& sys;
  const PumpComb& comb;
  MixingTable table;
  Eigen::Index modes;
  Eigen::Index lines;
  Eigen::VectorXd drive_direction;  // dF/d(lambda), real layout

  Augmented(const ModalSystem& s, const PumpComb& c)
      : sys(s), comb(c), table(make_mixing_table(c)), modes(static_cast<Eigen::Index>(s.size())),
        lines(static_cast<Eigen::Index>(c.size())) {
    Eigen::MatrixXcd d(modes, lines);
    for (Eigen::Index m = 0; m < modes; ++m)
      for (Eigen::Index n = 0; n < lines; ++n)
        d(m, n) = sys.sqrt_kc(m) * comb.drive[static_cast<std::size_t>(n)] / sys.drive_scale();
    drive_direction = pack_real(d);
  }

  Eigen::Index unknowns() const { return 2 * modes * lines; }

  Eigen::VectorXd residual(const Eigen::VectorXd& y) const {
    const Eigen::Index u = unknowns();
    return pack_real(hb_residual(sys, comb, table, unpack_real(y.head(u), modes, lines), y(u)));
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& y) const {
    const Eigen::Index u = unknowns();
    Eigen::MatrixXd j(u, u + 1);
    j.leftCols(u) = hb_jacobian(sys, comb, table, unpack_real(y.head(u), modes, lines));
    j.col(u) = drive_direction;
    return j;
  }

  Eigen::VectorXd tangent(const Eigen::VectorXd& y, const Eigen::VectorXd& previous) const {
    const Eigen::Index u = unknowns();
    Eigen::MatrixXd a(u + 1, u + 1);
    a.topRows(u) = jacobian(y);
    a.row(u) = previous.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(u + 1);
    rhs(u) = 1.0;
    Eigen::VectorXd t = a.fullPivLu().solve(rhs);
    return t / t.norm();
  }

  // Corrector on the hyperplane orthogonal to `t` through `predicted`.
  bool correct(Eigen::VectorXd& y, const Eigen::VectorXd& predicted, const Eigen::VectorXd& t,
               const ArclengthSettings& s) const {
    const Eigen::Index u = unknowns();
    y = predicted;
    for (int it = 0; it < s.max_corrector; ++it) {
      Eigen::VectorXd g(u + 1);
      g.head(u) = residual(y);
      g(u) = t.dot(y - predicted);
      if (!g.allFinite()) return false;
      if (g.head(u).cwiseAbs().maxCoeff() < s.tol && std::abs(g(u)) < s.tol) return true;
      Eigen::MatrixXd a(u + 1, u + 1);
      a.topRows(u) = jacobian(y);
      a.row(u) = t.transpose();
      const Eigen::VectorXd dy = a.partialPivLu().solve(-g);
      if (!dy.allFinite()) return false;
      y += dy;
    }
    return false;
  }

  BranchPoint point(const Eigen::VectorXd& y) const {
    const Eigen::Index u = unknowns();
    BranchPoint p;
    p.drive_factor = y(u);
    p.power_fraction = y(u) * y(u);
    const Eigen::MatrixXcd a = unpack_real(y.head(u), modes, lines);
    p.amplitudes = a * sys.amplitude_scale();
    p.stored_energy = p.amplitudes.squaredNorm();
    p.sigma_min = min_singular_value(hb_jacobian(sys, comb, table, a));
    return p;
  }
};

}  // namespace

PowerBranch trace_power_branch(const ModalSystem& sys, const PumpComb& comb, double max_drive_factor,
                               const ArclengthSettings& settings) {
  Augmented aug(sys, comb);
  const Eigen::Index u = aug.unknowns();
  PowerBranch branch;

  // Start in the linear regime.
  const double lambda0 = 1e-3 * max_drive_factor;
  HbSettings hb;
  hb.tol = settings.tol;
  Eigen::MatrixXcd a0 = Eigen::MatrixXcd::Zero(aug.modes, aug.lines);
  NewtonResult start = newton_solve(sys, comb, aug.table, a0, lambda0, hb);
  if (!start.converged) throw Error("continuation", "could not start branch in the linear regime");

  Eigen::VectorXd y(u + 1);
  y.head(u) = pack_real(start.a);
  y(u) = lambda0;
  Eigen::VectorXd seed = Eigen::VectorXd::Zero(u + 1);
  seed(u) = 1.0;
  Eigen::VectorXd t = aug.tangent(y, seed);
  if (t(u) < 0.0) t = -t;
  branch.points.push_back(aug.point(y));

  double h = settings.initial_step;
  for (int step = 0; step < settings.max_points; ++step) {
    Eigen::VectorXd next;
    if (!aug.correct(next, y + h * t, t, settings)) {
      h *= 0.5;
      if (h < settings.min_step) break;
      --step;
      continue;
    }
    Eigen::VectorXd t_next = aug.tangent(next, t);
    if (t_next.dot(t) < 0.0) t_next = -t_next;

    if (t(u) * t_next(u) < 0.0) {
      // Turning point between y and next: bisect on the step length for t_lambda = 0.
      double lo = 0.0;
      double hi = h;
      Eigen::VectorXd y_fold = next;
      for (int it = 0; it < 60 && hi - lo > 1e-13 * h; ++it) {
        const double mid = 0.5 * (lo + hi);
        Eigen::VectorXd trial;
        if (!aug.correct(trial, y + mid * t, t, settings)) break;
        Eigen::VectorXd tm = aug.tangent(trial, t);
        if (tm.dot(t) < 0.0) tm = -tm;
        if (tm(u) * t(u) > 0.0)
          lo = mid;
        else
          hi = mid;
        y_fold = trial;
      }
      branch.folds.push_back(aug.point(y_fold));
    }

    y = next;
    t = t_next;
    branch.points.push_back(aug.point(y));
    if (y(u) > max_drive_factor || y(u) <= 0.0) break;
    h = std::min(settings.max_step, h * 1.3);
  }
  return branch;
}

}  // namespace respa
