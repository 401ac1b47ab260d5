#include "respa/time_domain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include <boost/numeric/odeint.hpp>

namespace respa {

namespace {

using cplx = std::complex<double>;
using State = std::vector<cplx>;
namespace ode = boost::numeric::odeint;
constexpr cplx I(0.0, 1.0);

// HFT116D flat-top window; sidelobes below -116 dB, zero leakage from
// on-bin tones six or more bins away.
constexpr std::array<double, 6> flat_top = {1.0, 1.9575375, 1.4780705, 0.6367431, 0.1228389, 0.0066288};

struct Tone {
  double offset;  // scaled angular frequency in the rotating frame
  cplx amplitude;  // scaled
};

// Modal equations in scaled units and the rotating frame.
struct Rhs {
  const ModalSystem& sys;
  std::vector<double> detuning;  // (w_m - frame) / rate
  std::vector<Tone> tones;
  double ramp = 0.0;
  // Optional slow envelope multiplying every drive amplitude.
  double (*envelope)(double, const void*) = nullptr;
  const void* envelope_data = nullptr;

  cplx drive(double t) const {
    cplx b(0.0, 0.0);
    for (const Tone& tone : tones) b += tone.amplitude * std::polar(1.0, tone.offset * t);
    double s = 1.0;
    if (ramp > 0.0 && t < ramp) {
      const double x = std::sin(0.5 * std::numbers::pi * t / ramp);
      s = x * x;
    }
    if (envelope) s *= envelope(t, envelope_data);
    return s * b;
  }

  void operator()(const State& a, State& dadt, double t) const {
    const std::size_t n = sys.size();
    const cplx b = drive(t);
    for (std::size_t m = 0; m < n; ++m) {
      cplx kerr(0.0, 0.0);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t p = 0; p < n; ++p)
          for (std::size_t q = 0; q < n; ++q) {
            const double g = sys.g(m, r, p, q);
            if (g != 0.0) kerr += g * std::conj(a[r]) * a[p] * a[q];
          }
      const auto mi = static_cast<Eigen::Index>(m);
      dadt[m] = cplx(-0.5 * sys.kappa(mi), detuning[m]) * a[m] + I * kerr + sys.sqrt_kc(mi) * b;
    }
  }
};

Rhs make_rhs(const ModalSystem& sys, const std::vector<DriveTone>& drives, double frame) {
  Rhs rhs{sys, {}, {}};
  for (double w : sys.omega) rhs.detuning.push_back((w - frame) / sys.rate);
  for (const DriveTone& d : drives)
    rhs.tones.push_back({(d.omega - frame) / sys.rate, d.amplitude() / sys.drive_scale()});
  return rhs;
}

double window_weight(std::size_t n, std::size_t count) {
  double w = 0.0;
  for (std::size_t k = 0; k < flat_top.size(); ++k) {
    const double sign = (k % 2) ? -1.0 : 1.0;
    w += sign * flat_top[k] * std::cos(two_pi * static_cast<double>(k * n) / static_cast<double>(count));
  }
  return w;
}

// Walks a dense-output stepper forward and hands back states at requested times.
class Stepper {
 public:
  Stepper(const Rhs& rhs, State x0, const TimeDomainSettings& s)
      : rhs_(rhs), min_step_(s.min_step),
        stepper_(ode::make_dense_output(s.abs_tol, s.rel_tol, ode::runge_kutta_dopri5<State>())) {
    stepper_.initialize(std::move(x0), 0.0, 1e-2);
    smallest_ = std::numeric_limits<double>::infinity();
  }

  void state_at(double t, State& out) {
    while (stepper_.current_time() < t) {
      const auto [t0, t1] = stepper_.do_step(std::cref(rhs_));
      ++steps_;
      const double h = t1 - t0;
      smallest_ = std::min(smallest_, h);
      if (h < min_step_ || !std::isfinite(std::abs(stepper_.current_state()[0])))
        throw Error("stiff", "integrator step size collapsed at t = " + std::to_string(t1));
    }
    out.resize(stepper_.current_state().size());
    stepper_.calc_state(t, out);
  }

  long steps() const { return steps_; }
  double smallest() const { return smallest_; }

 private:
  const Rhs& rhs_;
  double min_step_;
  ode::dense_output_runge_kutta<ode::controlled_runge_kutta<ode::runge_kutta_dopri5<State>>> stepper_;
  long steps_ = 0;
  double smallest_;
};

}  // namespace

TimeDomainRun integrate(const ModeSet& modes, const KerrMatrix& kerr, const std::vector<DriveTone>& drives,
                        const TimeDomainSettings& settings) {
  if (settings.transient < 20.0) throw Error("settings", "transient must cover at least 20 / kappa");
  if (settings.periods < 1 || settings.samples_per_period < 8) throw Error("settings", "invalid record layout");
  for (const auto& d : drives) d.validate();
  const ModalSystem sys = make_modal_system(modes, kerr);
  const std::size_t n = sys.size();

  TimeDomainRun run;
  run.settings = settings;
  run.drives = drives;
  run.rate = sys.rate;
  run.energy = sys.energy;
  if (settings.frame_omega > 0.0) {
    run.frame_omega = settings.frame_omega;
  } else if (!drives.empty()) {
    double lo = drives.front().omega, hi = lo;
    for (const auto& d : drives) {
      lo = std::min(lo, d.omega);
      hi = std::max(hi, d.omega);
    }
    run.frame_omega = 0.5 * (lo + hi);
  } else {
    double acc = 0.0;
    for (double w : sys.omega) acc += w;
    run.frame_omega = acc / static_cast<double>(n);
  }

  Rhs rhs = make_rhs(sys, drives, run.frame_omega);
  rhs.ramp = settings.ramp;

  double fastest = 0.0;
  double slowest = std::numeric_limits<double>::infinity();
  for (const Tone& t : rhs.tones)
    if (t.offset != 0.0) {
      fastest = std::max(fastest, std::abs(t.offset));
      slowest = std::min(slowest, std::abs(t.offset));
    }
  for (double d : rhs.detuning) fastest = std::max(fastest, std::abs(d));
  const double beat = settings.beat > 0.0 ? settings.beat / sys.rate : (std::isfinite(slowest) ? slowest : 1.0);
  fastest = std::max({fastest, beat, 1.0});
  const double record = settings.periods * two_pi / beat;
  const auto count = static_cast<std::size_t>(
      std::ceil(record * fastest * settings.samples_per_period / two_pi));
  const double dt = record / static_cast<double>(count);

  State x(n, cplx(0.0, 0.0));
  if (settings.initial.size() == static_cast<Eigen::Index>(n))
    for (std::size_t m = 0; m < n; ++m) x[m] = settings.initial(static_cast<Eigen::Index>(m)) / sys.amplitude_scale();

  Stepper stepper(rhs, x, settings);

  run.time.resize(count);
  run.amplitudes.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(n));
  run.output.resize(static_cast<Eigen::Index>(count));
  State a;
  for (std::size_t s = 0; s < count; ++s) {
    const double t = settings.transient + dt * static_cast<double>(s);
    stepper.state_at(t, a);
    const auto si = static_cast<Eigen::Index>(s);
    run.time[s] = t / sys.rate;
    cplx out = rhs.drive(t);
    for (std::size_t m = 0; m < n; ++m) {
      run.amplitudes(si, static_cast<Eigen::Index>(m)) = a[m] * sys.amplitude_scale();
      out -= sys.sqrt_kc(static_cast<Eigen::Index>(m)) * a[m];
    }
    run.output(si) = out * sys.drive_scale();
  }
  run.steps = stepper.steps();
  run.smallest_step = stepper.smallest() / sys.rate;

  const std::size_t half = count / 2;
  double first = 0.0, second = 0.0;
  for (std::size_t s = 0; s < 2 * half; ++s) {
    const double e = run.amplitudes.row(static_cast<Eigen::Index>(s)).squaredNorm();
    (s < half ? first : second) += e;
  }
  const double scale = std::max({first, second, 1e-300});
  run.energy_trend = (second - first) / scale;
  run.settled = std::abs(run.energy_trend) < settings.settle_tol;
  return run;
}

std::complex<double> windowed_projection(const Eigen::VectorXcd& samples, double dt, double offset) {
  const auto count = static_cast<std::size_t>(samples.size());
  cplx acc(0.0, 0.0);
  double norm = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    const double w = window_weight(s, count);
    acc += w * samples(static_cast<Eigen::Index>(s)) * std::polar(1.0, -offset * dt * static_cast<double>(s));
    norm += w;
  }
  return norm > 0.0 ? acc / norm : cplx(0.0, 0.0);
}

namespace {

cplx checked_projection(const TimeDomainRun& run, const Eigen::VectorXcd& samples, double omega) {
  if (run.time.size() < 2) throw Error("run", "empty time-domain record");
  const double dt = run.time[1] - run.time[0];
  const double offset = omega - run.frame_omega;
  const double bin = two_pi / (dt * static_cast<double>(run.time.size()));
  if (std::abs(offset) * dt > std::numbers::pi) throw Error("band", "frequency outside the recorded band");
  // Phase referenced to the start of the integration, as in the steady-state solvers.
  const cplx center = windowed_projection(samples, dt, offset) * std::polar(1.0, -offset * run.time.front());
  for (int j = 1; j <= 3; ++j)
    for (int sign : {-1, 1}) {
      const cplx side = windowed_projection(samples, dt, offset + sign * j * bin);
      if (std::abs(side) > std::abs(center) * (1.0 + 1e-6) && std::abs(side) > 1e-300)
        throw Error("resolution", "a stronger component lies within three bins of the requested frequency");
    }
  return center;
}

}  // namespace

std::complex<double> extract_tone(const TimeDomainRun& run, double omega) {
  return checked_projection(run, run.output, omega);
}

std::complex<double> extract_mode_tone(const TimeDomainRun& run, std::size_t mode, double omega) {
  return checked_projection(run, run.amplitudes.col(static_cast<Eigen::Index>(mode)), omega);
}

void write_trajectory_csv(const TimeDomainRun& run, std::ostream& os) {
  os << "t";
  for (Eigen::Index m = 0; m < run.amplitudes.cols(); ++m) os << ",a" << m << "_re,a" << m << "_im";
  os << '\n';
  char buf[64];
  for (std::size_t s = 0; s < run.time.size(); ++s) {
    std::snprintf(buf, sizeof buf, "%.17g", run.time[s]);
    os << buf;
    for (Eigen::Index m = 0; m < run.amplitudes.cols(); ++m) {
      const cplx a = run.amplitudes(static_cast<Eigen::Index>(s), m);
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", a.real(), a.imag());
      os << buf;
    }
    os << '\n';
  }
}

namespace {

struct Ramp {
  double t0, t_top, t_end;  // scaled times: start of up ramp, top, end of down ramp
  double lo, hi;            // power fractions relative to the tone power
};

double ramp_envelope(double t, const void* data) {
  const auto& r = *static_cast<const Ramp*>(data);
  double p = r.lo;
  if (t >= r.t0 && t < r.t_top) p = r.lo + (r.hi - r.lo) * (t - r.t0) / (r.t_top - r.t0);
  else if (t >= r.t_top && t < r.t_end) p = r.hi - (r.hi - r.lo) * (t - r.t_top) / (r.t_end - r.t_top);
  else if (t >= r.t_end) p = r.lo;
  return std::sqrt(p);
}

}  // namespace

HysteresisSweep hysteresis_sweep(const ModeSet& modes, const KerrMatrix& kerr, const DriveTone& drive,
                                 double power_lo, double power_hi, double ramp_time, std::size_t mode,
                                 const TimeDomainSettings& settings) {
  if (!(power_hi > power_lo) || !(power_lo >= 0.0)) throw Error("settings", "invalid power range");
  const ModalSystem sys = make_modal_system(modes, kerr);
  DriveTone unit = drive;
  unit.power_in = 1.0;
  Rhs rhs = make_rhs(sys, {unit}, drive.omega);
  rhs.ramp = settings.ramp;
  const double ramp = ramp_time * sys.rate;
  Ramp r{settings.transient, settings.transient + ramp, settings.transient + 2.0 * ramp, power_lo, power_hi};
  rhs.envelope = ramp_envelope;
  rhs.envelope_data = &r;

  Stepper stepper(rhs, State(sys.size(), cplx(0.0, 0.0)), settings);
  HysteresisSweep out;
  constexpr int samples = 4000;
  State a;
  for (int s = 0; s <= 2 * samples; ++s) {
    const double t = r.t0 + 2.0 * ramp * s / (2.0 * samples);
    stepper.state_at(t, a);
    const double e = std::norm(a[mode]) * sys.energy;
    const double env = ramp_envelope(t, &r);
    const double p = env * env;
    if (s <= samples) {
      out.power_up.push_back(p);
      out.energy_up.push_back(e);
    } else {
      out.power_down.push_back(p);
      out.energy_down.push_back(e);
    }
  }
  double best_up = 0.0, best_down = 0.0;
  for (std::size_t i = 1; i < out.energy_up.size(); ++i)
    if (out.energy_up[i] - out.energy_up[i - 1] > best_up) {
      best_up = out.energy_up[i] - out.energy_up[i - 1];
      out.jump_up = 0.5 * (out.power_up[i] + out.power_up[i - 1]);
    }
  for (std::size_t i = 1; i < out.energy_down.size(); ++i)
    if (out.energy_down[i - 1] - out.energy_down[i] > best_down) {
      best_down = out.energy_down[i - 1] - out.energy_down[i];
      out.jump_down = 0.5 * (out.power_down[i] + out.power_down[i - 1]);
    }
  const double resolution = 2.0 * (power_hi - power_lo) / samples;
  out.bistable = out.jump_up - out.jump_down > resolution;
  return out;
}

}  // namespace respa
