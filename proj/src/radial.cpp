#include "lef/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "lef/errors.hpp"

namespace lef {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Integration in s = log r starts here with the regular series at the origin.
constexpr double kBallStart = -20.0;
constexpr double kBallSampleStart = -12.0;
// A zero must appear before log r reaches this value.
constexpr double kMaxLogRadius = 1000.0;

using State = std::array<double, 2>;  // (u, u_s)

struct LaneEmdenLog {
  double p;
  void operator()(const State& y, State& dy, double s) const {
    dy[0] = y[1];
    // Saturate so that trial stages far off the trajectory produce a large
    // error estimate and a rejected step instead of inf/NaN.
    double rate = std::exp(2.0 * s) * std::pow(std::abs(y[0]), p - 1.0);
    if (!(rate < 1e200)) rate = 1e200;
    dy[1] = -rate * y[0];
  }
};

struct RunResult {
  std::vector<double> zeros;
  State end{};
  double end_s = 0.0;
  double max_u = 0.0;
  bool overflow = false;  // the state left the representable range
};

// Integrates from (s0, y0) to s_end, stopping at the `stop_zeros`-th sign
// change of u (0 = never). States at the increasing abscissae `samples` up to
// the stopping point are written to `out`.
RunResult integrate(double p, double s0, State y0, double s_end, int stop_zeros,
                    const RadialOptions& opt, const std::vector<double>* samples = nullptr,
                    std::vector<State>* out = nullptr) {
  const LaneEmdenLog sys{p};
  auto stepper = odeint::make_dense_output(opt.abs_tol, opt.rel_tol,
                                           odeint::runge_kutta_dopri5<State>());
  stepper.initialize(y0, s0, 1e-3);
  RunResult res;
  res.max_u = std::abs(y0[0]);
  std::size_t next_sample = 0;
  State tmp;
  auto emit_until = [&](double upto) {
    if (!samples) return;
    while (next_sample < samples->size() && (*samples)[next_sample] <= upto) {
      stepper.calc_state((*samples)[next_sample], tmp);
      out->push_back(tmp);
      ++next_sample;
    }
  };
  double prev_sign = y0[0] != 0.0 ? std::copysign(1.0, y0[0]) : std::copysign(1.0, y0[1]);
  while (stepper.current_time() < s_end) {
    if (stepper.current_time() + stepper.current_time_step() > s_end)
      stepper.initialize(stepper.current_state(), stepper.current_time(),
                         s_end - stepper.current_time());
    const auto [t0, t1] = stepper.do_step(sys);
    const State& y1 = stepper.current_state();
    if (!std::isfinite(y1[0]) || !std::isfinite(y1[1])) {
      res.overflow = true;
      res.end_s = t0;
      return res;
    }
    res.max_u = std::max(res.max_u, std::abs(y1[0]));
    if (y1[0] != 0.0 && std::copysign(1.0, y1[0]) != prev_sign) {
      double lo = t0, hi = t1;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        stepper.calc_state(mid, tmp);
        if (tmp[0] != 0.0 && std::copysign(1.0, tmp[0]) != prev_sign) hi = mid;
        else lo = mid;
      }
      const double z = 0.5 * (lo + hi);
      res.zeros.push_back(z);
      prev_sign = -prev_sign;
      if (stop_zeros > 0 && static_cast<int>(res.zeros.size()) == stop_zeros) {
        emit_until(z);
        stepper.calc_state(z, res.end);
        res.end_s = z;
        return res;
      }
    }
    emit_until(t1);
  }
  emit_until(s_end);
  res.end = stepper.current_state();
  res.end_s = stepper.current_time();
  return res;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = i + 1 == n ? b : a + (b - a) * i / (n - 1);
  return v;
}

void check_exponent(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("exponent p must be > 1");
}

}  // namespace

double RadialProfile::value_at(double radius) const {
  if (r.empty() || radius < r.front() || radius > r.back()) return 0.0;
  auto it = std::upper_bound(r.begin(), r.end(), radius);
  if (it == r.end()) return u.back();
  const std::size_t k = static_cast<std::size_t>(it - r.begin()) - 1;
  const double h = r[k + 1] - r[k];
  const double t = (radius - r[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * u[k] + (t3 - 2 * t2 + t) * h * du[k] +
         (-2 * t3 + 3 * t2) * u[k + 1] + (t3 - t2) * h * du[k + 1];
}

double RadialProfile::derivative_at(double radius) const {
  if (r.empty() || radius < r.front() || radius > r.back()) return 0.0;
  auto it = std::upper_bound(r.begin(), r.end(), radius);
  if (it == r.end()) return du.back();
  const std::size_t k = static_cast<std::size_t>(it - r.begin()) - 1;
  const double h = r[k + 1] - r[k];
  const double t = (radius - r[k]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * u[k] + (-6 * t2 + 6 * t) * u[k + 1]) / h +
         (3 * t2 - 4 * t + 1) * du[k] + (3 * t2 - 2 * t) * du[k + 1];
}

double RadialProfile::max_value() const {
  return u.empty() ? 0.0 : *std::max_element(u.begin(), u.end());
}

double RadialProfile::argmax() const {
  return u.empty() ? 0.0 : r[static_cast<std::size_t>(std::max_element(u.begin(), u.end()) - u.begin())];
}

RadialProfile solve_ball_nodal(double p, double radius, int domains, const RadialOptions& opt) {
  check_exponent(p);
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  if (domains < 1) throw std::invalid_argument("need at least one nodal domain");
  if (opt.samples < 8) throw std::invalid_argument("too few radial samples");

  const double r0 = std::exp(kBallStart);
  const State y0{1.0 - r0 * r0 / 4.0, -r0 * r0 / 2.0};
  const RunResult first = integrate(p, kBallStart, y0, kMaxLogRadius, domains, opt);
  if (static_cast<int>(first.zeros.size()) < domains)
    throw SolverError("radial ODE: zero number " + std::to_string(domains) +
                      " not found before log r = " + std::to_string(kMaxLogRadius));
  const double s_zero = first.zeros.back();

  const double s_lo = std::min(kBallSampleStart, s_zero - 10.0);
  auto s = linspace(s_lo, s_zero, opt.samples - 1);
  std::vector<State> states;
  states.reserve(s.size());
  integrate(p, kBallStart, y0, kMaxLogRadius, domains, opt, &s, &states);
  if (states.size() != s.size()) throw SolverError("radial ODE: resampling pass diverged");

  // u_R(r) = lam^{2/(p-1)} u(lam r) with lam = e^{s_zero} / R.
  const double log_lam = s_zero - std::log(radius);
  const double amp = std::exp(2.0 * log_lam / (p - 1.0));
  RadialProfile prof;
  prof.p = p;
  prof.r_in = 0.0;
  prof.r_out = radius;
  prof.r.reserve(opt.samples);
  prof.r.push_back(0.0);
  prof.u.push_back(amp);
  prof.du.push_back(0.0);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double rr = k + 1 == s.size() ? radius : radius * std::exp(s[k] - s_zero);
    prof.r.push_back(rr);
    prof.u.push_back(k + 1 == s.size() ? 0.0 : amp * states[k][0]);
    prof.du.push_back(amp * states[k][1] / rr);
  }
  return prof;
}

RadialProfile solve_ball(double p, double radius, const RadialOptions& opt) {
  return solve_ball_nodal(p, radius, 1, opt);
}

RadialProfile solve_annulus(double p, double a, double b, const RadialOptions& opt) {
  check_exponent(p);
  if (!(a > 0.0) || !(b > a)) throw std::invalid_argument("annulus requires 0 < a < b");
  const double sa = std::log(a), sb = std::log(b);

  auto shoot = [&](double slope) { return integrate(p, sa, State{0.0, slope}, sb, 1, opt); };
  // Larger slopes reach a zero before b; small ones stay positive. Overflow of
  // |u|^p happens only far past the turning point, so it counts as a zero.
  auto overshoots = [](const RunResult& r) { return r.overflow || !r.zeros.empty(); };
  double lo = 1.0, hi = 1.0;
  RunResult r = shoot(1.0);
  int expansions = 0;
  if (!overshoots(r)) {
    do {
      lo = hi;
      hi *= 2.0;
      if (++expansions > 200) throw SolverError("annulus shooting: no bracket after 200 expansions");
    } while (!overshoots(shoot(hi)));
  } else {
    do {
      hi = lo;
      lo *= 0.5;
      if (++expansions > 200) throw SolverError("annulus shooting: no bracket after 200 expansions");
    } while (overshoots(shoot(lo)));
  }

  RunResult best = shoot(lo);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(best.end[0]) < 1e-10 * best.max_u) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    RunResult m = shoot(mid);
    if (!overshoots(m)) {
      lo = mid;
      best = std::move(m);
    } else {
      hi = mid;
    }
  }
  if (!(std::abs(best.end[0]) < 1e-10 * best.max_u))
    throw SolverError("annulus shooting: |u(b)| = " + std::to_string(std::abs(best.end[0])) +
                      " above tolerance");

  auto s = linspace(sa, sb, opt.samples);
  std::vector<State> states;
  states.reserve(s.size());
  integrate(p, sa, State{0.0, lo}, sb, 0, opt, &s, &states);
  RadialProfile prof;
  prof.p = p;
  prof.r_in = a;
  prof.r_out = b;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double rr = k == 0 ? a : (k + 1 == s.size() ? b : std::exp(s[k]));
    prof.r.push_back(rr);
    prof.u.push_back(states[k][0]);
    prof.du.push_back(states[k][1] / rr);
  }
  return prof;
}

RadialProfile rescale_ball(const RadialProfile& w, double alpha) {
  const double p = w.p;
  if (alpha * p > 600.0)
    throw std::invalid_argument("alpha * p > 600: use scaled_ball_energy instead of pointwise values");
  const double shrink = std::exp(-alpha * p);
  const double amp = std::exp(2.0 * alpha * p / (p - 1.0));
  RadialProfile out = w;
  out.r_in = w.r_in * shrink;
  out.r_out = w.r_out * shrink;
  for (std::size_t k = 0; k < w.size(); ++k) {
    out.r[k] = w.r[k] * shrink;
    out.u[k] = amp * w.u[k];
    out.du[k] = amp * w.du[k] / shrink;
  }
  return out;
}

RadialProfile build_ball_solution_scaled(double p, double alpha, const RadialOptions& opt) {
  if (alpha < 0.0) throw std::invalid_argument("alpha must be nonnegative");
  if (alpha * p > 600.0)
    throw std::invalid_argument("alpha * p > 600: amplitude e^{2 alpha p/(p-1)} would overflow");
  return rescale_ball(solve_ball(p, 1.0, opt), alpha);
}

RadialProfile omega_test_function(double p, double alpha, double b, int samples) {
  if (!(alpha > 0.0) || !(b > 0.0)) throw std::invalid_argument("omega test function needs alpha, b > 0");
  const double ap = alpha * p;
  const double log_b = std::log(b);
  if (!(-ap < log_b)) throw std::invalid_argument("omega test function needs e^{-alpha p} < b");
  if (samples < 5) throw std::invalid_argument("too few samples");
  const double scale = 2.0 / (ap + log_b);
  const double s_break = 0.5 * (log_b - ap);
  const int half = samples / 2 + 1;
  auto inner = linspace(-ap, s_break, half);
  auto outer = linspace(s_break, log_b, samples - half + 1);

  RadialProfile prof;
  prof.p = p;
  prof.r_in = std::exp(-ap);
  prof.r_out = b;
  for (double s : inner) {
    const double rr = std::exp(s);
    prof.r.push_back(rr);
    prof.u.push_back(scale * (ap + s));
    prof.du.push_back(scale / rr);
  }
  // The break radius is stored twice, once per one-sided derivative.
  for (std::size_t k = 0; k < outer.size(); ++k) {
    const double s = outer[k];
    const double rr = k == 0 ? prof.r.back() : (k + 1 == outer.size() ? b : std::exp(s));
    prof.r.push_back(rr);
    prof.u.push_back(scale * (log_b - s));
    prof.du.push_back(-scale / rr);
  }
  prof.r.front() = prof.r_in;
  return prof;
}

double simpson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
  double total = 0.0;
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double h0 = x[i + 1] - x[i], h1 = x[i + 2] - x[i + 1];
    const double hs = h0 + h1;
    total += hs / 6.0 *
             ((2.0 - h1 / h0) * y[i] + hs * hs / (h0 * h1) * y[i + 1] + (2.0 - h0 / h1) * y[i + 2]);
  }
  if (i + 1 < n) {
    // Odd number of intervals: quadratic through the last three points.
    const double h0 = x[n - 2] - x[n - 3], h1 = x[n - 1] - x[n - 2];
    total += y[n - 1] * (2 * h1 * h1 + 3 * h0 * h1) / (6 * (h0 + h1)) +
             y[n - 2] * (h1 * h1 + 3 * h0 * h1) / (6 * h0) -
             y[n - 3] * h1 * h1 * h1 / (6 * h0 * (h0 + h1));
  }
  return total;
}

EnergyReport radial_energy(const RadialProfile& prof, double p) {
  // A repeated radius marks a break point carrying both one-sided
  // derivatives; each smooth piece is integrated on its own.
  double grad = 0.0, lp1 = 0.0;
  std::size_t lo = 0;
  const std::size_t n = prof.size();
  for (std::size_t k = 1; k <= n; ++k) {
    if (k < n && prof.r[k] != prof.r[k - 1]) continue;
    std::vector<double> xs, gs, qs;
    for (std::size_t i = lo; i < k; ++i) {
      xs.push_back(prof.r[i]);
      gs.push_back(prof.du[i] * prof.du[i] * prof.r[i]);
      qs.push_back(std::pow(std::abs(prof.u[i]), p + 1.0) * prof.r[i]);
    }
    grad += simpson(xs, gs);
    lp1 += simpson(xs, qs);
    lo = k;
  }
  return EnergyReport::from_norms(kTwoPi * grad, kTwoPi * lp1, p);
}

EnergyReport scaled_ball_energy(const EnergyReport& w, double alpha) {
  const double p = w.exponent_p;
  const double factor = std::exp(4.0 * alpha * p / (p - 1.0));
  // Both norms pick up the same factor: the L^{p+1} term scales as
  // amp^{p+1} e^{-2 alpha p} = e^{4 alpha p/(p-1)}.
  return EnergyReport::from_norms(w.grad_norm_sq * factor, w.lp1_norm_pow * factor, p);
}

double ode_residual(const RadialProfile& prof, double p) {
  const LaneEmdenLog sys{p};
  double worst = 0.0;
  double scale = 0.0;
  for (double v : prof.u) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  for (std::size_t k = 0; k + 1 < prof.size(); ++k) {
    if (prof.r[k] <= 0.0) continue;
    const double s0 = std::log(prof.r[k]), s1 = std::log(prof.r[k + 1]);
    // Integrate the equation for the profile's own amplitude scaling: u_R is a
    // solution of the same equation, so the log-variable system applies.
    State y{prof.u[k], prof.r[k] * prof.du[k]};
    odeint::integrate_adaptive(odeint::make_controlled(1e-15, 1e-13, odeint::runge_kutta_dopri5<State>()),
                               sys, y, s0, s1, (s1 - s0) / 4.0);
    worst = std::max(worst, std::abs(y[0] - prof.u[k + 1]) / scale);
  }
  return worst;
}

ScalarField to_field(const RadialProfile& prof, const GridPtr& grid, double sign) {
  return sample_field(grid, [&](Point x) { return sign * prof.value_at(norm(x)); });
}

}  // namespace lef
