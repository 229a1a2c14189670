#include "oucap/abel_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "oucap/errors.hpp"

namespace oucap {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
constexpr double kRtol = 1e-10;
constexpr double kAtol = 1e-13;
constexpr double kMinStep = 1e-14;

using State = std::array<double, 2>;  // (g, log A)

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

class AbelRhs {
 public:
  explicit AbelRhs(const AbelCoefficients& c) : c_(c) {}

  State operator()(double t, const State& y) const {
    const double g = y[0];
    const double P = c_.power;
    const double dg = -P * g * g * g + P * kInvSqrt2 * g * g + c_.p(t) * g + c_.q(t) * kInvSqrt2;
    return {dg, P * g * g};
  }

 private:
  const AbelCoefficients& c_;
};

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State out = y;
  for (const auto& [w, k] : terms) {
    out[0] += h * w * (*k)[0];
    out[1] += h * w * (*k)[1];
  }
  return out;
}

struct StepResult {
  State y;
  State k7;
  double err;
};

StepResult dp_step(const AbelRhs& f, double t, const State& y, const State& k1, double h) {
  const State k2 = f(t + c2 * h, axpy(y, h, {{a21, &k1}}));
  const State k3 = f(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
  const State k4 = f(t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const State k5 = f(t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const State k6 =
      f(t + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  const State y5 = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const State k7 = f(t + h, y5);
  double err = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double e =
        h * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] + e6 * k6[j] + e7 * k7[j]);
    const double scale = kAtol + kRtol * std::max(std::abs(y[j]), std::abs(y5[j]));
    const double ej = std::abs(e) / scale;
    // std::max would drop a NaN here and accept the step.
    if (!std::isfinite(ej) || !std::isfinite(y5[j])) {
      return {y5, k7, INFINITY};
    }
    err = std::max(err, ej);
  }
  return {y5, k7, err};
}

double interpolate(const std::vector<double>& times, const std::vector<double>& v, double t) {
  if (times.empty()) {
    throw InvalidParams("empty trajectory");
  }
  if (t <= times.front()) {
    return v.front();
  }
  if (t >= times.back()) {
    return v.back();
  }
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
  const double w = (t - times[i]) / (times[i + 1] - times[i]);
  return v[i] + w * (v[i + 1] - v[i]);
}

std::size_t nearest_root(const CubicRoots& roots, double y) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < roots.real.size(); ++i) {
    if (std::abs(roots.real[i] - y) < std::abs(roots.real[best] - y)) {
      best = i;
    }
  }
  return best;
}

constexpr double kWindowTol = 1e-8;

}  // namespace

AbelCoefficients AbelCoefficients::from_kernel(const SeparableKernel& kernel, double power) {
  if (!(power >= 0.0) || !std::isfinite(power)) {
    throw InvalidParams("power must be >= 0");
  }
  AbelCoefficients c;
  c.kernel = kernel;
  c.p = [k = kernel](double t) { return -k.log_deriv(t); };
  c.q = [k = kernel](double t) { return k.ratio(t) + k.log_deriv(t); };
  c.p_limit = -kernel.beta;
  c.q_limit = kernel.alpha + kernel.beta;
  c.power = power;
  return c;
}

AbelCoefficients AbelCoefficients::constant(double p, double q, double power) {
  SeparableKernel k;
  const double amp = q - p;
  k.l_u = [amp, p](double s) { return amp * std::exp(-p * s); };
  k.l_d = [p](double t) { return std::exp(-p * t); };
  k.l_d_prime = [p](double t) { return -p * std::exp(-p * t); };
  k.alpha = amp;
  k.beta = -p;
  k.value = [amp, p](double t, double s) { return amp * std::exp(p * (t - s)); };
  k.log_derivative = [p](double) { return -p; };
  k.log_abs_denominator = [p](double t) { return -p * t; };
  AbelCoefficients c = from_kernel(k, power);
  c.p = [p](double) { return p; };
  c.q = [q](double) { return q; };
  return c;
}

AbelCoefficients AbelCoefficients::ou(const ChannelParams& params) {
  return from_kernel(ou_resolvent_kernel(params), params.power());
}

double limiting_cubic(const AbelCoefficients& c, double y) noexcept {
  return ((-c.power * y + c.power * kInvSqrt2) * y + c.p_limit) * y + c.q_limit * kInvSqrt2;
}

CubicRoots limiting_cubic_roots(const AbelCoefficients& c) {
  if (c.power > 0.0) {
    return solve_real_cubic(-c.power, c.power * kInvSqrt2, c.p_limit, c.q_limit * kInvSqrt2);
  }
  // Without power the equation is linear in the limit.
  CubicRoots out;
  if (c.p_limit != 0.0) {
    out.real = {-c.q_limit * kInvSqrt2 / c.p_limit};
  }
  return out;
}

double OdeTrajectory::g_at(double t) const {
  return interpolate(times, g, t);
}

double OdeTrajectory::log_a_at(double t) const {
  return interpolate(times, log_a, t);
}

OdeTrajectory integrate_abel(const AbelCoefficients& coeffs, double horizon, double step) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidParams("horizon must be > 0");
  }
  if (!(step > 0.0) || step > horizon / 100.0) {
    std::ostringstream msg;
    msg << "step must satisfy 0 < step <= horizon/100 (got step=" << step << ")";
    throw InvalidParams(msg.str());
  }
  if (!(coeffs.power > 0.0)) {
    throw InvalidParams("Abel integration needs power > 0 (log A starts at log sqrt P)");
  }

  const auto intervals = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
  const double dt = horizon / static_cast<double>(intervals);
  const AbelRhs f(coeffs);

  OdeTrajectory traj;
  traj.power = coeffs.power;
  traj.times.resize(intervals + 1);
  traj.g.resize(intervals + 1);
  traj.log_a.resize(intervals + 1);

  State y{kInvSqrt2, 0.5 * std::log(coeffs.power)};
  State k1 = f(0.0, y);
  traj.times[0] = 0.0;
  traj.g[0] = y[0];
  traj.log_a[0] = y[1];

  double h = dt;
  double t = 0.0;
  for (std::size_t i = 1; i <= intervals; ++i) {
    const double t_end = (i == intervals) ? horizon : static_cast<double>(i) * dt;
    while (t < t_end) {
      const double remaining = t_end - t;
      const bool clipped = h >= remaining;
      const double h_try = clipped ? remaining : h;
      const StepResult r = dp_step(f, t, y, k1, h_try);
      if (!std::isfinite(r.err)) {
        h = 0.2 * h_try;
      } else if (r.err <= 1.0) {
        t = clipped ? t_end : t + h_try;
        y = r.y;
        k1 = r.k7;
        const double grow = r.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(r.err, -0.2), 0.2, 5.0);
        // A clipped step says nothing about the step the controller wants.
        h = clipped ? std::max(h, h_try * grow) : h_try * grow;
        h = std::min(h, dt);
        continue;
      } else {
        h = h_try * std::clamp(0.9 * std::pow(r.err, -0.2), 0.2, 1.0);
      }
      if (h < kMinStep) {
        std::ostringstream msg;
        msg << "adaptive step fell below " << kMinStep << " at t=" << t;
        throw StepSizeUnderflow(msg.str());
      }
    }
    traj.times[i] = t_end;
    traj.g[i] = y[0];
    traj.log_a[i] = y[1];
  }

  traj.a.resize(traj.log_a.size());
  std::transform(traj.log_a.begin(), traj.log_a.end(), traj.a.begin(),
                 [](double la) { return std::exp(la); });
  traj.r_limit = traj.g.back();
  traj.limiting_roots = limiting_cubic_roots(coeffs);
  if (!traj.limiting_roots.real.empty()) {
    traj.converged_root_index = nearest_root(traj.limiting_roots, traj.r_limit);
  }
  // Coarse sampling grids inflate the quadrature residual; record it, don't enforce it.
  GainCurve gain = gain_H(traj, coeffs.kernel, std::numeric_limits<double>::infinity());
  traj.h = std::move(gain.h);
  traj.gain_identity_residual = gain.identity_residual;
  return traj;
}

CapacityResult sk_rate_from_ode(const OdeTrajectory& traj) {
  const double g_tail = traj.g_at(0.9 * traj.horizon());
  const double drift = std::abs(traj.r_limit - g_tail);
  if (!(drift < kWindowTol)) {
    std::ostringstream msg;
    msg << "g(t) has not settled: |g(T) - g(0.9T)| = " << drift << " at T=" << traj.horizon();
    throw NotConverged(msg.str());
  }
  CapacityResult out;
  out.route = Route::OdeLimit;
  out.value = traj.power * traj.r_limit * traj.r_limit;
  out.residual = std::abs(out.value - traj.power * g_tail * g_tail);
  return out;
}

double log_gain_rate(const OdeTrajectory& traj) {
  return (traj.log_a.back() - 0.5 * std::log(traj.power)) / traj.horizon();
}

RootCase classify_root_convergence(const AbelCoefficients& coeffs, double horizon) {
  const OdeTrajectory traj = integrate_abel(coeffs, horizon, horizon / 5000.0);
  sk_rate_from_ode(traj);
  RootCase out;
  out.kind = traj.limiting_roots.kind;
  out.roots = traj.limiting_roots.real;
  out.index = traj.converged_root_index;
  out.limit = traj.r_limit;
  return out;
}

GainCurve gain_H(const OdeTrajectory& traj, const SeparableKernel& kernel, double tolerance) {
  const std::size_t n = traj.times.size();
  GainCurve out;
  out.h.resize(n);
  if (n == 0) {
    return out;
  }
  double j = 0.0;
  double prev_log_den = kernel.log_abs_ld(traj.times[0]) + traj.log_a[0];
  auto check = [&](double v, double t) {
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "kernel is not finite at t=" << t;
      throw KernelDomainMismatch(msg.str());
    }
  };
  check(prev_log_den, traj.times[0]);
  out.h[0] = traj.a[0];
  out.identity_residual = std::abs(std::numbers::sqrt2 * traj.g[0] - 1.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double t0 = traj.times[i - 1];
    const double t1 = traj.times[i];
    const double log_den = kernel.log_abs_ld(t1) + traj.log_a[i];
    const double edge = kernel(t1, t0) * std::exp(traj.log_a[i - 1] - traj.log_a[i]);
    const double diag = kernel.ratio(t1);
    check(log_den, t1);
    check(edge, t1);
    check(diag, t1);
    j = j * std::exp(prev_log_den - log_den) + 0.5 * (t1 - t0) * (edge + diag);
    prev_log_den = log_den;
    out.h[i] = traj.a[i] * (1.0 + j);
    out.identity_residual =
        std::max(out.identity_residual, std::abs(std::numbers::sqrt2 * traj.g[i] - 1.0 - j));
  }
  if (!(out.identity_residual <= tolerance)) {
    std::ostringstream msg;
    msg << "kernel does not match the trajectory: identity residual " << out.identity_residual;
    throw KernelDomainMismatch(msg.str());
  }
  return out;
}

std::vector<double> cumulative_h_energy(const OdeTrajectory& traj) {
  std::vector<double> e(traj.h.size(), 0.0);
  for (std::size_t i = 1; i < e.size(); ++i) {
    const double dt = traj.times[i] - traj.times[i - 1];
    e[i] = e[i - 1] + 0.5 * dt * (traj.h[i - 1] * traj.h[i - 1] + traj.h[i] * traj.h[i]);
  }
  return e;
}

std::vector<double> analytic_mmse(const OdeTrajectory& traj) {
  std::vector<double> m = cumulative_h_energy(traj);
  for (double& v : m) {
    v = 1.0 / (1.0 + v);
  }
  return m;
}

}  // namespace oucap
