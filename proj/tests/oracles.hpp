#pragma once

// Test-side reference computations. Deliberately naive and written from the
// defining formulas, sharing no code with the library.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using LD = long double;

// Plain bisection in long double; assumes f(lo) and f(hi) differ in sign.
inline double bisect(const std::function<LD(LD)>& f, LD lo, LD hi, int iters = 200) {
  LD flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const LD mid = 0.5L * (lo + hi);
    const LD fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return static_cast<double>(0.5L * (lo + hi));
}

// Composite Simpson with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels % 2 != 0) {
    ++panels;
  }
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) {
    s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return s * h / 3.0;
}

// Positive root of P (x + kappa)^2 = 2 x (x + |kappa + lambda|)^2.
inline double feedback_root(double lambda, double kappa, double power) {
  const LD b = std::fabs(static_cast<LD>(kappa) + lambda);
  auto f = [&](LD x) { return power * (x + kappa) * (x + kappa) - 2 * x * (x + b) * (x + b); };
  LD hi = 1;
  while (f(hi) > 0) {
    hi *= 2;
  }
  return bisect(f, 0, hi);
}

// ARMA(1,1) feedback capacity root x0 in (0,1) from the uncleared equation
// P x^2 = (1 - x^2) (N/D)^2.
inline double kim_root(double phi, double theta, double power) {
  auto sgn = [](LD v) { return static_cast<LD>((v > 0) - (v < 0)); };
  auto f = [&](LD x) {
    LD n, d;
    if (std::fabs(theta) <= 1) {
      const LD s = sgn(static_cast<LD>(phi) - theta);
      n = 1 + s * theta * x;
      d = 1 + s * phi * x;
    } else {
      const LD s = sgn(static_cast<LD>(phi) - 1 / static_cast<LD>(theta));
      n = theta + s * x;
      d = 1 + s * phi * x;
    }
    return power * x * x - (1 - x * x) * (n / d) * (n / d);
  };
  return bisect(f, 0, 1);
}

// OU resolvent kernel straight from the printed formula, long double.
inline LD ou_kernel(LD lam, LD kap, LD s, LD u) {
  const LD a = kap + lam;
  if (a == 0) {
    return kap * (kap * u + 1) / (kap * s + 2);
  }
  const LD c = 2 * kap + lam;
  return (lam * c * c * std::exp(a * u) + lam * lam * c * std::exp(-a * u)) /
         (lam * lam * std::exp(-a * s) - c * c * std::exp(a * s));
}

// Classical fixed-step RK4 for g' = -P g^3 + (P/sqrt2) g^2 + p g + q/sqrt2 and
// (log A)' = P g^2. Returns (g(T), log A(T)).
struct AbelEnd {
  double g;
  double log_a;
};
inline AbelEnd abel_rk4(const std::function<double(double)>& p, const std::function<double(double)>& q,
                        double power, double horizon, int steps) {
  const double r2 = std::numbers::sqrt2;
  auto rhs = [&](double t, double g) {
    return -power * g * g * g + power / r2 * g * g + p(t) * g + q(t) / r2;
  };
  double g = 1.0 / r2;
  double la = 0.5 * std::log(power);
  const double h = horizon / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const double k1 = rhs(t, g);
    const double k2 = rhs(t + h / 2, g + h / 2 * k1);
    const double k3 = rhs(t + h / 2, g + h / 2 * k2);
    const double k4 = rhs(t + h, g + h * k3);
    const double g1 = g + h / 2 * k1, g2 = g + h / 2 * k2, g3 = g + h * k3;
    la += h / 6 * power * (g * g + 2 * g1 * g1 + 2 * g2 * g2 + g3 * g3);
    g += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return {g, la};
}

// Mean and unbiased variance.
struct Moments {
  double mean = 0;
  double var = 0;
};
inline Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) {
    m.mean += x;
  }
  m.mean /= static_cast<double>(v.size());
  for (double x : v) {
    m.var += (x - m.mean) * (x - m.mean);
  }
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

}  // namespace oracle
