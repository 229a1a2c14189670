#include "oucap/kernels.hpp"

#include <cmath>
#include <sstream>

#include "oucap/errors.hpp"

namespace oucap {

double SeparableKernel::operator()(double t, double s) const {
  if (s > t) {
    return 0.0;
  }
  if (value) {
    return value(t, s);
  }
  return l_u(s) / l_d(t);
}

double SeparableKernel::ratio(double t) const {
  if (value) {
    return value(t, t);
  }
  return l_u(t) / l_d(t);
}

double SeparableKernel::log_deriv(double t) const {
  if (log_derivative) {
    return log_derivative(t);
  }
  return l_d_prime(t) / l_d(t);
}

double SeparableKernel::log_abs_ld(double t) const {
  if (log_abs_denominator) {
    return log_abs_denominator(t);
  }
  return std::log(std::abs(l_d(t)));
}

SeparableKernel SeparableKernel::scaled(double c) const {
  if (c == 0.0 || !std::isfinite(c)) {
    throw InvalidParams("kernel factorization scale must be finite and nonzero");
  }
  SeparableKernel out;
  out.l_u = [f = l_u, c](double t) { return c * f(t); };
  out.l_d = [f = l_d, c](double t) { return c * f(t); };
  out.l_d_prime = [f = l_d_prime, c](double t) { return c * f(t); };
  out.alpha = alpha;
  out.beta = beta;
  return out;
}

SeparableKernel zero_kernel() {
  SeparableKernel k;
  k.l_u = [](double) { return 0.0; };
  k.l_d = [](double) { return 1.0; };
  k.l_d_prime = [](double) { return 0.0; };
  k.alpha = 0.0;
  k.beta = 0.0;
  return k;
}

SeparableKernel constant_kernel(double c) {
  if (c == 0.0) {
    throw InvalidParams("constant kernel factor must be nonzero");
  }
  SeparableKernel k;
  k.l_u = [c](double) { return c; };
  k.l_d = [c](double) { return c; };
  k.l_d_prime = [](double) { return 0.0; };
  k.alpha = 1.0;
  k.beta = 0.0;
  return k;
}

SeparableKernel ou_resolvent_kernel(const ChannelParams& params) {
  const double lam = params.lambda();
  const double kap = params.kappa();
  const double a = kap + lam;
  const double c = 2.0 * kap + lam;
  SeparableKernel k;

  if (a == 0.0) {
    k.l_u = [kap](double u) { return kap * (kap * u + 1.0); };
    k.l_d = [kap](double s) { return kap * s + 2.0; };
    k.l_d_prime = [kap](double) { return kap; };
    k.alpha = kap;
    k.beta = 0.0;
    return k;
  }

  if (c == 0.0) {
    // Numerator carries (2 kappa + lambda); only lambda^2 e^{kappa s} survives below.
    const double lam2 = lam * lam;
    k.l_u = [](double) { return 0.0; };
    k.l_d = [lam2, kap](double s) { return lam2 * std::exp(kap * s); };
    k.l_d_prime = [lam2, kap](double s) { return kap * lam2 * std::exp(kap * s); };
    k.alpha = 0.0;
    k.beta = kap;
    k.value = [](double, double) { return 0.0; };
    k.log_derivative = [kap](double) { return kap; };
    k.log_abs_denominator = [lam2, kap](double s) { return std::log(lam2) + kap * s; };
    return k;
  }

  const double lam2 = lam * lam;
  const double c2 = c * c;
  k.l_u = [=](double u) { return lam * c2 * std::exp(a * u) + lam2 * c * std::exp(-a * u); };
  k.l_d = [=](double s) { return lam2 * std::exp(-a * s) - c2 * std::exp(a * s); };
  k.l_d_prime = [=](double s) { return -a * lam2 * std::exp(-a * s) - a * c2 * std::exp(a * s); };

  if (a > 0.0) {
    k.alpha = -lam;
    k.beta = a;
    k.value = [=](double t, double s) {
      return (lam * c2 * std::exp(a * (s - t)) + lam2 * c * std::exp(-a * (s + t))) /
             (lam2 * std::exp(-2.0 * a * t) - c2);
    };
    k.log_derivative = [=](double t) {
      const double e = lam2 * std::exp(-2.0 * a * t);
      return -a * (e + c2) / (e - c2);
    };
    k.log_abs_denominator = [=](double t) {
      return a * t + std::log(std::abs(lam2 * std::exp(-2.0 * a * t) - c2));
    };
  } else {
    k.alpha = c;
    k.beta = -a;
    k.value = [=](double t, double s) {
      return (lam * c2 * std::exp(a * (s + t)) + lam2 * c * std::exp(a * (t - s))) /
             (lam2 - c2 * std::exp(2.0 * a * t));
    };
    k.log_derivative = [=](double t) {
      const double e = c2 * std::exp(2.0 * a * t);
      return -a * (lam2 + e) / (lam2 - e);
    };
    k.log_abs_denominator = [=](double t) {
      return -a * t + std::log(std::abs(lam2 - c2 * std::exp(2.0 * a * t)));
    };
  }
  return k;
}

GridKernel::GridKernel(UniformGrid grid) : grid_(grid) {
  if (grid.points < 2 || !(grid.horizon > 0.0)) {
    throw InvalidParams("grid needs at least two points and a positive horizon");
  }
  values_.assign(grid.points * (grid.points + 1) / 2, 0.0);
}

void GridKernel::set(std::size_t i, std::size_t j, double v) {
  if (j > i) {
    throw KernelDomainMismatch("Volterra kernel entries above the diagonal are fixed at zero");
  }
  values_[index(i, j)] = v;
}

GridKernel GridKernel::sample(UniformGrid grid, const std::function<double(double, double)>& fn) {
  GridKernel out(grid);
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double t = grid.at(i);
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = fn(t, grid.at(j));
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "kernel sample is not finite at (" << t << ", " << grid.at(j) << ")";
        throw DegenerateKernel(msg.str());
      }
      out.values_[index(i, j)] = v;
    }
  }
  return out;
}

GridKernel GridKernel::sample(UniformGrid grid, const SeparableKernel& kernel) {
  return sample(grid, [&kernel](double t, double s) { return kernel(t, s); });
}

double resolvent_residual(const GridKernel& h, const GridKernel& l) {
  if (!(h.grid() == l.grid())) {
    throw GridMismatch("resolvent_residual needs both kernels on the same grid");
  }
  const std::size_t n = h.size();
  const double dt = h.grid().step();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double conv = 0.0;
      if (i > j) {
        conv = 0.5 * (h.at(i, j) * l.at(j, j) + h.at(i, i) * l.at(i, j));
        for (std::size_t m = j + 1; m < i; ++m) {
          conv += h.at(i, m) * l.at(m, j);
        }
        conv *= dt;
      }
      worst = std::max(worst, std::abs(h.at(i, j) + l.at(i, j) + conv));
    }
  }
  return worst;
}

GridKernel recover_h_from_l(const GridKernel& l) {
  const std::size_t n = l.size();
  const double dt = l.grid().step();
  GridKernel h(l.grid());
  for (std::size_t j = 0; j < n; ++j) {
    h.set(j, j, -l.at(j, j));
    for (std::size_t i = j + 1; i < n; ++i) {
      double conv = 0.5 * l.at(i, j) * h.at(j, j);
      for (std::size_t m = j + 1; m < i; ++m) {
        conv += l.at(i, m) * h.at(m, j);
      }
      h.set(i, j, (-l.at(i, j) - dt * conv) / (1.0 + 0.5 * dt * l.at(i, i)));
    }
  }
  return h;
}

}  // namespace oucap
