#include "oucap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oucap/errors.hpp"
#include "oucap/roots.hpp"

namespace oucap {

int sgn(double v) noexcept {
  return (v > 0.0) - (v < 0.0);
}

double feedback_cubic(const ChannelParams& params, double x) noexcept {
  const double k = params.kappa();
  const double b = std::abs(params.kappa() + params.lambda());
  return params.power() * (x + k) * (x + k) - 2.0 * x * (x + b) * (x + b);
}

CapacityResult feedback_capacity_closed_form(const ChannelParams& params) {
  CapacityResult result;
  result.route = Route::ClosedForm;
  const double P = params.power();
  if (params.regime() == Regime::WhiteEquivalent) {
    result.value = P / 2.0;
    return result;
  }
  if (P == 0.0) {
    return result;
  }

  auto f = [&](double x) { return feedback_cubic(params, x); };
  double hi = 10.0 * std::max({P, params.kappa(), 1.0});
  for (int expansions = 0; f(hi) > 0.0; ++expansions) {
    if (expansions == 64) {
      throw RootNotBracketed("feedback cubic stayed positive after bracket expansion");
    }
    hi *= 2.0;
  }
  result.value = bracketed_root(f, 0.0, hi);
  result.residual = std::abs(f(result.value));
  return result;
}

void validate(const ArmaParams& arma) {
  if (!(std::abs(arma.phi) < 1.0)) {
    std::ostringstream msg;
    msg << "ARMA(1,1) requires |phi| < 1 (got phi=" << arma.phi << ")";
    throw InvalidArma(msg.str());
  }
  if (!std::isfinite(arma.theta)) {
    throw InvalidArma("ARMA(1,1) theta must be finite");
  }
  if (!std::isfinite(arma.power) || !(arma.power >= 0.0)) {
    throw InvalidArma("ARMA(1,1) power must be >= 0");
  }
}

double kim_quartic(const ArmaParams& arma, double x) noexcept {
  const double phi = arma.phi;
  const double theta = arma.theta;
  double numer = 0.0;
  double denom = 0.0;
  if (std::abs(theta) <= 1.0) {
    const int s = sgn(phi - theta);
    numer = 1.0 + s * theta * x;
    denom = 1.0 + s * phi * x;
  } else {
    const int s = sgn(phi - 1.0 / theta);
    numer = theta + s * x;
    denom = 1.0 + s * phi * x;
  }
  return arma.power * x * x * denom * denom - (1.0 - x) * (1.0 + x) * numer * numer;
}

KimSolution solve_kim_quartic(const ArmaParams& arma) {
  validate(arma);
  KimSolution out;
  if (arma.power == 0.0) {
    return out;
  }
  out.x0 = bracketed_root([&](double x) { return kim_quartic(arma, x); }, 0.0, 1.0);
  out.capacity = -std::log(out.x0);
  return out;
}

ArmaParams arma_from_step(const ChannelParams& params, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw InvalidParams("step size delta must be > 0");
  }
  const double decay = std::exp(-params.kappa() * delta);
  const double ratio = params.lambda() / params.kappa();
  return ArmaParams{-decay, ratio - (ratio + 1.0) * decay, params.power() * delta};
}

DeltaSweep discrete_limit_sweep(const ChannelParams& params, std::span<const double> deltas) {
  if (deltas.empty()) {
    throw InvalidParams("delta sweep needs at least one step size");
  }
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0) || (i > 0 && !(deltas[i] < deltas[i - 1]))) {
      throw InvalidParams("delta sweep must be positive and strictly decreasing");
    }
  }
  DeltaSweep sweep;
  sweep.deltas.assign(deltas.begin(), deltas.end());
  sweep.rates.reserve(deltas.size());
  for (const double delta : deltas) {
    sweep.rates.push_back(solve_kim_quartic(arma_from_step(params, delta)).capacity / delta);
  }
  const std::size_t n = sweep.rates.size();
  if (n == 1) {
    sweep.extrapolated = sweep.rates.back();
  } else {
    const double d1 = sweep.deltas[n - 2];
    const double d2 = sweep.deltas[n - 1];
    sweep.extrapolated = (d1 * sweep.rates[n - 1] - d2 * sweep.rates[n - 2]) / (d1 - d2);
  }
  return sweep;
}

std::vector<double> geometric_deltas(double first, double last, std::size_t count) {
  if (!(first > last) || !(last > 0.0) || count < 2) {
    throw InvalidParams("geometric_deltas needs first > last > 0 and count >= 2");
  }
  std::vector<double> out(count);
  const double ratio = std::log(last / first) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = first * std::exp(ratio * static_cast<double>(i));
  }
  out.front() = first;
  out.back() = last;
  return out;
}

CapacityResult discrete_limit_capacity(const DeltaSweep& sweep) {
  CapacityResult result;
  result.route = Route::DiscreteLimit;
  result.value = sweep.rates.back();
  result.residual = std::abs(sweep.extrapolated - sweep.rates.back());
  return result;
}

}  // namespace oucap
