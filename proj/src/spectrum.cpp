#include "oucap/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "oucap/errors.hpp"
#include "oucap/roots.hpp"

namespace oucap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kQuadTol = 1e-12;

// Integrates f on [a, b]; tanh-sinh when f blows up at an endpoint.
template <class F>
double integrate(F f, double a, double b, bool singular_end) {
  if (!(b > a)) {
    return 0.0;
  }
  if (singular_end) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b, kQuadTol);
  }
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, kQuadTol);
}

// Piece [a, b] of the axis, split at 0 when the noise density vanishes there.
template <class F>
double integrate_axis(F f, double a, double b, bool zero_at_origin) {
  if (!zero_at_origin || b <= 0.0 || a >= 0.0) {
    const bool singular = zero_at_origin && (a == 0.0 || b == 0.0);
    return integrate(f, a, b, singular);
  }
  return integrate(f, a, 0.0, true) + integrate(f, 0.0, b, true);
}

// log S_z without underflow near the zero of S_z at the origin.
double log_sdf(const ChannelParams& params, double x) {
  const double k = params.kappa();
  const double b = params.kappa() + params.lambda();
  const double num = b == 0.0 ? 2.0 * std::log(std::abs(x)) : std::log(x * x + b * b);
  return num - std::log(x * x + k * k) - std::log(kTwoPi);
}

// log(1 + s / S_z(x)).
double log1p_snr(const ChannelParams& params, double s, double x) {
  const double ls = log_sdf(params, x);
  const double ratio = s * std::exp(-ls);
  return std::isfinite(ratio) ? std::log1p(ratio) : std::log(s) - ls;
}

bool sdf_vanishes_at_origin(const ChannelParams& params) {
  return params.kappa() + params.lambda() == 0.0;
}

// int_0^X S_z.
double sdf_antiderivative(const ChannelParams& params, double x) {
  const double k = params.kappa();
  const double b = params.kappa() + params.lambda();
  return (x + (b * b - k * k) / k * std::atan(x / k)) / kTwoPi;
}

struct FilledSet {
  double x1 = 0.0;
  double x2 = 0.0;
};

// {x in [0, W] : S_z(x) <= A} as an interval.
FilledSet filled_set(const ChannelParams& params, double band, double level) {
  const double k = params.kappa();
  const double b = std::abs(params.kappa() + params.lambda());
  const double c = kTwoPi * level;
  FilledSet s;
  if (b < k) {
    if (c >= 1.0) {
      s.x2 = band;
    } else {
      const double num = c * k * k - b * b;
      s.x2 = num <= 0.0 ? 0.0 : std::min(band, std::sqrt(num / (1.0 - c)));
    }
  } else if (b > k) {
    s.x2 = band;
    if (c <= 1.0) {
      s.x1 = band;
    } else {
      const double num = b * b - c * k * k;
      s.x1 = num <= 0.0 ? 0.0 : std::min(band, std::sqrt(num / (c - 1.0)));
    }
  } else {
    s.x2 = c >= 1.0 ? band : 0.0;
  }
  return s;
}

}  // namespace

void InputSpectrum::add(SpectralBand band) {
  if (!(band.hi > band.lo) || !std::isfinite(band.lo) || !std::isfinite(band.hi)) {
    throw InvalidParams("spectral band needs lo < hi, both finite");
  }
  if (!(band.density >= 0.0) || !std::isfinite(band.density)) {
    throw InvalidParams("spectral density must be finite and >= 0");
  }
  for (const auto& other : bands_) {
    if (band.lo < other.hi && other.lo < band.hi) {
      throw InvalidParams("spectral bands overlap");
    }
  }
  bands_.push_back(band);
}

double InputSpectrum::total_power() const noexcept {
  double p = 0.0;
  for (const auto& b : bands_) {
    p += (b.hi - b.lo) * b.density;
  }
  return p;
}

InputSpectrum InputSpectrum::flat_two_sided(double n, double k, double power) {
  if (!(n > 0.0) || !(k >= 0.0) || !(power >= 0.0)) {
    throw InvalidParams("flat input needs n > 0, k >= 0, power >= 0");
  }
  InputSpectrum s;
  s.add({-n / 2.0 - k, -k, power / n});
  s.add({k, n / 2.0 + k, power / n});
  return s;
}

double pinsker_rate(const InputSpectrum& input, const ChannelParams& params) {
  const bool zero = sdf_vanishes_at_origin(params);
  double total = 0.0;
  for (const auto& band : input.bands()) {
    if (band.density == 0.0) {
      continue;
    }
    auto f = [&](double x) { return log1p_snr(params, band.density, x); };
    total += integrate_axis(f, band.lo, band.hi, zero);
  }
  const double rate = total / (4.0 * std::numbers::pi);
  if (!std::isfinite(rate)) {
    throw DegenerateNoise("rate integral is not finite");
  }
  return rate;
}

double flat_input_limit(double n, double power) {
  return n / (4.0 * std::numbers::pi) * std::log1p(kTwoPi * power / n);
}

std::vector<FlatSweepRow> flat_input_limit_sweep(const ChannelParams& params,
                                                 std::span<const double> n_values,
                                                 std::span<const double> k_values) {
  std::vector<FlatSweepRow> rows;
  rows.reserve(n_values.size() * k_values.size());
  const double P = params.power();
  for (const double n : n_values) {
    const double limit = flat_input_limit(n, P);
    for (const double k : k_values) {
      rows.push_back({n, k, pinsker_rate(InputSpectrum::flat_two_sided(n, k, P), params), limit});
    }
  }
  return rows;
}

double waterfill_power(const ChannelParams& params, double band, double level) {
  const FilledSet s = filled_set(params, band, level);
  if (!(s.x2 > s.x1)) {
    return 0.0;
  }
  const double poured = level * (s.x2 - s.x1) -
                        (sdf_antiderivative(params, s.x2) - sdf_antiderivative(params, s.x1));
  return 2.0 * std::max(poured, 0.0);
}

WaterFill waterfill_bandlimited(const ChannelParams& params, double band, double power) {
  if (!(band > 0.0) || !std::isfinite(band)) {
    throw InvalidParams("band W must be > 0");
  }
  if (!(power >= 0.0) || !std::isfinite(power)) {
    throw InvalidParams("power must be >= 0");
  }
  const double s0 = noise_sdf(params, 0.0);
  const double sw = noise_sdf(params, band);
  const double lo = std::min(s0, sw);
  const double hi = lo + power / (2.0 * band) + std::max(s0, sw);

  WaterFill out;
  out.level = lo;
  if (power == 0.0) {
    return out;
  }
  out.level = bracketed_root([&](double a) { return waterfill_power(params, band, a) - power; }, lo, hi);
  out.power_used = waterfill_power(params, band, out.level);

  const FilledSet s = filled_set(params, band, out.level);
  const double log_level = std::log(out.level);
  auto f = [&](double x) { return std::max(log_level - log_sdf(params, x), 0.0); };
  const bool singular = sdf_vanishes_at_origin(params) && s.x1 == 0.0;
  out.rate = 2.0 * integrate(f, s.x1, s.x2, singular) / (4.0 * std::numbers::pi);
  return out;
}

double p_max(const ChannelParams& params) {
  if (params.regime() != Regime::ColoredGain) {
    throw InvalidParams("p_max is defined only for -2 kappa < lambda < 0");
  }
  const double k = params.kappa();
  const double b = params.kappa() + params.lambda();
  return (k * k - b * b) / (2.0 * k);
}

}  // namespace oucap
