#include "oucap/roots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "oucap/errors.hpp"

namespace oucap {

namespace {

bool bracket_width_ok(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * scale ||
         std::abs(b - a) <= std::numeric_limits<double>::min();
}

}  // namespace

double bracketed_root(const std::function<double(double)>& f, double lo, double hi) {
  if (lo > hi) {
    std::swap(lo, hi);
  }
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) {
    return lo;
  }
  if (fhi == 0.0) {
    return hi;
  }
  if (!std::isfinite(flo) || !std::isfinite(fhi) || (flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream msg;
    msg << "no sign change on [" << lo << ", " << hi << "]: f(lo)=" << flo << ", f(hi)=" << fhi;
    throw RootNotBracketed(msg.str());
  }

  auto tol = [](double a, double b) { return bracket_width_ok(a, b); };
  std::uintmax_t max_iter = 200;
  try {
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
    if (max_iter < 200 || bracket_width_ok(a, b)) {
      return 0.5 * (a + b);
    }
  } catch (const boost::math::evaluation_error&) {
    // fall through to bisection
  }
  std::uintmax_t bisect_iter = 2000;
  const auto [a, b] = boost::math::tools::bisect(f, lo, hi, tol, bisect_iter);
  return 0.5 * (a + b);
}

CubicRoots solve_real_cubic(double a, double b, double c, double d, double disc_tol) {
  if (a == 0.0) {
    throw InvalidParams("leading cubic coefficient is zero");
  }
  CubicRoots out;
  out.discriminant = 18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c -
                     4.0 * a * c * c * c - 27.0 * a * a * d * d;

  auto f = [&](double y) { return ((a * y + b) * y + c) * y + d; };
  auto df = [&](double y) { return (3.0 * a * y + 2.0 * b) * y + c; };
  auto polish = [&](double y) {
    for (int i = 0; i < 3; ++i) {
      const double slope = df(y);
      if (slope == 0.0) {
        break;
      }
      const double next = y - f(y) / slope;
      if (!std::isfinite(next)) {
        break;
      }
      y = next;
    }
    return y;
  };

  const double shift = -b / (3.0 * a);
  const double p = (3.0 * a * c - b * b) / (3.0 * a * a);
  const double q = (2.0 * b * b * b - 9.0 * a * b * c + 27.0 * a * a * d) / (27.0 * a * a * a);

  if (std::abs(out.discriminant) <= disc_tol) {
    out.kind = CubicCase::DoubleRoot;
    const double s = b * b - 3.0 * a * c;
    if (std::abs(s) <= disc_tol) {
      out.real = {shift, shift, shift};
    } else {
      const double twin = (9.0 * a * d - b * c) / (2.0 * s);
      const double single = polish((4.0 * a * b * c - 9.0 * a * a * d - b * b * b) / (a * s));
      out.real = {twin, twin, single};
    }
  } else if (out.discriminant < 0.0) {
    out.kind = CubicCase::OneReal;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    const double u = std::cbrt(-q / 2.0 - std::copysign(std::sqrt(std::max(disc, 0.0)), q));
    const double t = (u == 0.0) ? 0.0 : u - p / (3.0 * u);
    out.real = {polish(t + shift)};
  } else {
    out.kind = CubicCase::ThreeDistinct;
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      out.real.push_back(polish(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) + shift));
    }
  }
  std::sort(out.real.begin(), out.real.end());
  return out;
}

}  // namespace oucap
