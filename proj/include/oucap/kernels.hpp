#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "oucap/channel_model.hpp"

namespace oucap {

using ScalarFn = std::function<double(double)>;

/// Volterra kernel of the separable form l(t, s) = l_u(s) / l_d(t), t >= s.
///
/// The raw factors are always present. The optional `value`,
/// `log_derivative` and `log_abs_denominator` members are numerically stable
/// closed forms of l(t,s), l_d'(t)/l_d(t) and log|l_d(t)|; when empty, the
/// accessors fall back to dividing the raw factors.
struct SeparableKernel {
  ScalarFn l_u;
  ScalarFn l_d;
  ScalarFn l_d_prime;
  double alpha = 0.0;  // lim l_u(t) / l_d(t)
  double beta = 0.0;   // lim l_d'(t) / l_d(t)

  std::function<double(double, double)> value;
  ScalarFn log_derivative;
  ScalarFn log_abs_denominator;

  /// l(t, s) for t >= s, and 0 for s > t.
  double operator()(double t, double s) const;
  /// l_u(t) / l_d(t).
  double ratio(double t) const;
  /// l_d'(t) / l_d(t).
  double log_deriv(double t) const;
  double log_abs_ld(double t) const;

  /// Same kernel with factorization (c l_u, c l_d). Drops the stable
  /// overrides so every accessor goes through the scaled factors.
  SeparableKernel scaled(double c) const;
};

/// l == 0 with l_u == 0, l_d == 1 (plain AWGN).
SeparableKernel zero_kernel();

/// l == c with l_u == l_d == c (the kernel of Ihara's example, alpha=1, beta=0).
SeparableKernel constant_kernel(double c = 1.0);

/// Resolvent kernel of the OU-colored noise. For kappa+lambda != 0
///
///   l(s,u) = [lambda (2k+lambda)^2 e^{(k+lambda)u} + lambda^2 (2k+lambda) e^{-(k+lambda)u}]
///            / [lambda^2 e^{-(k+lambda)s} - (lambda+2k)^2 e^{(k+lambda)s}]
///
/// and l(s,u) = k (k u + 1) / (k s + 2) at lambda = -kappa. The numerator
/// and denominator are kept verbatim as l_u and l_d. At lambda = -2 kappa the
/// numerator vanishes and the kernel is identically zero (white noise).
SeparableKernel ou_resolvent_kernel(const ChannelParams& params);

/// Uniform grid t_i = i * horizon / (points - 1), i = 0 .. points-1.
struct UniformGrid {
  double horizon = 1.0;
  std::size_t points = 2;

  double step() const noexcept { return horizon / static_cast<double>(points - 1); }
  double at(std::size_t i) const noexcept { return static_cast<double>(i) * step(); }
  bool operator==(const UniformGrid&) const = default;
};

/// Kernel samples K(t_i, t_j) for i >= j, stored packed lower-triangular.
/// Entries above the diagonal are zero by construction.
class GridKernel {
 public:
  explicit GridKernel(UniformGrid grid);

  /// Samples fn(t, s) on the lower triangle. Throws DegenerateKernel on a
  /// non-finite sample.
  static GridKernel sample(UniformGrid grid, const std::function<double(double, double)>& fn);
  static GridKernel sample(UniformGrid grid, const SeparableKernel& kernel);

  const UniformGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.points; }

  double at(std::size_t i, std::size_t j) const noexcept {
    return j > i ? 0.0 : values_[index(i, j)];
  }
  void set(std::size_t i, std::size_t j, double v);

 private:
  static std::size_t index(std::size_t i, std::size_t j) noexcept { return i * (i + 1) / 2 + j; }

  UniformGrid grid_;
  std::vector<double> values_;
};

/// max over i >= j of |h(s,u) + l(s,u) + int_u^s h(s,v) l(v,u) dv| with the
/// trapezoid rule on the grid. Throws GridMismatch if the grids differ.
double resolvent_residual(const GridKernel& h, const GridKernel& l);

/// Solves h(s,u) = -l(s,u) - int_u^s l(s,v) h(v,u) dv column by column by
/// forward substitution on the trapezoid discretization.
GridKernel recover_h_from_l(const GridKernel& l);

}  // namespace oucap
