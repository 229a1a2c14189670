#pragma once

#include <cstddef>
#include <vector>

#include "oucap/channel_model.hpp"
#include "oucap/kernels.hpp"
#include "oucap/roots.hpp"

namespace oucap {

/// Coefficients of g' = -P g^3 + (P/sqrt2) g^2 + p(t) g + q(t)/sqrt2, together
/// with the separable kernel they were derived from.
struct AbelCoefficients {
  ScalarFn p;
  ScalarFn q;
  double p_limit = 0.0;
  double q_limit = 0.0;
  double power = 0.0;
  SeparableKernel kernel;

  /// p = -l_d'/l_d, q = (l_u + l_d')/l_d, p_limit = -beta, q_limit = alpha + beta.
  static AbelCoefficients from_kernel(const SeparableKernel& kernel, double power);

  /// Constant coefficients. The attached kernel is l(t,s) = (q - p) e^{p (t-s)},
  /// which reproduces p and q; p = q = 0 is plain AWGN and p = 0, q = 1 is the
  /// constant kernel l == 1.
  static AbelCoefficients constant(double p, double q, double power);

  /// OU channel coefficients.
  static AbelCoefficients ou(const ChannelParams& params);
};

/// Real roots of -P y^3 + (P/sqrt2) y^2 + p_limit y + q_limit/sqrt2.
CubicRoots limiting_cubic_roots(const AbelCoefficients& coeffs);

/// Value of the limiting cubic at y.
double limiting_cubic(const AbelCoefficients& coeffs, double y) noexcept;

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<double> g;
  std::vector<double> log_a;
  std::vector<double> a;
  std::vector<double> h;  // H = A (1 + int l_u A / (l_d A)), trapezoid on the grid
  double power = 0.0;
  double r_limit = 0.0;
  CubicRoots limiting_roots;
  std::size_t converged_root_index = 0;  // nearest entry of limiting_roots.real
  double gain_identity_residual = 0.0;

  double horizon() const noexcept { return times.empty() ? 0.0 : times.back(); }
  /// Linear interpolation of g and of log A inside the grid.
  double g_at(double t) const;
  double log_a_at(double t) const;
};

/// Integrates the Abel ODE and log A = log sqrt(P) + int P g^2 with an
/// adaptive Dormand-Prince 5(4) pair (rtol 1e-10). The sample grid has
/// ceil(horizon/step) uniform intervals; the controller adapts inside each.
/// Fills H through gain_H. Throws InvalidParams unless 0 < step <= horizon/100,
/// StepSizeUnderflow if the controller asks for a step below 1e-14.
OdeTrajectory integrate_abel(const AbelCoefficients& coeffs, double horizon, double step);

/// P r^2 with r = g(T). Residual is |value - P g(0.9 T)^2|. Throws
/// NotConverged unless |g(T) - g(0.9 T)| < 1e-8.
CapacityResult sk_rate_from_ode(const OdeTrajectory& traj);

/// Cesaro form of the SK rate, (1/T) log(A(T)/sqrt P).
double log_gain_rate(const OdeTrajectory& traj);

struct RootCase {
  CubicCase kind = CubicCase::OneReal;
  std::vector<double> roots;
  std::size_t index = 0;
  double limit = 0.0;
};

/// Integrates on [0, horizon] and reports which limiting root g reached.
/// Throws NotConverged under the same window test as sk_rate_from_ode.
RootCase classify_root_convergence(const AbelCoefficients& coeffs, double horizon);

struct GainCurve {
  std::vector<double> h;
  /// max_i |sqrt2 g_i - 1 - J_i| with J = int_0^t l_u A / (l_d(t) A(t)).
  double identity_residual = 0.0;
};

/// H on the trajectory grid. The integral term uses the trapezoid rule and a
/// rescaled recursion that never forms A or l_d alone, so it is safe where A
/// overflows. Throws KernelDomainMismatch if the kernel is not finite on the
/// grid or if the identity residual exceeds `tolerance`.
GainCurve gain_H(const OdeTrajectory& traj, const SeparableKernel& kernel, double tolerance = 1e-6);

/// Running trapezoid integral of H^2 on the trajectory grid.
std::vector<double> cumulative_h_energy(const OdeTrajectory& traj);

/// Analytic MMSE (1 + int_0^t H^2)^{-1} on the trajectory grid.
std::vector<double> analytic_mmse(const OdeTrajectory& traj);

}  // namespace oucap
