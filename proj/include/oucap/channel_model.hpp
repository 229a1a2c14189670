#pragma once

#include <string_view>

namespace oucap {

/// Whether OU coloring can raise the feedback capacity above P/2.
enum class Regime {
  ColoredGain,      // -2 kappa < lambda < 0
  WhiteEquivalent,  // lambda <= -2 kappa or lambda >= 0
};

/// Which computation produced a capacity value.
enum class Route { ClosedForm, OdeLimit, DiscreteLimit, Simulation, WaterFill };

std::string_view to_string(Regime regime) noexcept;
std::string_view to_string(Route route) noexcept;

/// Parameters of the OU-colored AWGN channel
///
///   Y(t) = int_0^t X + B(t) + lambda int_0^t int_{-inf}^s e^{-kappa(s-u)} dB(u) ds
///
/// together with the average power budget P. Immutable once constructed.
class ChannelParams {
 public:
  /// Throws InvalidParams unless kappa > 0, power >= 0 and all values finite.
  ChannelParams(double lambda, double kappa, double power);

  double lambda() const noexcept { return lambda_; }
  double kappa() const noexcept { return kappa_; }
  double power() const noexcept { return power_; }

  /// Exact comparison on the stored values; lambda == 0 and lambda == -2 kappa
  /// are WhiteEquivalent.
  Regime regime() const noexcept;

  ChannelParams with_power(double power) const { return {lambda_, kappa_, power}; }

 private:
  double lambda_;
  double kappa_;
  double power_;
};

Regime classify_regime(const ChannelParams& params) noexcept;

/// Spectral density of the generalized noise derivative,
/// S_z(x) = (x^2 + (kappa+lambda)^2) / (2 pi (x^2 + kappa^2)).
double noise_sdf(const ChannelParams& params, double x) noexcept;

/// A capacity value in nats per unit time. `residual` is the defining-equation
/// residual for analytic routes and the Monte Carlo half-width for simulation.
struct CapacityResult {
  double value = 0.0;
  Route route = Route::ClosedForm;
  double residual = 0.0;
};

}  // namespace oucap
