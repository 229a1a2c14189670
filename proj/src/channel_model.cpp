#include "oucap/channel_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "oucap/errors.hpp"

namespace oucap {

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::ColoredGain:
      return "ColoredGain";
    case Regime::WhiteEquivalent:
      return "WhiteEquivalent";
  }
  return "unknown";
}

std::string_view to_string(Route route) noexcept {
  switch (route) {
    case Route::ClosedForm:
      return "ClosedForm";
    case Route::OdeLimit:
      return "OdeLimit";
    case Route::DiscreteLimit:
      return "DiscreteLimit";
    case Route::Simulation:
      return "Simulation";
    case Route::WaterFill:
      return "WaterFill";
  }
  return "unknown";
}

ChannelParams::ChannelParams(double lambda, double kappa, double power)
    : lambda_(lambda), kappa_(kappa), power_(power) {
  if (!std::isfinite(lambda)) {
    throw InvalidParams("lambda must be finite");
  }
  if (!std::isfinite(kappa) || !(kappa > 0.0)) {
    std::ostringstream msg;
    msg << "kappa must be > 0 (got " << kappa << ")";
    throw InvalidParams(msg.str());
  }
  if (!std::isfinite(power) || !(power >= 0.0)) {
    std::ostringstream msg;
    msg << "power must be >= 0 (got " << power << ")";
    throw InvalidParams(msg.str());
  }
}

Regime ChannelParams::regime() const noexcept {
  if (lambda_ > -2.0 * kappa_ && lambda_ < 0.0) {
    return Regime::ColoredGain;
  }
  return Regime::WhiteEquivalent;
}

Regime classify_regime(const ChannelParams& params) noexcept {
  return params.regime();
}

double noise_sdf(const ChannelParams& params, double x) noexcept {
  const double b = params.kappa() + params.lambda();
  const double k = params.kappa();
  return (x * x + b * b) / (2.0 * std::numbers::pi * (x * x + k * k));
}

}  // namespace oucap
