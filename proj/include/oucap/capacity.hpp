#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "oucap/channel_model.hpp"

namespace oucap {

/// Three-valued sign with sgn(0) == 0.
int sgn(double v) noexcept;

/// Left-hand minus right-hand side of P (x+kappa)^2 = 2 x (x+|kappa+lambda|)^2.
double feedback_cubic(const ChannelParams& params, double x) noexcept;

/// Feedback capacity of the OU-colored AWGN channel.
///
/// WhiteEquivalent channels give P/2 with zero residual. ColoredGain channels
/// give the unique positive root of the cubic above, and `residual` holds
/// |feedback_cubic(value)|. Throws RootNotBracketed if bracket expansion
/// fails, which would indicate a bug.
CapacityResult feedback_capacity_closed_form(const ChannelParams& params);

/// Noise Z_i + phi Z_{i-1} = U_i + theta U_{i-1} with per-symbol power budget.
struct ArmaParams {
  double phi = 0.0;
  double theta = 0.0;
  double power = 0.0;
};

/// Throws InvalidArma unless |phi| < 1, power >= 0 and theta finite.
void validate(const ArmaParams& arma);

struct KimSolution {
  double x0 = 1.0;        // unique root in (0, 1]
  double capacity = 0.0;  // -log(x0), nats per channel use
};

/// Cleared-denominator form of the ARMA(1,1) feedback capacity quartic,
/// P x^2 D(x)^2 - (1 - x^2) N(x)^2. Negative near 0, nonnegative at 1.
double kim_quartic(const ArmaParams& arma, double x) noexcept;

/// Feedback capacity of the ARMA(1,1) Gaussian channel. |theta| == 1 uses the
/// |theta| <= 1 branch.
KimSolution solve_kim_quartic(const ArmaParams& arma);

/// Discretization of the channel with step delta:
/// phi = -e^{-kappa delta}, theta = lambda/kappa - (lambda/kappa + 1) e^{-kappa delta},
/// power = P delta.
ArmaParams arma_from_step(const ChannelParams& params, double delta);

struct DeltaSweep {
  std::vector<double> deltas;
  std::vector<double> rates;  // C_FB(P delta) / delta
  double extrapolated = 0.0;
};

/// Per-unit-time capacity of the discretized channels for each step size.
/// `extrapolated` is the two-point Richardson estimate from the last two
/// entries, which assumes the rate error is O(delta). With a single delta it
/// is that delta's rate. Throws InvalidParams unless deltas is nonempty,
/// strictly decreasing and positive.
DeltaSweep discrete_limit_sweep(const ChannelParams& params, std::span<const double> deltas);

/// `count` step sizes spaced geometrically from `first` down to `last`.
std::vector<double> geometric_deltas(double first, double last, std::size_t count);

/// DiscreteLimit result from a sweep: the raw rate at the smallest delta,
/// with |extrapolated - raw| as residual.
CapacityResult discrete_limit_capacity(const DeltaSweep& sweep);

}  // namespace oucap
