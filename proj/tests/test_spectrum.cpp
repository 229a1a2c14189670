#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "oucap/errors.hpp"
#include "oucap/spectrum.hpp"

using namespace oucap;

namespace {

constexpr double kPi = std::numbers::pi;

// int_0^x log(t^2 + e^2) dt
double log_quad_antideriv(double x, double e) {
  if (x == 0.0) {
    return 0.0;
  }
  const double base = x * std::log(x * x + e * e) - 2 * x;
  return e == 0.0 ? base : base + 2 * e * std::atan(x / e);
}

double log_quad_integral(double lo, double hi, double e) {
  auto F = [&](double x) { return x >= 0 ? log_quad_antideriv(x, e) : -log_quad_antideriv(-x, e); };
  return F(hi) - F(lo);
}

// (1/4pi) int_lo^hi log(1 + c / S_z) for constant density c, in closed form:
// 1 + 2 pi c (x^2 + k^2)/(x^2 + b^2) = (1 + 2 pi c)(x^2 + e^2)/(x^2 + b^2).
double band_rate_oracle(double lam, double kap, double lo, double hi, double c) {
  const double b = std::abs(kap + lam);
  const double g = 2 * kPi * c;
  const double e = std::sqrt((b * b + g * kap * kap) / (1 + g));
  return ((hi - lo) * std::log1p(g) + log_quad_integral(lo, hi, e) - log_quad_integral(lo, hi, b)) / (4 * kPi);
}

// Water-filling rate for b < kappa, where S_z increases in |x| and the
// filled set is |x| <= X.
double waterfill_rate_oracle(double lam, double kap, double W, double level) {
  const double b = std::abs(kap + lam);
  const double g = 2 * kPi * level;
  double X = W;
  if (g < 1) {
    X = std::min(W, std::sqrt(std::max(0.0, (g * kap * kap - b * b) / (1 - g))));
  }
  const double inner = X * std::log(g) + log_quad_antideriv(X, kap) - log_quad_antideriv(X, b);
  return inner / (2 * kPi);
}

}  // namespace

TEST_CASE("input spectrum bookkeeping") {
  InputSpectrum s;
  s.add({0.0, 1.0, 2.0});
  s.add({1.0, 3.0, 0.5});
  CHECK(s.total_power() == doctest::Approx(3.0));
  CHECK_THROWS_AS(s.add({0.5, 2.0, 1.0}), InvalidParams);
  CHECK_THROWS_AS(s.add({5.0, 4.0, 1.0}), InvalidParams);
  CHECK_THROWS_AS(s.add({5.0, 6.0, -1.0}), InvalidParams);
  CHECK_THROWS_AS(s.add({5.0, 6.0, NAN}), InvalidParams);

  const auto flat = InputSpectrum::flat_two_sided(64, 512, 1.0);
  CHECK(flat.bands().size() == 2);
  CHECK(flat.total_power() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(flat.bands()[1].lo == 512.0);
  CHECK(flat.bands()[1].hi == 544.0);
}

TEST_CASE("Pinsker rate basics") {
  const ChannelParams white(0.0, 1.0, 1.0);
  InputSpectrum unit;
  unit.add({0.0, 1.0, 3.0});
  CHECK(pinsker_rate(unit, white) == doctest::Approx(std::log1p(2 * kPi * 3.0) / (4 * kPi)).epsilon(1e-12));
  CHECK(pinsker_rate(InputSpectrum{}, white) == 0.0);

  InputSpectrum none;
  none.add({0.0, 5.0, 0.0});
  CHECK(pinsker_rate(none, ChannelParams(-1.0, 1.0, 1.0)) == 0.0);
}

TEST_CASE("Pinsker rate against the antiderivative oracle") {
  for (double lam : {1.0, -0.5, -1.0, -1.7}) {
    const ChannelParams p(lam, 1.0, 1.0);
    for (auto [lo, hi, c] : std::vector<std::tuple<double, double, double>>{
             {0.0, 1.0, 0.3}, {-2.0, 3.0, 1.5}, {-0.01, 0.01, 20.0}, {10.0, 50.0, 0.01}, {-400.0, -100.0, 0.2}}) {
      InputSpectrum s;
      s.add({lo, hi, c});
      const double got = pinsker_rate(s, p);
      const double ref = band_rate_oracle(lam, 1.0, lo, hi, c);
      CHECK(got == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("Pinsker rate is additive over disjoint bands") {
  const ChannelParams p(-0.8, 2.0, 1.0);
  InputSpectrum a, b, both;
  a.add({-1.0, 0.0, 0.7});
  b.add({0.0, 4.0, 0.2});
  both.add({-1.0, 0.0, 0.7});
  both.add({0.0, 4.0, 0.2});
  CHECK(pinsker_rate(both, p) == doctest::Approx(pinsker_rate(a, p) + pinsker_rate(b, p)).epsilon(1e-12));
}

TEST_CASE("flat inputs far from the origin") {
  const ChannelParams p(1.0, 1.0, 1.0);
  CHECK(flat_input_limit(64, 1.0) == doctest::Approx(64.0 / (4 * kPi) * std::log1p(2 * kPi / 64)));

  const std::vector<double> ns{16, 64, 1024};
  const std::vector<double> ks{32, 128, 512, 4096};
  const auto rows = flat_input_limit_sweep(p, ns, ks);
  REQUIRE(rows.size() == 12);
  for (const auto& r : rows) {
    CHECK(r.analytic_limit == flat_input_limit(r.n, 1.0));
    // S_z -> 1/2pi from above for lambda > 0, so the rate approaches the limit from below.
    CHECK(r.rate < r.analytic_limit);
    CHECK(r.rate == doctest::Approx(band_rate_oracle(1.0, 1.0, r.k, r.k + r.n / 2, 1.0 / r.n) * 2).epsilon(1e-9));
  }
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(rows[i].rate > rows[i - 1].rate);
  }
  const auto& at64 = rows[6];
  CHECK(at64.n == 64.0);
  CHECK(at64.k == 512.0);
  CHECK(std::abs(at64.rate - at64.analytic_limit) < 0.02 * at64.analytic_limit);

  CHECK(std::abs(flat_input_limit(1024, 1.0) - 0.5) < 0.005 * 0.5);
  CHECK(std::abs(rows.back().rate - 0.5) < 0.005 * 0.5);

  const auto white_rows = flat_input_limit_sweep(ChannelParams(0.0, 1.0, 1.0), ns, ks);
  for (const auto& r : white_rows) {
    CHECK(r.rate == doctest::Approx(r.analytic_limit).epsilon(1e-11));
  }
}

TEST_CASE("water-filling against flat noise") {
  const ChannelParams p(0.0, 1.0, 2.0);
  for (double W : {10.0, 1000.0}) {
    const auto wf = waterfill_bandlimited(p, W, 2.0);
    CHECK(wf.level == doctest::Approx(1 / (2 * kPi) + 2.0 / (2 * W)).epsilon(1e-10));
    CHECK(wf.rate == doctest::Approx(W / (2 * kPi) * std::log1p(kPi * 2.0 / W)).epsilon(1e-10));
    CHECK(wf.power_used == doctest::Approx(2.0).epsilon(1e-10));
  }
  const auto zero = waterfill_bandlimited(p, 100.0, 0.0);
  CHECK(zero.rate == 0.0);
  CHECK(zero.power_used == 0.0);
  CHECK_THROWS_AS(waterfill_bandlimited(p, 0.0, 1.0), InvalidParams);
  CHECK_THROWS_AS(waterfill_bandlimited(p, 10.0, -1.0), InvalidParams);
}

TEST_CASE("water-filling on colored noise") {
  for (auto [lam, P] : std::vector<std::pair<double, double>>{{-1.0, 0.25}, {-0.5, 0.1}, {-1.0, 3.0}, {-0.3, 2.0}}) {
    const ChannelParams p(lam, 1.0, P);
    for (double W : {5.0, 100.0}) {
      const auto wf = waterfill_bandlimited(p, W, P);
      CHECK(wf.power_used == doctest::Approx(P).epsilon(1e-9));
      CHECK(waterfill_power(p, W, wf.level) == doctest::Approx(P).epsilon(1e-9));
      CHECK(wf.rate == doctest::Approx(waterfill_rate_oracle(lam, 1.0, W, wf.level)).epsilon(1e-8));
      // Beats white noise of the same in-band level 1/2pi.
      CHECK(wf.rate > W / (2 * kPi) * std::log1p(kPi * P / W));
    }
  }

  // Below p_max the filled set is bounded, so the band stops mattering.
  const ChannelParams small(-1.0, 1.0, 0.25);
  CHECK(p_max(small) == doctest::Approx(0.5));
  const double r3 = waterfill_bandlimited(small, 1e3, 0.25).rate;
  const double r4 = waterfill_bandlimited(small, 1e4, 0.25).rate;
  CHECK(std::abs(r3 - r4) < 1e-6);
}

TEST_CASE("p_max against quadrature") {
  for (double lam : {-0.2, -1.0, -1.5}) {
    const ChannelParams p(lam, 1.5, 1.0);
    // x = tan(t) maps the half line to [0, pi/2).
    const double half = oracle::simpson(
        [&](double t) {
          if (t >= kPi / 2) {
            const double b = 1.5 + lam;
            return (1.5 * 1.5 - b * b) / (2 * kPi);  // limit of the transformed integrand
          }
          const double x = std::tan(t);
          return (1 / (2 * kPi) - noise_sdf(p, x)) / (std::cos(t) * std::cos(t));
        },
        0.0, kPi / 2, 4000);
    CHECK(p_max(p) == doctest::Approx(2 * half).epsilon(1e-9));
  }
  CHECK_THROWS_AS(p_max(ChannelParams(0.5, 1.0, 1.0)), InvalidParams);
}

TEST_CASE("water-filling monotonicity") {
  const ChannelParams p(-0.7, 1.0, 1.0);
  double prev = 0.0;
  for (double P : {0.1, 0.5, 1.0, 4.0}) {
    const double r = waterfill_bandlimited(p, 50.0, P).rate;
    CHECK(r > prev);
    prev = r;
  }
  prev = 0.0;
  for (double W : {1.0, 10.0, 100.0, 1000.0}) {
    const double r = waterfill_bandlimited(ChannelParams(-0.7, 1.0, 4.0), W, 4.0).rate;
    CHECK(r > prev);
    prev = r;
  }
  for (double lam : {0.5, 2.0, -2.0, -3.0}) {
    const ChannelParams q(lam, 1.0, 2.0);
    for (double W : {10.0, 1e3, 1e4}) {
      CHECK(waterfill_bandlimited(q, W, 2.0).rate <= 1.0 + 1e-6);
    }
  }
}
