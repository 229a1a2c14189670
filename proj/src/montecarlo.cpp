#include "oucap/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "oucap/errors.hpp"

namespace oucap {

namespace {

constexpr double kZ95 = 1.96;
constexpr std::size_t kLjungBoxLags = 20;

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

// Exact one-step law of (dB, eta) with eta = int e^{-kappa (t_{k+1}-s)} dB(s).
struct IncrementLaw {
  double decay;      // e^{-kappa delta}
  double sd_b;       // sqrt(delta)
  double eta_on_b;   // regression coefficient of eta on dB
  double eta_resid;  // conditional sd of eta given dB
  double cov;        // Cov(dB, eta)
  double var_eta;

  IncrementLaw(double kappa, double delta) {
    decay = std::exp(-kappa * delta);
    sd_b = std::sqrt(delta);
    var_eta = -std::expm1(-2.0 * kappa * delta) / (2.0 * kappa);
    cov = -std::expm1(-kappa * delta) / kappa;
    eta_on_b = cov / delta;
    eta_resid = std::sqrt(std::max(var_eta - cov * cov / delta, 0.0));
  }
};

struct NoiseDraw {
  double db;
  double eta;
};

class NoiseSource {
 public:
  NoiseSource(const IncrementLaw& law, std::mt19937_64& rng) : law_(law), rng_(rng) {}

  NoiseDraw next() {
    const double db = law_.sd_b * normal_(rng_);
    const double eta = law_.eta_on_b * db + law_.eta_resid * normal_(rng_);
    return {db, eta};
  }
  double standard() { return normal_(rng_); }

 private:
  const IncrementLaw& law_;
  std::mt19937_64& rng_;
  std::normal_distribution<double> normal_;
};

std::uint32_t lo32(std::uint64_t v) {
  return static_cast<std::uint32_t>(v & 0xffffffffu);
}
std::uint32_t hi32(std::uint64_t v) {
  return static_cast<std::uint32_t>(v >> 32);
}

// Runs fn(trial) for all trials, split into contiguous blocks per worker.
template <class Fn>
void for_each_trial(std::size_t trials, Fn&& fn) {
  const unsigned workers = resolve_threads(trials);
  if (workers <= 1) {
    for (std::size_t i = 0; i < trials; ++i) {
      fn(i);
    }
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t block = (trials + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * block;
    const std::size_t end = std::min(trials, begin + block);
    pool.emplace_back([&, w, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) {
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  for (auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

double ljung_box(const std::vector<double>& x, std::size_t lags) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) {
    mean += v;
  }
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : x) {
    c0 += (v - mean) * (v - mean);
  }
  double q = 0.0;
  for (std::size_t j = 1; j <= lags; ++j) {
    double cj = 0.0;
    for (std::size_t i = j; i < n; ++i) {
      cj += (x[i] - mean) * (x[i - j] - mean);
    }
    const double rho = cj / c0;
    q += rho * rho / static_cast<double>(n - j);
  }
  return static_cast<double>(n) * (static_cast<double>(n) + 2.0) * q;
}

double half_width(double sum, double sum_sq, std::size_t count) {
  if (count < 2) {
    return std::numeric_limits<double>::infinity();
  }
  const double n = static_cast<double>(count);
  const double mean = sum / n;
  const double var = std::max(sum_sq - n * mean * mean, 0.0) / (n - 1.0);
  return kZ95 * std::sqrt(var / n);
}

// Deterministic part of the filter: gains and covariance along the grid.
struct FilterPlan {
  std::vector<Vec3> h;       // measurement row
  std::vector<Vec3> gain;    // predictor gain
  std::vector<double> s;     // innovation variance
  std::vector<double> var;   // Sigma_k[0][0]
};

FilterPlan plan_filter(const ChannelParams& params, const SimConfig& cfg,
                       const std::vector<double>& a, const IncrementLaw& law) {
  const std::size_t n = cfg.steps;
  const double d = cfg.delta();
  const double lam = params.lambda();
  const double kap = params.kappa();
  const Vec3 f{1.0, law.decay, 1.0};
  const Vec3 corr{0.0, law.cov, 0.0};

  FilterPlan plan;
  plan.h.resize(n);
  plan.gain.resize(n);
  plan.s.resize(n);
  plan.var.resize(n + 1);

  Mat3 sig{};
  sig[0][0] = 1.0;
  sig[2][2] = 1.0 / (2.0 * kap);
  for (std::size_t k = 0; k < n; ++k) {
    plan.var[k] = sig[0][0];
    const double t = static_cast<double>(k) * d;
    const Vec3 h{d * a[k], d * lam, d * lam * std::exp(-kap * t)};
    Vec3 sh{};
    for (int i = 0; i < 3; ++i) {
      sh[i] = sig[i][0] * h[0] + sig[i][1] * h[1] + sig[i][2] * h[2];
    }
    const double s = h[0] * sh[0] + h[1] * sh[1] + h[2] * sh[2] + d;
    if (!(s > 0.0) || !std::isfinite(s)) {
      std::ostringstream msg;
      msg << "innovation variance is not positive at step " << k;
      throw FilterDivergence(msg.str());
    }
    Vec3 g{};
    for (int i = 0; i < 3; ++i) {
      g[i] = (f[i] * sh[i] + corr[i]) / s;
    }
    // Joseph form: M Sigma M^T + Q + R g g^T - c g^T - g c^T with M = F - g h^T.
    Mat3 m{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        m[i][j] = (i == j ? f[i] : 0.0) - g[i] * h[j];
      }
    }
    Mat3 ms{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        ms[i][j] = m[i][0] * sig[0][j] + m[i][1] * sig[1][j] + m[i][2] * sig[2][j];
      }
    }
    Mat3 next{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        next[i][j] = ms[i][0] * m[j][0] + ms[i][1] * m[j][1] + ms[i][2] * m[j][2] +
                     d * g[i] * g[j] - corr[i] * g[j] - g[i] * corr[j];
      }
    }
    next[1][1] += law.var_eta;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < i; ++j) {
        const double avg = 0.5 * (next[i][j] + next[j][i]);
        next[i][j] = next[j][i] = avg;
      }
      if (!(next[i][i] >= -1e-15) || !std::isfinite(next[i][i])) {
        std::ostringstream msg;
        msg << "conditional covariance lost positivity at step " << k;
        throw FilterDivergence(msg.str());
      }
    }
    sig = next;
    plan.h[k] = h;
    plan.gain[k] = g;
    plan.s[k] = s;
  }
  plan.var[n] = sig[0][0];
  return plan;
}

double interp_log(const OdeTrajectory& traj, const std::vector<double>& v, double t) {
  const auto& ts = traj.times;
  if (t <= ts.front()) {
    return v.front();
  }
  if (t >= ts.back()) {
    return v.back();
  }
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
  const double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
  return std::exp((1.0 - w) * std::log(v[i]) + w * std::log(v[i + 1]));
}

}  // namespace

void SimConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidParams("horizon must be > 0");
  }
  if (steps < 100) {
    throw InvalidParams("steps must be >= 100");
  }
  if (trials < 1) {
    throw InvalidParams("trials must be >= 1");
  }
}

std::mt19937_64 trial_engine(std::uint64_t master_seed, std::uint64_t trial) {
  std::seed_seq seq{lo32(master_seed), hi32(master_seed), lo32(trial), hi32(trial)};
  return std::mt19937_64(seq);
}

unsigned resolve_threads(std::size_t work_items) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OUCAP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      n = static_cast<unsigned>(std::min<long>(v, 1024));
    }
  }
  if (work_items < n) {
    n = static_cast<unsigned>(std::max<std::size_t>(work_items, 1));
  }
  return n;
}

NoisePath simulate_noise(const ChannelParams& params, const SimConfig& cfg, std::uint64_t trial) {
  cfg.validate();
  const std::size_t n = cfg.steps;
  const double d = cfg.delta();
  const double lam = params.lambda();
  const double kap = params.kappa();
  const IncrementLaw law(kap, d);
  auto rng = trial_engine(cfg.master_seed, trial);
  NoiseSource src(law, rng);

  NoisePath path;
  path.brownian_increments.resize(n);
  path.z_increments.resize(n);
  path.ou_state.resize(n + 1);
  path.tail = src.standard() / std::sqrt(2.0 * kap);
  path.ou_state[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * d;
    const NoiseDraw w = src.next();
    path.brownian_increments[k] = w.db;
    path.z_increments[k] = lam * (path.ou_state[k] + path.tail * std::exp(-kap * t)) * d + w.db;
    path.ou_state[k + 1] = law.decay * path.ou_state[k] + w.eta;
  }
  return path;
}

double stationarity_scale(double kappa, double x) {
  return std::sqrt(2.0 * kappa * x / -std::expm1(-2.0 * kappa * x));
}

ArmaNoise stationary_arma_noise(const ChannelParams& params, const SimConfig& cfg,
                                std::uint64_t trial) {
  cfg.validate();
  const std::size_t n = cfg.steps;
  const double d = cfg.delta();
  const double lam = params.lambda();
  const double kap = params.kappa();
  const double u = std::exp(-kap * d);
  const double reach = -std::expm1(-kap * d) / kap;
  auto rng = trial_engine(cfg.master_seed, trial);
  std::normal_distribution<double> normal;

  ArmaNoise out;
  out.z.resize(n);
  out.b.resize(n);
  const double zeta = normal(rng) / std::sqrt(2.0 * kap);
  // w_k = e^{-kappa t_k} (m zeta + sum_{i<k} e^{kappa t_{i+1}} b_i), so z_k = b_k + lambda reach w_k.
  double w = stationarity_scale(kap, d) * zeta;
  const double sd = std::sqrt(d);
  for (std::size_t k = 0; k < n; ++k) {
    out.b[k] = sd * normal(rng);
    out.z[k] = out.b[k] + lam * reach * w;
    w = u * w + out.b[k];
  }
  const double ma = lam / kap - (lam / kap + 1.0) * u;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double r = out.z[k + 1] - u * out.z[k] - out.b[k + 1] - ma * out.b[k];
    out.recursion_residual = std::max(out.recursion_residual, std::abs(r));
  }
  return out;
}

double SimReport::max_mmse_z() const {
  double worst = 0.0;
  for (const auto& p : mmse_curve) {
    if (p.half_width > 0.0 && std::isfinite(p.half_width)) {
      worst = std::max(worst, std::abs(p.empirical - p.analytic) / (p.half_width / kZ95));
    }
  }
  return worst;
}

std::vector<std::size_t> output_indices(std::size_t steps) {
  const std::size_t stride = std::max<std::size_t>(1, steps / 100);
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < steps; k += stride) {
    idx.push_back(k);
  }
  idx.push_back(steps);
  return idx;
}

SimReport run_sk_scheme(const ChannelParams& params, const SimConfig& cfg,
                        const OdeTrajectory& traj) {
  cfg.validate();
  if (traj.times.empty() || traj.horizon() < cfg.horizon * (1.0 - 1e-12)) {
    throw InvalidParams("trajectory horizon is shorter than the simulation horizon");
  }
  if (std::abs(traj.power - params.power()) > 1e-12 * std::max(1.0, params.power())) {
    throw InvalidParams("trajectory power does not match the channel power");
  }
  const std::size_t n = cfg.steps;
  const double d = cfg.delta();
  const double lam = params.lambda();
  const double kap = params.kappa();
  const IncrementLaw law(kap, d);

  std::vector<double> a(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    a[k] = std::exp(traj.log_a_at(static_cast<double>(k) * d));
  }
  const FilterPlan plan = plan_filter(params, cfg, a, law);
  const std::vector<std::size_t> out_idx = output_indices(n);
  const std::size_t m = out_idx.size();

  const double lb_limit =
      boost::math::quantile(boost::math::chi_squared(static_cast<double>(kLjungBoxLags)), 0.99);

  // Per-trial samples at output times, laid out trial-major.
  std::vector<double> err_sq(cfg.trials * m);
  std::vector<double> power(cfg.trials * m);
  std::vector<double> theta(cfg.trials);
  std::vector<double> estimate(cfg.trials);
  std::vector<unsigned char> white(cfg.trials);

  for_each_trial(cfg.trials, [&](std::size_t trial) {
    auto rng = trial_engine(cfg.master_seed, trial);
    NoiseSource src(law, rng);
    const double th = src.standard();
    const double zeta = src.standard() / std::sqrt(2.0 * kap);
    double z0 = 0.0;
    Vec3 est{0.0, 0.0, 0.0};
    std::vector<double> innov(n);
    std::size_t next_out = 0;
    for (std::size_t k = 0; k <= n; ++k) {
      const double x = a[k] * (th - est[0]);
      if (next_out < m && out_idx[next_out] == k) {
        err_sq[trial * m + next_out] = (th - est[0]) * (th - est[0]);
        power[trial * m + next_out] = x * x;
        ++next_out;
      }
      if (k == n) {
        break;
      }
      const double t = static_cast<double>(k) * d;
      const double ez = std::exp(-kap * t);
      const NoiseDraw w = src.next();
      const double dz = lam * (z0 + zeta * ez) * d + w.db;
      const double dy = x * d + dz;
      // The receiver knows its own estimate, so A est drops out of the prediction.
      const double e = dy - lam * d * (est[1] + ez * est[2]);
      const Vec3& g = plan.gain[k];
      est[0] += g[0] * e;
      est[1] = law.decay * est[1] + g[1] * e;
      est[2] += g[2] * e;
      z0 = law.decay * z0 + w.eta;
      innov[k] = e / std::sqrt(plan.s[k]);
    }
    theta[trial] = th;
    estimate[trial] = est[0];
    white[trial] = ljung_box(innov, kLjungBoxLags) <= lb_limit ? 1 : 0;
  });

  const std::vector<double> mmse_ode = analytic_mmse(traj);
  SimReport report;
  report.master_seed = cfg.master_seed;
  report.trials = cfg.trials;
  report.empirical_rate = (traj.log_a_at(cfg.horizon) - 0.5 * std::log(params.power())) / cfg.horizon;
  for (std::size_t j = 0; j < m; ++j) {
    double se = 0.0, se2 = 0.0, sp = 0.0, sp2 = 0.0;
    for (std::size_t i = 0; i < cfg.trials; ++i) {
      const double e = err_sq[i * m + j];
      const double p = power[i * m + j];
      se += e;
      se2 += e * e;
      sp += p;
      sp2 += p * p;
    }
    const double t = static_cast<double>(out_idx[j]) * d;
    const double count = static_cast<double>(cfg.trials);
    report.mmse_curve.push_back({t, se / count, interp_log(traj, mmse_ode, t),
                                 half_width(se, se2, cfg.trials), plan.var[out_idx[j]]});
    report.power_curve.push_back({t, sp / count, half_width(sp, sp2, cfg.trials)});
  }
  std::size_t passed = 0;
  for (unsigned char w : white) {
    passed += w;
  }
  report.whiteness_pass_rate = static_cast<double>(passed) / static_cast<double>(cfg.trials);
  report.theta = std::move(theta);
  report.estimate = std::move(estimate);
  return report;
}

std::size_t message_cell(double theta, std::size_t grid_size) {
  if (grid_size == 0) {
    throw InvalidParams("message grid needs at least one cell");
  }
  const double u = boost::math::cdf(boost::math::normal(), theta);
  const auto cell = static_cast<std::size_t>(std::floor(u * static_cast<double>(grid_size)));
  return std::min(cell, grid_size - 1);
}

double decode_message(const SimReport& report, std::size_t grid_size) {
  if (grid_size == 0) {
    throw InvalidParams("message grid needs at least one cell");
  }
  if (report.theta.empty()) {
    return 0.0;
  }
  std::size_t errors = 0;
  for (std::size_t i = 0; i < report.theta.size(); ++i) {
    errors += message_cell(report.theta[i], grid_size) != message_cell(report.estimate[i], grid_size);
  }
  return static_cast<double>(errors) / static_cast<double>(report.theta.size());
}

void write_csv(std::ostream& os, const SimReport& report) {
  auto num = [&os](double v) {
    if (std::isfinite(v)) {
      os << v;
    } else {
      os << "NA";
    }
  };
  const auto old_precision = os.precision(17);
  os << "time,mmse_emp,mmse_analytic,mmse_hw,power_emp,power_hw\r\n";
  for (std::size_t j = 0; j < report.mmse_curve.size(); ++j) {
    const auto& mm = report.mmse_curve[j];
    const auto& pw = report.power_curve[j];
    num(mm.time);
    os << ',';
    num(mm.empirical);
    os << ',';
    num(mm.analytic);
    os << ',';
    num(mm.half_width);
    os << ',';
    num(pw.empirical);
    os << ',';
    num(pw.half_width);
    os << "\r\n";
  }
  os.precision(old_precision);
}

}  // namespace oucap
