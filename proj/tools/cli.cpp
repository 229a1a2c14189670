#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "oucap/abel_ode.hpp"
#include "oucap/capacity.hpp"
#include "oucap/errors.hpp"
#include "oucap/montecarlo.hpp"
#include "oucap/spectrum.hpp"
#include "oucap/version.hpp"

namespace oucap::cli {

namespace {

using nlohmann::ordered_json;

constexpr double kOdeStep = 1e-3;
constexpr double kIdentityTol = 1e-6;

// Raised when a computation finished but failed one of its own consistency checks.
struct ResidualFailure : Error {
  using Error::Error;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json manifest(const std::string& subcommand, ordered_json params,
                      std::optional<std::uint64_t> seed = std::nullopt) {
  ordered_json m;
  m["subcommand"] = subcommand;
  m["parameters"] = std::move(params);
  m["version"] = kVersion;
  m["master_seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  m["timestamp"] = utc_timestamp();
  return m;
}

ordered_json number_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

std::string fmt(double v) {
  if (!std::isfinite(v)) {
    return "NA";
  }
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot open " + path + " for writing");
  }
  f << content;
  if (!f) {
    throw Error("failed writing " + path);
  }
}

// Writes to --out (plus a manifest sidecar) or to the output stream.
void emit(const std::string& content, const std::string& out_path, const ordered_json& man,
          std::ostream& out) {
  if (out_path.empty()) {
    out << content;
    return;
  }
  write_file(out_path, content);
  write_file(out_path + ".manifest.json", man.dump(2) + "\n");
}

struct ChannelFlags {
  double lambda = 0.0;
  double kappa = 1.0;
  double power = 1.0;
  std::string format = "text";
  std::string out;

  void attach(CLI::App* app, bool require_power = true) {
    app->add_option("--lambda", lambda, "OU coloring gain lambda")->required();
    app->add_option("--kappa", kappa, "OU mean-reversion rate kappa (> 0)")->required();
    auto* p = app->add_option("--power", power, "average power budget P (>= 0)");
    if (require_power) {
      p->required();
    }
    app->add_option("--out", out, "write output to this path instead of stdout");
  }

  ordered_json json() const {
    return {{"lambda", lambda}, {"kappa", kappa}, {"power", power}, {"format", format}};
  }
};

// ---- capacity ------------------------------------------------------------

struct RouteOutcome {
  Route route;
  std::optional<CapacityResult> result;
  std::string error;
};

int cmd_capacity(const ChannelFlags& flags, const std::string& route, double horizon,
                 std::ostream& out) {
  const ChannelParams params(flags.lambda, flags.kappa, flags.power);
  std::vector<RouteOutcome> outcomes;
  bool not_converged = false;
  bool residual_failed = false;

  const bool all = route == "all";
  if (all || route == "closed") {
    const CapacityResult r = feedback_capacity_closed_form(params);
    const double k = params.kappa();
    const double b = std::abs(params.kappa() + params.lambda());
    const double scale =
        params.power() * (r.value + k) * (r.value + k) + 2.0 * r.value * (r.value + b) * (r.value + b);
    if (r.residual > 1e-10 * std::max(scale, 1.0)) {
      residual_failed = true;
    }
    outcomes.push_back({Route::ClosedForm, r, {}});
  }
  if (all || route == "ode") {
    if (params.power() == 0.0) {
      outcomes.push_back({Route::OdeLimit, CapacityResult{0.0, Route::OdeLimit, 0.0}, {}});
    } else {
      const AbelCoefficients coeffs = AbelCoefficients::ou(params);
      const OdeTrajectory traj = integrate_abel(coeffs, horizon, kOdeStep);
      try {
        const CapacityResult r = sk_rate_from_ode(traj);
        if (traj.gain_identity_residual > kIdentityTol ||
            std::abs(limiting_cubic(coeffs, traj.r_limit)) > 1e-8) {
          residual_failed = true;
        }
        outcomes.push_back({Route::OdeLimit, r, {}});
      } catch (const NotConverged& e) {
        not_converged = true;
        outcomes.push_back({Route::OdeLimit, std::nullopt, e.what()});
      }
    }
  }
  if (all || route == "discrete") {
    const std::vector<double> deltas = geometric_deltas(1e-1, 1e-4, 7);
    const DeltaSweep sweep = discrete_limit_sweep(params, deltas);
    outcomes.push_back({Route::DiscreteLimit, discrete_limit_capacity(sweep), {}});
  }

  std::optional<double> discrepancy;
  if (all) {
    double worst = 0.0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      for (std::size_t j = i + 1; j < outcomes.size(); ++j) {
        if (outcomes[i].result && outcomes[j].result) {
          worst = std::max(worst, std::abs(outcomes[i].result->value - outcomes[j].result->value));
        }
      }
    }
    discrepancy = worst;
  }

  ordered_json params_json = flags.json();
  params_json["route"] = route;
  params_json["horizon"] = horizon;
  const ordered_json man = manifest("capacity", params_json);

  std::ostringstream body;
  if (flags.format == "json") {
    ordered_json doc;
    doc["manifest"] = man;
    doc["regime"] = std::string(to_string(params.regime()));
    doc["results"] = ordered_json::array();
    for (const auto& o : outcomes) {
      ordered_json r;
      r["route"] = std::string(to_string(o.route));
      r["value"] = o.result ? number_or_null(o.result->value) : ordered_json(nullptr);
      r["residual"] = o.result ? number_or_null(o.result->residual) : ordered_json(nullptr);
      r["error"] = o.error.empty() ? ordered_json(nullptr) : ordered_json(o.error);
      doc["results"].push_back(r);
    }
    doc["max_discrepancy"] = discrepancy ? ordered_json(*discrepancy) : ordered_json(nullptr);
    body << doc.dump(2) << "\n";
  } else if (flags.format == "csv") {
    body << "route,value,residual,error\r\n";
    for (const auto& o : outcomes) {
      body << to_string(o.route) << ',' << (o.result ? fmt(o.result->value) : "NA") << ','
           << (o.result ? fmt(o.result->residual) : "NA") << ',';
      if (!o.error.empty()) {
        body << '"' << o.error << '"';
      }
      body << "\r\n";
    }
  } else {
    body << "regime " << to_string(params.regime()) << "\n";
    for (const auto& o : outcomes) {
      body << std::left << std::setw(14) << to_string(o.route);
      if (o.result) {
        body << fmt(o.result->value) << "  (residual " << fmt(o.result->residual) << ")\n";
      } else {
        body << "not converged: " << o.error << "\n";
      }
    }
    if (discrepancy) {
      body << "max pairwise discrepancy " << fmt(*discrepancy) << "\n";
    }
  }
  emit(body.str(), flags.out, man, out);
  if (not_converged) {
    return kNotConverged;
  }
  return residual_failed ? kResidualCheckFailed : kOk;
}

// ---- simulate ------------------------------------------------------------

ordered_json report_json(const SimReport& report, const ordered_json& man) {
  ordered_json doc;
  doc["manifest"] = man;
  doc["master_seed"] = report.master_seed;
  doc["trials"] = report.trials;
  doc["empirical_rate"] = report.empirical_rate;
  doc["whiteness_pass_rate"] = report.whiteness_pass_rate;
  doc["max_mmse_z"] = report.max_mmse_z();
  doc["mmse_curve"] = ordered_json::array();
  for (const auto& p : report.mmse_curve) {
    doc["mmse_curve"].push_back({{"time", p.time},
                                 {"empirical", p.empirical},
                                 {"analytic", p.analytic},
                                 {"half_width", number_or_null(p.half_width)},
                                 {"filter", p.filter}});
  }
  doc["power_curve"] = ordered_json::array();
  for (const auto& p : report.power_curve) {
    doc["power_curve"].push_back(
        {{"time", p.time}, {"empirical", p.empirical}, {"half_width", number_or_null(p.half_width)}});
  }
  return doc;
}

int cmd_simulate(const ChannelFlags& flags, const SimConfig& cfg, std::ostream& out) {
  const ChannelParams params(flags.lambda, flags.kappa, flags.power);
  cfg.validate();
  const AbelCoefficients coeffs = AbelCoefficients::ou(params);
  const OdeTrajectory traj = integrate_abel(coeffs, cfg.horizon, cfg.delta());
  const SimReport report = run_sk_scheme(params, cfg, traj);

  ordered_json params_json = flags.json();
  params_json["horizon"] = cfg.horizon;
  params_json["steps"] = cfg.steps;
  params_json["trials"] = cfg.trials;
  params_json["seed"] = cfg.master_seed;
  const ordered_json man = manifest("simulate", params_json, cfg.master_seed);

  const std::string prefix = flags.out.empty() ? "simulation" : flags.out;
  std::ostringstream csv;
  write_csv(csv, report);
  write_file(prefix + ".csv", csv.str());
  write_file(prefix + ".json", report_json(report, man).dump(2) + "\n");
  write_file(prefix + ".manifest.json", man.dump(2) + "\n");

  double worst_power_z = 0.0;
  for (const auto& p : report.power_curve) {
    if (p.half_width > 0.0 && std::isfinite(p.half_width)) {
      worst_power_z = std::max(worst_power_z, std::abs(p.empirical - params.power()) / (p.half_width / 1.96));
    }
  }
  if (flags.format == "json") {
    ordered_json s;
    s["max_mmse_z"] = number_or_null(report.trials > 1 ? report.max_mmse_z() : NAN);
    s["max_power_z"] = number_or_null(report.trials > 1 ? worst_power_z : NAN);
    s["empirical_rate"] = report.empirical_rate;
    s["whiteness_pass_rate"] = report.whiteness_pass_rate;
    s["files"] = {prefix + ".csv", prefix + ".json", prefix + ".manifest.json"};
    out << s.dump() << "\n";
  } else {
    out << "trials=" << report.trials << " max|z| mmse=" << (report.trials > 1 ? fmt(report.max_mmse_z()) : "NA")
        << " power=" << (report.trials > 1 ? fmt(worst_power_z) : "NA")
        << " rate=" << fmt(report.empirical_rate) << " white=" << fmt(report.whiteness_pass_rate)
        << " -> " << prefix << ".{csv,json,manifest.json}\n";
  }
  return kOk;
}

// ---- spectrum ------------------------------------------------------------

int cmd_spectrum(const ChannelFlags& flags, const std::string& sweep, std::vector<double> n_values,
                 std::vector<double> k_values, std::vector<double> bands, std::ostream& out,
                 std::ostream& err) {
  const ChannelParams params(flags.lambda, flags.kappa, flags.power);
  ordered_json params_json = flags.json();
  params_json["sweep"] = sweep;

  std::optional<std::string> caveat;
  if (params.regime() == Regime::ColoredGain && params.power() > p_max(params)) {
    caveat = "P exceeds the noise-floor gap p_max; the band-limited water-filling rate keeps "
             "growing with W and is not a capacity";
  }

  ordered_json rows = ordered_json::array();
  std::ostringstream table;
  if (sweep == "flat") {
    params_json["n"] = n_values;
    params_json["k"] = k_values;
    table << "n,k,rate,analytic_limit\r\n";
    for (const auto& r : flat_input_limit_sweep(params, n_values, k_values)) {
      rows.push_back({{"n", r.n}, {"k", r.k}, {"rate", r.rate}, {"analytic_limit", r.analytic_limit}});
      table << fmt(r.n) << ',' << fmt(r.k) << ',' << fmt(r.rate) << ',' << fmt(r.analytic_limit) << "\r\n";
    }
  } else {
    params_json["band"] = bands;
    table << "band,level,rate,flat_noise_rate\r\n";
    for (const double w : bands) {
      const WaterFill wf = waterfill_bandlimited(params, w, params.power());
      if (std::abs(wf.power_used - params.power()) > 1e-9 * std::max(1.0, params.power())) {
        throw ResidualFailure("water level does not spend the power budget");
      }
      const double flat = w / (2.0 * std::numbers::pi) * std::log1p(std::numbers::pi * params.power() / w);
      rows.push_back({{"band", w}, {"level", wf.level}, {"rate", wf.rate}, {"flat_noise_rate", flat}});
      table << fmt(w) << ',' << fmt(wf.level) << ',' << fmt(wf.rate) << ',' << fmt(flat) << "\r\n";
    }
  }
  const ordered_json man = manifest("spectrum", params_json);

  std::ostringstream body;
  if (flags.format == "json") {
    ordered_json doc;
    doc["manifest"] = man;
    doc["sweep"] = sweep;
    doc["rows"] = rows;
    doc["caveat"] = caveat ? ordered_json(*caveat) : ordered_json(nullptr);
    body << doc.dump(2) << "\n";
  } else if (flags.format == "csv") {
    body << table.str();
  } else {
    for (const auto& r : rows) {
      for (auto it = r.begin(); it != r.end(); ++it) {
        body << it.key() << '=' << fmt(it.value().get<double>()) << (std::next(it) == r.end() ? "\n" : "  ");
      }
    }
  }
  if (caveat && flags.format != "json") {
    err << "note: " << *caveat << "\n";
  }
  emit(body.str(), flags.out, man, out);
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feedback and non-feedback capacity of the OU-colored AWGN channel", "oucap"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  ChannelFlags cap_flags;
  std::string route = "closed";
  double horizon = 50.0;
  auto* cap = app.add_subcommand("capacity", "feedback capacity by one or all routes");
  cap_flags.attach(cap);
  cap->add_option("--route", route, "closed | ode | discrete | all")
      ->check(CLI::IsMember({"closed", "ode", "discrete", "all"}));
  cap->add_option("--format", cap_flags.format, "text | csv | json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  cap->add_option("--horizon", horizon, "ODE horizon (default 50)")->check(CLI::PositiveNumber);

  ChannelFlags sim_flags;
  SimConfig cfg;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo run of the SK feedback scheme");
  sim_flags.attach(sim);
  sim->add_option("--horizon", cfg.horizon, "time horizon T (default 10)")->check(CLI::PositiveNumber);
  sim->add_option("--steps", cfg.steps, "grid steps n (default 10000, >= 100)");
  sim->add_option("--trials", cfg.trials, "Monte Carlo trials (default 10000)");
  sim->add_option("--seed", cfg.master_seed, "master seed (default 0)");
  sim->add_option("--format", sim_flags.format, "summary format: text | json")
      ->check(CLI::IsMember({"text", "json"}));
  sim->get_option("--out")->description("output prefix for .csv, .json, .manifest.json (default simulation)");

  ChannelFlags spectrum_flags;
  std::string sweep = "flat";
  std::vector<double> n_values{16, 64, 256, 1024};
  std::vector<double> k_values{32, 128, 512, 4096};
  std::vector<double> bands{10, 100, 1000, 10000};
  auto* spectrum_cmd = app.add_subcommand("spectrum", "non-feedback rates: flat-input sweep or water-filling");
  spectrum_flags.attach(spectrum_cmd);
  spectrum_cmd->add_option("--sweep", sweep, "flat | waterfill")->check(CLI::IsMember({"flat", "waterfill"}));
  spectrum_cmd->add_option("--band", bands, "water-filling half-bandwidths W, comma separated")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  spectrum_cmd->add_option("--n", n_values, "flat-input bandwidths, comma separated")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  spectrum_cmd->add_option("--k", k_values, "flat-input offsets, comma separated")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);
  spectrum_cmd->add_option("--format", spectrum_flags.format, "text | csv | json")
      ->check(CLI::IsMember({"text", "csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidFlags;
  }

  try {
    if (cap->parsed()) {
      return cmd_capacity(cap_flags, route, horizon, out);
    }
    if (sim->parsed()) {
      return cmd_simulate(sim_flags, cfg, out);
    }
    return cmd_spectrum(spectrum_flags, sweep, n_values, k_values, bands, out, err);
  } catch (const InvalidParams& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return kInvalidFlags;
  } catch (const InvalidArma& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return kInvalidFlags;
  } catch (const NotConverged& e) {
    err << "not converged: " << e.what() << "\n";
    return kNotConverged;
  } catch (const FilterDivergence& e) {
    err << "filter divergence: " << e.what() << "\n";
    return kFilterDivergence;
  } catch (const ResidualFailure& e) {
    err << "residual check failed: " << e.what() << "\n";
    return kResidualCheckFailed;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace oucap::cli
