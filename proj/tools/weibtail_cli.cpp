// weibtail: extreme quantile estimation for Weibull tail-distributions.
//
// Subcommands: estimate, select-k, simulate, boxplot, return-level, limits.
// Reports are JSON on stdout (or --out); simulation products are CSV/JSON
// files in --out-dir. Exit codes: 0 success, 2 validation/domain error,
// 3 I/O error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "weibtail/weibtail.hpp"

namespace {

using nlohmann::ordered_json;

struct GlobalOpts {
  bool json_errors = false;
  int verbosity = 0;
};

std::string error_name(const std::exception& e) {
  using namespace weibtail;
  if (dynamic_cast<const NonPositiveValue*>(&e)) return "NonPositiveValue";
  if (dynamic_cast<const TooSmall*>(&e)) return "TooSmall";
  if (dynamic_cast<const KOutOfRange*>(&e)) return "KOutOfRange";
  if (dynamic_cast<const DegenerateDesign*>(&e)) return "DegenerateDesign";
  if (dynamic_cast<const ZeroBias*>(&e)) return "ZeroBias";
  if (dynamic_cast<const EmptyGrid*>(&e)) return "EmptyGrid";
  if (dynamic_cast<const InvalidHorizon*>(&e)) return "InvalidHorizon";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const weibtail::Error*>(&e)) return "Error";
  return "InternalError";
}

void report_error(const GlobalOpts& g, const std::exception& e) {
  if (g.json_errors) {
    ordered_json j;
    j["error"]["type"] = error_name(e);
    j["error"]["message"] = e.what();
    std::cerr << j.dump() << '\n';
  } else {
    std::cerr << "error: " << e.what() << '\n';
  }
}

void emit_report(const ordered_json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw weibtail::IoError("cannot open output file: " + out_path);
  os << j.dump(2) << '\n';
}

ordered_json estimate_json(const weibtail::QuantileEstimate& est) {
  ordered_json j;
  j["value"] = est.value;
  j["log_value"] = est.log_value;
  j["tau"] = est.tau;
  j["k"] = est.k;
  if (est.rho_used) {
    j["rho"] = *est.rho_used;
  } else {
    j["rho"] = nullptr;
  }
  j["extrapolating"] = est.extrapolating;
  return j;
}

// Shared flags: data file, target probability, k choice.
struct TargetOpts {
  std::string data_path;
  std::optional<double> p;
  std::optional<double> tau_exponent;
  std::optional<std::size_t> k;
  bool auto_k = false;
  std::optional<std::size_t> k_min;
  std::optional<std::size_t> k_max;
};

double resolve_p(const TargetOpts& t, std::size_t n) {
  if (t.p) return *t.p;
  if (t.tau_exponent) {
    return std::pow(static_cast<double>(n), -*t.tau_exponent);
  }
  throw weibtail::DomainError("one of --p or --tau is required");
}

std::pair<std::size_t, std::size_t> resolve_grid(const TargetOpts& t,
                                                 std::size_t n) {
  auto [lo, hi] = weibtail::default_k_range(n);
  if (t.k_min) lo = *t.k_min;
  if (t.k_max) hi = *t.k_max;
  return {lo, hi};
}

int cmd_estimate(const GlobalOpts& g, const TargetOpts& t, double rho,
                 const std::string& estimator, const std::string& out_path) {
  using namespace weibtail;
  const OrderedSample s = make_ordered(read_data_file(t.data_path));
  const std::size_t n = s.size();
  const double p = resolve_p(t, n);

  std::size_t k;
  if (t.auto_k) {
    const auto [lo, hi] = resolve_grid(t, n);
    k = select_k(s, p, lo, hi).k_hat;
  } else if (t.k) {
    k = *t.k;
  } else {
    throw DomainError("one of --k or --auto-k is required");
  }

  const TailFit fit = ls_fit(s, k);
  const double tau = tau_of(p, n, k);

  ordered_json rep;
  rep["config"] = {{"command", "estimate"},
                   {"data", t.data_path},
                   {"p", p},
                   {"k", k},
                   {"auto_k", t.auto_k},
                   {"rho", rho},
                   {"estimator", estimator}};
  rep["n"] = n;
  rep["k"] = k;
  rep["p"] = p;
  rep["tau"] = tau;
  rep["theta_tilde"] = fit.theta_tilde;
  rep["theta_hat"] = fit.theta_hat;
  rep["b_hat"] = fit.b_hat;
  ordered_json estimates;
  if (estimator == "classic" || estimator == "both") {
    estimates["classic"] = estimate_json(quantile_classic(s, k, p, fit.theta_tilde));
  }
  if (estimator == "reduced" || estimator == "both") {
    estimates["reduced"] = estimate_json(quantile_reduced_from_fit(s, fit, p, rho));
  }
  rep["estimates"] = estimates;
  ordered_json warnings = ordered_json::array();
  if (!(tau > 1.0)) {
    warnings.push_back(
        "tau <= 1: target quantile lies inside the sample range; "
        "no extrapolation is involved");
  }
  rep["warnings"] = warnings;
  emit_report(rep, out_path);
  if (g.verbosity > 0) std::cerr << "estimate: n=" << n << " k=" << k << '\n';
  return 0;
}

int cmd_select_k(const GlobalOpts& g, const TargetOpts& t,
                 const std::string& curve_path, const std::string& out_path) {
  using namespace weibtail;
  const OrderedSample s = make_ordered(read_data_file(t.data_path));
  const std::size_t n = s.size();
  const double p = resolve_p(t, n);
  const auto [lo, hi] = resolve_grid(t, n);
  const SelectionResult res = select_k(s, p, lo, hi);

  if (!curve_path.empty()) {
    std::ofstream os(curve_path, std::ios::binary);
    if (!os) throw IoError("cannot open curve file: " + curve_path);
    os << "k,amse\n";
    for (std::size_t i = 0; i < res.curve.k_values.size(); ++i) {
      os << res.curve.k_values[i] << ',' << format_double(res.curve.amse[i])
         << '\n';
    }
  }

  double amse_min = 0.0;
  for (std::size_t i = 0; i < res.curve.k_values.size(); ++i) {
    if (res.curve.k_values[i] == res.k_hat) amse_min = res.curve.amse[i];
  }

  ordered_json rep;
  rep["config"] = {{"command", "select-k"},
                   {"data", t.data_path},
                   {"p", p},
                   {"k_min", lo},
                   {"k_max", hi},
                   {"curve_out", curve_path}};
  rep["n"] = n;
  rep["k_hat"] = res.k_hat;
  rep["amse_at_k_hat"] = amse_min;
  rep["tie_policy_applied"] = res.tie_policy_applied;
  emit_report(rep, out_path);
  if (g.verbosity > 0) std::cerr << "select-k: k_hat=" << res.k_hat << '\n';
  return 0;
}

weibtail::SimPlan build_plan(const std::string& dist, std::size_t n,
                             std::size_t replicates, std::vector<double> taus,
                             std::size_t k_min, std::size_t k_max,
                             std::size_t k_step, double rho,
                             std::uint64_t seed) {
  weibtail::SimPlan plan;
  plan.spec = weibtail::parse_distribution(dist);
  plan.n = n;
  plan.replicates = replicates;
  if (!taus.empty()) plan.taus = std::move(taus);
  plan.k_grid = weibtail::k_grid_range(k_min, std::min(k_max, n - 1), k_step);
  plan.rho_plugin = rho;
  plan.seed = seed;
  return plan;
}

int cmd_simulate(const GlobalOpts& g, const weibtail::SimPlan& plan,
                 unsigned threads, const std::string& out_dir, bool boxplots) {
  using namespace weibtail;
  if (g.verbosity > 0) {
    std::cerr << (boxplots ? "boxplot" : "simulate") << ": "
              << plan.replicates << " replicates, n=" << plan.n << '\n';
  }
  std::vector<std::string> files;
  if (boxplots) {
    files = write_boxplot_outputs(run_boxplots(plan, threads), out_dir);
  } else {
    files = write_simulation_outputs(run_curves(plan, threads), out_dir);
  }
  ordered_json rep;
  rep["config"] = manifest_json(validated(plan));
  rep["config"]["command"] = boxplots ? "boxplot" : "simulate";
  rep["output_dir"] = out_dir;
  rep["files"] = files;
  emit_report(rep, "");
  return 0;
}

int cmd_return_level(const GlobalOpts& g, const TargetOpts& t, double years,
                     std::size_t count, double horizon, double threshold,
                     const std::string& estimator, double rho,
                     const std::string& out_path) {
  using namespace weibtail;
  const OrderedSample s = make_ordered(read_data_file(t.data_path));
  const std::size_t n = s.size();

  ReturnLevelQuery q;
  q.years_observed = years;
  q.n_exceedances = count > 0 ? count : n;
  q.horizon_years = horizon;
  q.threshold = threshold;

  std::optional<std::size_t> k = t.k;
  const EstimatorKind kind = estimator == "classic" ? EstimatorKind::kClassic
                                                    : EstimatorKind::kReduced;
  ReturnLevelResult res;
  if (t.auto_k || !k) {
    const double p = implied_tail_probability(q);
    const auto [lo, hi] = resolve_grid(t, n);
    const std::size_t k_sel = select_k(s, p, lo, hi).k_hat;
    res = return_level(s, q, k_sel, kind, rho);
    res.auto_selected = true;
  } else {
    res = return_level(s, q, k, kind, rho);
  }
  const TailFit fit = ls_fit(s, res.estimate.k);

  ordered_json rep;
  rep["config"] = {{"command", "return-level"},
                   {"data", t.data_path},
                   {"years", years},
                   {"count", q.n_exceedances},
                   {"horizon", horizon},
                   {"threshold", threshold},
                   {"estimator", estimator},
                   {"rho", rho},
                   {"auto_k", res.auto_selected}};
  rep["n"] = n;
  rep["implied_p"] = res.implied_p;
  rep["k"] = res.estimate.k;
  rep["theta_tilde"] = fit.theta_tilde;
  rep["theta_hat"] = fit.theta_hat;
  rep["b_hat"] = fit.b_hat;
  rep["return_level"] = estimate_json(res.estimate);
  ordered_json warnings = ordered_json::array();
  if (!res.estimate.extrapolating) {
    warnings.push_back("tau <= 1: horizon lies inside the observed range");
  }
  rep["warnings"] = warnings;
  emit_report(rep, out_path);
  if (g.verbosity > 0) {
    std::cerr << "return-level: " << res.estimate.value << " at k="
              << res.estimate.k << '\n';
  }
  return 0;
}

int cmd_limits(const GlobalOpts&, double tau, double rho, double rho_plugin,
               const std::string& out_path) {
  using namespace weibtail;
  const LimitParams lim = limit_params(tau, rho, rho_plugin);
  ordered_json rep;
  rep["config"] = {{"command", "limits"},
                   {"tau", tau},
                   {"rho", rho},
                   {"rho_plugin", rho_plugin}};
  rep["mu_tau"] = lim.mu_tau;
  rep["sigma2_tau"] = lim.sigma2_tau;
  rep["mu_tilde_tau"] = lim.mu_tilde_tau;
  rep["sigma2_tilde_tau"] = lim.sigma2_tilde_tau;
  emit_report(rep, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extreme quantile estimation for Weibull tail-distributions"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_flag("--json-errors", g.json_errors,
               "emit errors as JSON objects on stderr");
  app.add_flag("-v,--verbose", g.verbosity, "print progress to stderr");

  auto add_target_opts = [](CLI::App* cmd, TargetOpts& t, bool with_p) {
    cmd->add_option("--data", t.data_path, "input data file, one value per line")
        ->required();
    if (with_p) {
      auto* p_opt = cmd->add_option("--p", t.p, "tail probability in (0,1)");
      cmd->add_option("--tau", t.tau_exponent,
                      "tau exponent: p = n^-tau (alternative to --p)")
          ->excludes(p_opt);
    }
    auto* k_opt = cmd->add_option("--k", t.k, "number of upper order statistics");
    cmd->add_flag("--auto-k", t.auto_k, "select k by minimizing estimated AMSE*")
        ->excludes(k_opt);
    cmd->add_option("--kmin", t.k_min, "smallest k of the selection grid");
    cmd->add_option("--kmax", t.k_max, "largest k of the selection grid");
  };

  // estimate
  TargetOpts est_t;
  double est_rho = -1.0;
  std::string est_estimator = "both";
  std::string est_out;
  auto* est = app.add_subcommand("estimate",
                                 "tail coefficient and extreme quantile from a data file");
  add_target_opts(est, est_t, true);
  est->add_option("--rho", est_rho, "rho plug-in for the bias-reduced estimator")
      ->capture_default_str();
  est->add_option("--estimator", est_estimator, "classic | reduced | both")
      ->check(CLI::IsMember({"classic", "reduced", "both"}))
      ->capture_default_str();
  est->add_option("--out", est_out, "write the JSON report here instead of stdout");

  // select-k
  TargetOpts sel_t;
  std::string sel_curve, sel_out;
  auto* sel = app.add_subcommand("select-k",
                                 "adaptive choice of k by minimizing estimated AMSE*");
  add_target_opts(sel, sel_t, true);
  sel->add_option("--curve-out", sel_curve, "write the (k, amse) curve as CSV");
  sel->add_option("--out", sel_out, "write the JSON report here instead of stdout");

  // simulate / boxplot share the plan flags
  struct PlanFlags {
    std::string dist;
    std::size_t n = 500;
    std::size_t replicates = 500;
    std::vector<double> taus;
    std::size_t k_min = 2, k_max = 360, k_step = 1;
    double rho = -1.0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out_dir;
  };
  auto add_plan_opts = [](CLI::App* cmd, PlanFlags& f) {
    cmd->add_option("--dist", f.dist,
                    "absnormal | gamma:a,b | weibull:a,b | dclass:a,b")
        ->required();
    cmd->add_option("--n", f.n, "sample size")->capture_default_str();
    cmd->add_option("--replicates", f.replicates, "number of Monte-Carlo samples")
        ->capture_default_str();
    cmd->add_option("--tau", f.taus, "tau exponents, p = n^-tau (default 2 4)");
    cmd->add_option("--kmin", f.k_min, "first k of the grid")->capture_default_str();
    cmd->add_option("--kmax", f.k_max, "last k of the grid (clamped to n-1)")
        ->capture_default_str();
    cmd->add_option("--kstep", f.k_step, "grid stride")->capture_default_str();
    cmd->add_option("--rho", f.rho, "rho plug-in")->capture_default_str();
    cmd->add_option("--seed", f.seed, "RNG seed (env EVT_SEED as fallback)")
        ->envname("EVT_SEED");
    cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)")
        ->capture_default_str();
    cmd->add_option("--out-dir", f.out_dir, "output directory")->required();
  };
  PlanFlags sim_f, box_f;
  auto* sim = app.add_subcommand("simulate",
                                 "Monte-Carlo median/MSE curves for both estimators");
  add_plan_opts(sim, sim_f);
  auto* box = app.add_subcommand("boxplot",
                                 "paired k_opt vs adaptive-k experiment");
  add_plan_opts(box, box_f);

  // return-level
  TargetOpts rl_t;
  double rl_years = 0.0, rl_horizon = 0.0, rl_threshold = 0.0, rl_rho = -1.0;
  std::size_t rl_count = 0;
  std::string rl_estimator = "reduced", rl_out;
  auto* rl = app.add_subcommand("return-level",
                                "N-year return level from exceedance data");
  add_target_opts(rl, rl_t, false);
  rl->add_option("--years", rl_years, "observation period in years")->required();
  rl->add_option("--count", rl_count,
                 "number of exceedances (default: sample size)");
  rl->add_option("--N,--horizon", rl_horizon, "return period in years")->required();
  rl->add_option("--threshold", rl_threshold, "exceedance level, for reporting");
  rl->add_option("--estimator", rl_estimator, "classic | reduced")
      ->check(CLI::IsMember({"classic", "reduced"}))
      ->capture_default_str();
  rl->add_option("--rho", rl_rho, "rho plug-in")->capture_default_str();
  rl->add_option("--out", rl_out, "write the JSON report here instead of stdout");

  // limits
  double lim_tau = 0.0, lim_rho = 0.0, lim_rho_plugin = -1.0;
  std::string lim_out;
  auto* lim = app.add_subcommand("limits",
                                 "asymptotic limit parameters mu(tau), sigma^2(tau)");
  lim->add_option("--tau", lim_tau, "limit extrapolation factor, > 1")->required();
  lim->add_option("--rho", lim_rho, "true second-order parameter, < 0")->required();
  lim->add_option("--rho-plugin", lim_rho_plugin, "canonical plug-in")
      ->capture_default_str();
  lim->add_option("--out", lim_out, "write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (est->parsed()) {
      return cmd_estimate(g, est_t, est_rho, est_estimator, est_out);
    }
    if (sel->parsed()) {
      return cmd_select_k(g, sel_t, sel_curve, sel_out);
    }
    if (sim->parsed()) {
      const auto plan = build_plan(sim_f.dist, sim_f.n, sim_f.replicates,
                                   sim_f.taus, sim_f.k_min, sim_f.k_max,
                                   sim_f.k_step, sim_f.rho, sim_f.seed);
      return cmd_simulate(g, plan, sim_f.threads, sim_f.out_dir, false);
    }
    if (box->parsed()) {
      const auto plan = build_plan(box_f.dist, box_f.n, box_f.replicates,
                                   box_f.taus, box_f.k_min, box_f.k_max,
                                   box_f.k_step, box_f.rho, box_f.seed);
      return cmd_simulate(g, plan, box_f.threads, box_f.out_dir, true);
    }
    if (rl->parsed()) {
      return cmd_return_level(g, rl_t, rl_years, rl_count, rl_horizon,
                              rl_threshold, rl_estimator, rl_rho, rl_out);
    }
    if (lim->parsed()) {
      return cmd_limits(g, lim_tau, lim_rho, lim_rho_plugin, lim_out);
    }
  } catch (const weibtail::IoError& e) {
    report_error(g, e);
    return 3;
  } catch (const std::exception& e) {
    report_error(g, e);
    return 2;
  }
  return 0;
}
