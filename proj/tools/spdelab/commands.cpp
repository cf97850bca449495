#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "digest.hpp"
#include "run_config.hpp"
#include "spdelab/correction.hpp"
#include "spdelab/errors.hpp"
#include "spdelab/estimators.hpp"
#include "spdelab/experiments.hpp"
#include "spdelab/integrator.hpp"
#include "spdelab/keyvalue.hpp"

namespace spdelab::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string eps_tag(double eps) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", eps);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const LambdaResult& r) {
  return {{"value", r.value},
          {"abs_error_estimate", r.abs_error_estimate},
          {"method", to_string(r.method)},
          {"scheme", r.scheme},
          {"nu", r.nu}};
}

json to_json(const MeanStderr& m) {
  return {{"mean", m.mean}, {"stderr", m.stderr_}, {"n_samples", m.n}};
}

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Collects output files so the manifest can list their digests.
class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw ValidationError("cannot write '" + (dir_ / name).string() + "'");
    f << content;
    digests_[name] = git_blob_sha1(content);
  }

  void write_manifest(json manifest) {
    manifest["outputs"] = digests_;
    std::ofstream f(dir_ / "manifest.json", std::ios::binary);
    f << manifest.dump(2) << '\n';
  }

 private:
  fs::path dir_;
  std::map<std::string, std::string> digests_;
};

// eps,mean,stderr,n_samples
std::string estimator_csv(const std::vector<double>& eps, const std::vector<MeanStderr>& rows) {
  std::string s = "eps,mean,stderr,n_samples\n";
  for (size_t i = 0; i < eps.size(); ++i) {
    s += num(eps[i]) + ',' + num(rows[i].mean) + ',' + num(rows[i].stderr_) + ',' +
         std::to_string(rows[i].n) + '\n';
  }
  return s;
}

double nu_from_config(const fs::path& config, std::optional<double> flag) {
  if (flag) return *flag;
  const auto doc = parse_key_value(read_text_file(config.string()));
  return doc.has("model", "nu") ? parse_real(doc.get("model", "nu")) : 1.0;
}

json sim_echo(const RunConfig& rc) {
  const SimConfig& s = rc.sim;
  json f = json::array();
  json g = json::array();
  for (const auto& p : s.F.components()) f.push_back(p.to_string());
  for (const auto& p : s.G.components()) g.push_back(p.to_string());
  return {{"scheme", s.scheme.name()},
          {"nu", s.nu},
          {"components", s.components},
          {"K", s.max_mode},
          {"pad", s.pad},
          {"dt", s.dt},
          {"refine", s.refine_level},
          {"effective_dt", s.step_size()},
          {"T", s.horizon},
          {"sample_interval", s.sample_interval},
          {"alpha", s.alpha},
          {"F", f},
          {"G", g},
          {"lambda", rc.lambda_spec},
          {"eps", rc.ensemble.eps},
          {"replicates", rc.ensemble.replicates},
          {"seed", rc.ensemble.seed}};
}

std::string gnuplot_script(const std::vector<double>& eps) {
  std::string s =
      "# gnuplot script; run `gnuplot plot.gp` inside the output directory.\n"
      "set datafile separator ','\n"
      "set key autotitle columnhead\n"
      "set terminal pngcairo size 1000,700\n"
      "set output 'sup_errors.png'\n"
      "set xlabel 't'\nset ylabel 'ensemble mean sup error'\n"
      "plot ";
  for (size_t i = 0; i < eps.size(); ++i) {
    const std::string file = "trajectory_eps_" + eps_tag(eps[i]) + ".csv";
    if (i > 0) s += ", \\\n     ";
    s += "'" + file + "' using 1:2 with linespoints title 'corrected eps=" + eps_tag(eps[i]) +
         "', '" + file + "' using 1:3 with lines dashtype 2 title 'uncorrected eps=" +
         eps_tag(eps[i]) + "'";
  }
  s +=
      "\n\nset output 'final_errors.png'\n"
      "set logscale xy\nset xlabel 'eps'\nset ylabel 'sup error at T'\n"
      "plot 'sup_err_corrected_final.csv' using 1:2:3 with yerrorlines title 'corrected', \\\n"
      "     'sup_err_uncorrected_final.csv' using 1:2:3 with yerrorlines title 'uncorrected', \\\n"
      "     'psi_scaling.csv' using 1:2:3 with yerrorlines title 'psi_tilde - psi at t=0'\n";
  return s;
}

}  // namespace

int cmd_lambda(const LambdaOptions& opt, std::ostream& out) {
  const Scheme scheme = load_scheme(opt.common.config);
  scheme.require_valid();
  const double nu = nu_from_config(opt.common.config, opt.nu);
  const double tol = opt.common.tol.value_or(1e-10);
  if (!(nu > 0.0) || !(tol > 0.0)) throw ValidationError("lambda: nu and tol must be > 0");
  if (opt.common.dry_run) {
    out << json{{"status", "ok"}, {"scheme", scheme.name()}, {"nu", nu}, {"tol", tol}}.dump(2) << '\n';
    return kOk;
  }
  const LambdaResult q = lambda_quadrature(scheme, nu, tol);
  json report = to_json(q);
  if (opt.closed_form) {
    const LambdaResult c = closed_form_for(scheme, nu);
    report = {{"quadrature", to_json(q)}, {"closed_form", to_json(c)}, {"difference", q.value - c.value}};
  }
  out << report.dump(2) << '\n';
  if (!opt.common.out.empty()) {
    OutputDir dir(opt.common.out);
    dir.write("lambda.json", report.dump(2) + "\n");
    dir.write_manifest({{"tool_version", kToolVersion},
                        {"command", "lambda"},
                        {"config_digest", git_blob_sha1_file(opt.common.config)},
                        {"resolved_lambda", to_json(q)}});
  }
  return kOk;
}

int cmd_converge(const ConvergeOptions& opt, std::ostream& out) {
  Stopwatch clock;
  RunConfig rc = load_run_config(opt.common.config);
  if (!opt.eps.empty()) rc.ensemble.eps = opt.eps;
  if (opt.replicates) rc.ensemble.replicates = *opt.replicates;
  if (opt.common.seed) rc.ensemble.seed = *opt.common.seed;
  if (opt.refine) rc.sim.refine_level = *opt.refine;
  if (opt.common.tol) rc.sim.lambda_tol = *opt.common.tol;
  rc.sim.seed = rc.ensemble.seed;
  if (rc.ensemble.eps.empty()) throw ValidationError("converge: empty eps list");
  if (rc.ensemble.replicates < 1) throw ValidationError("converge: replicates must be >= 1");
  for (double e : rc.ensemble.eps) {
    if (!(e > 0.0)) throw ValidationError("converge: eps must be > 0");
  }
  rc.sim.eps = rc.ensemble.eps.front();
  rc.sim.validate();
  const json echo = sim_echo(rc);
  if (opt.common.dry_run) {
    out << json{{"status", "ok"}, {"config", echo}}.dump(2) << '\n';
    return kOk;
  }

  const LambdaResult lambda = resolve_lambda(rc.sim);
  const double t_lambda = clock.lap();
  const EnsembleResult r = run_coupled(rc.sim, rc.ensemble.eps, rc.ensemble.replicates, opt.common.workers);
  const double t_run = clock.lap();

  const fs::path out_dir = opt.common.out.empty() ? fs::path("spdelab_converge") : opt.common.out;
  OutputDir dir(out_dir);
  using Column = std::vector<double> TrajectoryRecord::*;
  const std::vector<std::pair<std::string, Column>> columns = {
      {"sup_err_corrected", &TrajectoryRecord::sup_err_corrected},
      {"sup_err_uncorrected", &TrajectoryRecord::sup_err_uncorrected},
      {"halpha_err_corrected", &TrajectoryRecord::halpha_err_corrected},
      {"halpha_err_uncorrected", &TrajectoryRecord::halpha_err_uncorrected}};

  const std::string header =
      "t,sup_err_corrected,sup_err_uncorrected,halpha_err_corrected,halpha_err_uncorrected\n";
  json blow_ups = json::array();
  int exit_code = kOk;
  for (size_t e = 0; e < r.eps.size(); ++e) {
    std::string means = header;
    std::string errs = header;
    for (size_t i = 0; i < r.times.size(); ++i) {
      means += num(r.times[i]);
      errs += num(r.times[i]);
      for (const auto& [name, member] : columns) {
        const MeanStderr m = r.column(e, i, member);
        means += ',' + num(m.mean);
        errs += ',' + num(m.stderr_);
      }
      means += '\n';
      errs += '\n';
    }
    dir.write("trajectory_eps_" + eps_tag(r.eps[e]) + ".csv", means);
    dir.write("trajectory_stderr_eps_" + eps_tag(r.eps[e]) + ".csv", errs);

    json failed = json::array();
    for (const auto& rec : r.records[e]) {
      if (rec.blew_up) {
        failed.push_back({{"replicate", rec.replicate},
                          {"last_valid_time", rec.blow_up_time},
                          {"variant", rec.blow_up_variant}});
      }
    }
    const int blown = r.replicates - r.valid_count(e);
    if (blown > 0.2 * r.replicates) exit_code = kBlowUpQuota;
    blow_ups.push_back({{"eps", r.eps[e]}, {"count", blown}, {"replicates", failed}});
  }

  json finals = json::object();
  json slopes = json::object();
  for (const auto& [name, member] : columns) {
    std::vector<MeanStderr> rows;
    std::vector<double> means;
    for (size_t e = 0; e < r.eps.size(); ++e) {
      rows.push_back(r.final_column(e, member));
      means.push_back(rows.back().mean);
    }
    dir.write(name + "_final.csv", estimator_csv(r.eps, rows));
    json list = json::array();
    for (size_t e = 0; e < r.eps.size(); ++e) {
      json row = to_json(rows[e]);
      row["eps"] = r.eps[e];
      list.push_back(row);
    }
    finals[name] = list;
    bool positive = r.eps.size() >= 3;
    for (double m : means) positive = positive && m > 0.0;
    slopes[name] = positive ? json(rate_fit(r.eps, means).slope) : json(nullptr);
  }

  std::vector<MeanStderr> psi_rows;
  std::vector<double> psi_means;
  for (size_t e = 0; e < r.eps.size(); ++e) {
    psi_rows.push_back(r.initial_sup_diff(e));
    psi_means.push_back(psi_rows.back().mean);
  }
  dir.write("psi_scaling.csv", estimator_csv(r.eps, psi_rows));
  bool psi_positive = r.eps.size() >= 3;
  for (double m : psi_means) psi_positive = psi_positive && m > 0.0;
  slopes["psi_scaling"] = psi_positive ? json(rate_fit(r.eps, psi_means).slope) : json(nullptr);

  std::vector<double> qv;
  for (double v : r.limit_qv) {
    if (std::isfinite(v)) qv.push_back(v);
  }
  const MeanStderr qv_stats = mean_stderr(qv);
  json summary = {{"lambda", to_json(lambda)},
                  {"final_time", r.times.back()},
                  {"final", finals},
                  {"slopes", slopes},
                  {"blow_ups", blow_ups},
                  {"limit_qv_final",
                   {{"mean", finite_or_null(qv_stats.mean)},
                    {"stderr", qv_stats.stderr_},
                    {"n_samples", qv_stats.n},
                    {"grid_size", 2 * rc.sim.max_mode + 1},
                    {"expected_stationary", expected_qv(rc.sim.nu, rc.sim.max_mode, 2 * rc.sim.max_mode + 1)},
                    {"pi_over_nu", kPi / rc.sim.nu}}}};
  dir.write("summary.json", summary.dump(2) + "\n");
  dir.write("run.json", json{{"tool_version", kToolVersion},
                             {"config", echo},
                             {"config_text", rc.text},
                             {"config_digest", git_blob_sha1(rc.text)},
                             {"seed", rc.ensemble.seed}}
                            .dump(2) + "\n");
  dir.write("plot.gp", gnuplot_script(r.eps));
  const double t_write = clock.lap();
  dir.write_manifest({{"tool_version", kToolVersion},
                      {"command", "converge"},
                      {"config", echo},
                      {"config_digest", git_blob_sha1(rc.text)},
                      {"seed", rc.ensemble.seed},
                      {"resolved_lambda", to_json(lambda)},
                      {"wall_clock_seconds", {{"lambda", t_lambda}, {"simulate", t_run}, {"write", t_write}}}});
  out << summary.dump(2) << '\n';
  return exit_code;
}

int cmd_chaos(const ChaosOptions& opt, std::ostream& out) {
  Stopwatch clock;
  const Scheme scheme = load_scheme(opt.common.config);
  scheme.require_valid();
  ChaosSettings settings;
  if (!opt.eps.empty()) settings.eps = opt.eps;
  settings.nu = nu_from_config(opt.common.config, opt.nu);
  settings.gamma = opt.gamma;
  settings.chi = opt.chi;
  settings.alpha = opt.alpha;
  settings.samples = opt.samples;
  settings.seed = opt.common.seed.value_or(0);
  settings.workers = opt.common.workers;
  if (!(settings.alpha > 0.5)) throw ValidationError("chaos: alpha must be > 1/2");
  if (settings.samples < 2) throw ValidationError("chaos: need >= 2 samples");
  for (double e : settings.eps) chaos_band(e, settings.gamma, settings.chi);
  const json params = {{"scheme", scheme.name()}, {"eps", settings.eps},     {"gamma", settings.gamma},
                       {"chi", settings.chi},     {"alpha", settings.alpha}, {"nu", settings.nu},
                       {"samples", settings.samples}, {"seed", settings.seed}};
  if (opt.common.dry_run) {
    out << json{{"status", "ok"}, {"config", params}}.dump(2) << '\n';
    return kOk;
  }

  const ChaosReport report = run_chaos(scheme, settings);
  const double t_run = clock.lap();
  json rows = json::array();
  for (const auto& row : report.rows) {
    json atoms = json::array();
    for (const auto& a : row.atoms) {
      const double z = a.xi_mean.stderr_ > 0.0
                           ? (a.xi_mean.mean - a.lambda_eps_y) / a.xi_mean.stderr_
                           : (a.xi_mean.mean == a.lambda_eps_y ? 0.0 : INFINITY);
      atoms.push_back({{"y", a.y},
                       {"weight", a.weight},
                       {"lambda_eps_y", a.lambda_eps_y},
                       {"xi_mean", to_json(a.xi_mean)},
                       {"z_score", finite_or_null(z)},
                       {"offdiag_max_z", a.offdiag_max_z}});
    }
    rows.push_back({{"eps", row.eps},
                    {"band", {row.band.lo, row.band.hi}},
                    {"max_mode", row.max_mode},
                    {"lambda_eps", row.lambda_eps},
                    {"atoms", atoms},
                    {"distance", to_json(row.distance)}});
  }
  const json summary = {{"config", params}, {"rows", rows},
                        {"distance_slope", finite_or_null(report.distance_slope)}};
  if (!opt.common.out.empty()) {
    OutputDir dir(opt.common.out);
    std::vector<double> eps;
    std::vector<MeanStderr> dist;
    for (const auto& row : report.rows) {
      eps.push_back(row.eps);
      dist.push_back(row.distance);
    }
    dir.write("chaos_distance.csv", estimator_csv(eps, dist));
    for (size_t a = 0; a < scheme.mu().size(); ++a) {
      std::vector<MeanStderr> xi;
      for (const auto& row : report.rows) xi.push_back(row.atoms[a].xi_mean);
      dir.write("chaos_xi_atom" + std::to_string(a) + ".csv", estimator_csv(eps, xi));
    }
    dir.write("chaos.json", summary.dump(2) + "\n");
    dir.write_manifest({{"tool_version", kToolVersion},
                        {"command", "chaos"},
                        {"config", params},
                        {"config_digest", git_blob_sha1_file(opt.common.config)},
                        {"seed", settings.seed},
                        {"wall_clock_seconds", {{"simulate", t_run}}}});
  }
  out << summary.dump(2) << '\n';
  return kOk;
}

int cmd_qv(const QvOptions& opt, std::ostream& out) {
  Stopwatch clock;
  if (!(opt.nu > 0.0)) throw ValidationError("qv: nu must be > 0");
  if (opt.max_mode < 1 || opt.grid_size < 2) throw ValidationError("qv: need K >= 1 and M >= 2");
  if (opt.samples < 2) throw ValidationError("qv: need >= 2 samples");
  const std::uint64_t seed = opt.common.seed.value_or(0);
  const json params = {{"nu", opt.nu}, {"K", opt.max_mode}, {"M", opt.grid_size},
                       {"samples", opt.samples}, {"seed", seed}};
  if (opt.common.dry_run) {
    out << json{{"status", "ok"}, {"config", params}}.dump(2) << '\n';
    return kOk;
  }
  const QvReport r = run_qv(opt.nu, opt.max_mode, opt.grid_size, opt.samples, seed, opt.common.workers);
  const double t_run = clock.lap();
  const json report = {
      {"config", params},
      {"monte_carlo", to_json(r.monte_carlo)},
      {"exact", r.exact},
      {"pi_over_nu", r.limit},
      {"z_score", finite_or_null((r.monte_carlo.mean - r.exact) / r.monte_carlo.stderr_)},
      {"exact_vs_limit_relative", (r.exact - r.limit) / r.limit}};
  if (!opt.common.out.empty()) {
    OutputDir dir(opt.common.out);
    dir.write("qv.json", report.dump(2) + "\n");
    dir.write_manifest({{"tool_version", kToolVersion},
                        {"command", "qv"},
                        {"config", params},
                        {"seed", seed},
                        {"wall_clock_seconds", {{"simulate", t_run}}}});
  }
  out << report.dump(2) << '\n';
  return kOk;
}

int run_guarded(const std::function<int()>& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const ResolutionError& e) {
    err << "resolution error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const InfiniteSymbolError& e) {
    err << "infinite symbol: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const BlowUpError& e) {
    err << "blow-up: " << e.what() << " (last valid time " << e.last_valid_time() << ")\n";
    return kBlowUpQuota;
  } catch (const ConvergenceError& e) {
    err << "quadrature did not converge: " << e.what() << " (partial value " << e.partial_value()
        << ", error estimate " << e.partial_error() << ")\n";
    return kQuadratureFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace spdelab::cli
