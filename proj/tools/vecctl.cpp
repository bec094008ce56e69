// vecctl: simulate, optimize and analyze impulsive mosquito releases.
#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "vecctl/analysis.hpp"
#include "vecctl/gradients.hpp"
#include "vecctl/impulse.hpp"
#include "vecctl/optimizer.hpp"
#include "vecctl/plots.hpp"
#include "vecctl/published.hpp"
#include "vecctl/scenario.hpp"
#include "vecctl/textio.hpp"
#include "vecctl/version.hpp"

using json = nlohmann::ordered_json;
using namespace vecctl;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kNumerical = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

json number(double v) {
  // JSON has no NaN or infinity.
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json schedule_json(const ReleaseSchedule& s) {
  return {{"times", s.times}, {"weights", s.weights}, {"total", s.total()},
          {"budget", s.budget}, {"horizon", s.horizon}};
}

void emit_json(const json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (!path.empty()) write_file(path, text);
  std::cout << text;
}

// Flags shared by the scenario-driven subcommands; a --config file replaces them.
struct ScenarioFlags {
  std::string config;
  std::string model = "sit";
  std::string preset = "dengue";
  std::vector<std::string> overrides;
  std::string times;
  std::string weights;
  double budget = std::numeric_limits<double>::quiet_NaN();
  double horizon = 450.0;
  double ih0 = 20.0;
  double im0 = 20.0;
  double rtol = 1e-8;
  double atol = 1e-8;

  void attach(CLI::App* app, bool schedule) {
    app->add_option("--config", config, "scenario file; other scenario flags are then ignored");
    app->add_option("--model", model, "sit, wb or seir");
    app->add_option("--preset", preset, "parameter preset: dengue or printed-k");
    app->add_option("--set", overrides, "parameter override key=value (repeatable)");
    app->add_option("--T", horizon, "horizon in days");
    app->add_option("--IH0", ih0, "initial infected humans");
    app->add_option("--IM0", im0, "initial infected wild mosquitoes");
    app->add_option("--rtol", rtol, "relative integration tolerance");
    app->add_option("--atol", atol, "absolute integration tolerance, in individuals");
    if (schedule) {
      app->add_option("--times", times, "comma-separated release times");
      app->add_option("--weights", weights, "comma-separated release sizes");
      app->add_option("--budget", budget, "budget C (defaults to the sum of the weights)");
    }
  }

  [[nodiscard]] Scenario resolve() const {
    if (!config.empty()) return parse_scenario(read_file(config));
    Scenario sc;
    sc.model = parse_scenario_model(model);
    sc.preset = preset;
    sc.params = params_preset(preset);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + kv + "'");
      const std::string key(trim(std::string_view(kv).substr(0, eq)));
      if (!EpiParams::has_key(key)) throw ValidationError("unknown parameter key '" + key + "'");
      sc.params.set(key, parse_double(std::string_view(kv).substr(eq + 1), 0, key));
    }
    sc.horizon = horizon;
    sc.ih0 = ih0;
    sc.im0 = im0;
    sc.tol = {rtol, atol};
    sc.times = parse_double_list(times, 0, "times");
    sc.weights = parse_double_list(weights, 0, "weights");
    if (sc.weights.empty() && !sc.times.empty()) {
      throw ValidationError("--times needs matching --weights");
    }
    if (!std::isnan(budget)) sc.budget = budget;
    sc.validate();
    return sc;
  }
};

struct SimOutcome {
  double cost = 0.0;
  std::vector<std::string> warnings;
  IntegrationStats stats;
};

SimOutcome run_scenario(const Scenario& sc, const ReleaseSchedule& schedule, std::ostream* csv) {
  SimOutcome out;
  if (sc.kind() == ModelKind::wb) {
    const auto traj = simulate_wb(sc.params, schedule, default_wb_init(sc.params, sc.ih0, sc.im0), sc.tol);
    if (csv) write_trajectory_csv(*csv, traj);
    out.cost = traj.cost();
    out.warnings = traj.warnings;
    out.stats = traj.stats;
  } else {
    const auto traj = simulate_sit(sc.params, schedule, default_sit_init(sc.params, sc.ih0, sc.im0), sc.tol);
    if (csv) write_trajectory_csv(*csv, traj);
    out.cost = traj.cost();
    out.warnings = traj.warnings;
    out.stats = traj.stats;
  }
  return out;
}

double reduction(double j0, double j) { return (j0 - j) / j0 * 100.0; }

int cmd_simulate(const ScenarioFlags& flags, const std::string& csv_path, const std::string& json_path) {
  const Scenario sc = flags.resolve();
  if (sc.optimize) throw ValidationError("this scenario requests optimization; use the optimize subcommand");
  const ReleaseSchedule schedule = sc.schedule();

  const std::string csv_file = csv_path.empty() ? sc.trajectory_csv : csv_path;
  std::ofstream csv;
  if (!csv_file.empty()) {
    csv.open(csv_file);
    if (!csv) throw ValidationError("cannot write '" + csv_file + "'");
  }
  const SimOutcome run = run_scenario(sc, schedule, csv_file.empty() ? nullptr : &csv);
  ReleaseSchedule none;
  none.horizon = sc.horizon;
  const double j0 = schedule.size() == 0 ? run.cost : run_scenario(sc, none, nullptr).cost;

  json j;
  j["spec_version"] = kSpecVersion;
  j["command"] = "simulate";
  j["model"] = scenario_model_name(sc.model);
  j["preset"] = sc.preset;
  j["J"] = run.cost;
  j["J0"] = j0;
  j["reduction_percent"] = reduction(j0, run.cost);
  j["schedule"] = schedule_json(schedule);
  j["initial"] = {{"IH0", sc.ih0}, {"IM0", sc.im0}};
  j["tolerance"] = {{"rtol", sc.tol.rtol}, {"atol", sc.tol.atol}};
  j["steps"] = {{"accepted", run.stats.accepted}, {"rejected", run.stats.rejected}};
  j["warnings"] = run.warnings;
  if (!csv_file.empty()) j["trajectory_csv"] = csv_file;
  emit_json(j, json_path.empty() ? sc.summary_json : json_path);
  return kOk;
}

struct OptimizeFlags {
  std::size_t n = 10;
  double budget = 0.0;
  std::string mode = "times-and-weights";
  std::size_t seeds = 5;
  std::uint64_t seed = 1;
  std::size_t max_iterations = OptimizerOptions{}.max_iterations;
  std::string json_path;
  std::string history;
  std::string csv;
};

int cmd_optimize(const ScenarioFlags& flags, const OptimizeFlags& o, Parallelism par) {
  Scenario sc = flags.resolve();
  if (flags.config.empty()) {
    if (!sc.times.empty()) throw ValidationError("optimize takes n and C, not a schedule");
    sc.optimize = OptimizeRequest{o.n, o.budget, parse_mode(o.mode), o.seeds, o.seed};
    sc.validate();
  }
  if (!sc.optimize) throw ValidationError("the scenario has no optimizer request (n and C)");
  if (sc.ih0 != 20.0 || sc.im0 != 20.0) {
    throw ValidationError("the optimizer works from the default initial condition IH0 = IM0 = 20");
  }
  const OptimizeRequest& req = *sc.optimize;
  OptimizerOptions opts;
  opts.mode = req.mode;
  opts.seeds = req.seeds;
  opts.seed = req.seed;
  opts.tol = sc.tol;
  opts.par = par;
  opts.max_iterations = o.max_iterations;
  const auto res = optimize(sc.kind(), sc.params, req.n, req.budget, sc.horizon, opts);

  const std::string history = o.history.empty() ? sc.history_csv : o.history;
  if (!history.empty()) {
    std::ofstream out(history);
    if (!out) throw ValidationError("cannot write '" + history + "'");
    write_history_csv(out, res.history);
  }
  const std::string csv_file = o.csv.empty() ? sc.trajectory_csv : o.csv;
  if (!csv_file.empty()) {
    std::ofstream out(csv_file);
    if (!out) throw ValidationError("cannot write '" + csv_file + "'");
    run_scenario(sc, res.schedule, &out);
  }

  json j;
  j["spec_version"] = kSpecVersion;
  j["command"] = "optimize";
  j["model"] = scenario_model_name(sc.model);
  j["preset"] = sc.preset;
  j["mode"] = mode_name(req.mode);
  j["n"] = req.n;
  j["C"] = req.budget;
  j["J"] = res.cost;
  j["J0"] = res.uncontrolled;
  j["reduction_percent"] = res.reduction_percent();
  j["converged"] = res.converged;
  j["reason"] = res.reason;
  j["lambda"] = res.lambda;
  j["rho"] = res.rho;
  j["best_seed"] = res.seed;
  j["start_costs"] = res.start_costs;
  j["iterations"] = res.history.empty() ? 0 : res.history.back().iteration;
  j["schedule"] = schedule_json(res.schedule);
  if (!history.empty()) j["history_csv"] = history;
  if (!csv_file.empty()) j["trajectory_csv"] = csv_file;
  emit_json(j, o.json_path.empty() ? sc.summary_json : o.json_path);
  return kOk;
}

json r0_json(const R0Report& r) {
  return {{"label", r.label}, {"r0", r.r0}, {"basic", r.basic}, {"closed_form", r.closed_form}};
}

json equilibria_json(const EquilibriumSet& set) {
  json out = json::array();
  for (const auto& e : set.items) {
    json item = {{"label", e.label}, {"exists", e.exists}};
    if (e.exists) {
      item["state"] = e.state;
      item["residual"] = number(e.residual);
    }
    out.push_back(item);
  }
  return out;
}

int cmd_analyze(const ScenarioFlags& flags, const std::string& json_path) {
  const Scenario sc = flags.resolve();
  const EpiParams& q = sc.params;
  const double th = theta(q);
  const auto [wild, full] = r0_wb(q);

  json j;
  j["spec_version"] = kSpecVersion;
  j["command"] = "analyze";
  j["preset"] = sc.preset;
  j["K"] = q.K;
  j["K_star"] = q.k_star();
  j["r0"] = {{"sit", r0_json(r0_sit(q))}, {"wb", {r0_json(wild), r0_json(full)}}};
  j["theta"] = th;
  j["G_theta"] = big_G(th, q);
  j["equilibria"] = {{"seir", equilibria_json(equilibria_seir(q))}};
  json wb = json::object();
  for (double p : {0.0, th, 1.0}) {
    const std::string key = p == 0.0 ? "p=0" : p == 1.0 ? "p=1" : "p=theta";
    json item = {{"R_pstar", r_pstar(q, p)}};
    try {
      item["states"] = equilibria_json(equilibria_wb(q, p));
    } catch (const NumericalError& e) {
      item["error"] = e.what();
    }
    wb[key] = item;
  }
  j["equilibria"]["wb"] = wb;
  emit_json(j, json_path.empty() ? sc.summary_json : json_path);
  return kOk;
}

struct GradcheckFlags {
  std::size_t random = 0;
  std::uint64_t seed = 1;
  double budget = 0.0;
  double rtol = 1e-4;
  double floor = 1e-6;
  double sim_tol = 1e-10;
  FdOptions fd;
};

int cmd_gradcheck(const ScenarioFlags& flags, const GradcheckFlags& g, Parallelism par) {
  Scenario sc = flags.resolve();
  if (sc.model == ScenarioModel::seir) throw ValidationError("gradcheck needs a controlled model (sit or wb)");
  if (sc.ih0 != 20.0 || sc.im0 != 20.0) {
    throw ValidationError("gradients are computed from the default initial condition IH0 = IM0 = 20");
  }
  ReleaseSchedule schedule;
  if (g.random > 0) {
    const double budget = g.budget > 0.0 ? g.budget : sc.kind() == ModelKind::sit ? 3e7 : 1e4;
    schedule = random_schedule(g.random, budget, sc.horizon, g.seed);
  } else {
    schedule = sc.schedule();
  }
  if (schedule.size() == 0) throw ValidationError("gradcheck needs releases (--times/--weights or --random)");

  const auto var = grad_J(sc.kind(), sc.params, schedule, {g.sim_tol, g.sim_tol}, par);
  const auto fd = grad_J_fd(sc.kind(), sc.params, schedule, g.fd, par);

  std::cout << "k,parameter,value,variational,finite_difference,relative_error,scaled_error\n";
  double worst = 0.0;
  auto line = [&](std::size_t k, const char* what, double value, double a, double b) {
    const double rel = b != 0.0 ? std::abs(a - b) / std::abs(b) : std::abs(a - b);
    const double scaled = std::abs(a - b) / std::max(g.rtol * std::abs(b), g.floor);
    worst = std::max(worst, scaled);
    std::cout << k + 1 << ',' << what << ',' << format_double(value) << ',' << format_double(a) << ','
              << format_double(b) << ',' << format_double(rel) << ',' << format_double(scaled) << '\n';
  };
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    line(k, "t", schedule.times[k], var.dJ_dt[k], fd.dJ_dt[k]);
    line(k, "c", schedule.weights[k], var.dJ_dc[k], fd.dJ_dc[k]);
  }
  std::cerr << "worst scaled error " << format_double(worst) << " (pass at <= 1; rtol "
            << format_double(g.rtol) << ", floor " << format_double(g.floor) << ")\n";
  return worst <= 1.0 ? kOk : kNumerical;
}

struct ReproduceFlags {
  std::string table = "all";
  bool run_optimizer = false;
  std::size_t seeds = 5;
  std::uint64_t seed = 1;
  std::string json_path;
};

int cmd_reproduce(const ReproduceFlags& f, Parallelism par) {
  std::vector<PublishedRow> rows = f.table == "all" ? all_published_rows() : published_rows(f.table);
  const EpiParams q = EpiParams::dengue();
  const double j0_sit = uncontrolled_cost(ModelKind::sit, q, 450.0);
  const double j0_wb = uncontrolled_cost(ModelKind::wb, q, 450.0);

  bool all_pass = true;
  json out;
  out["spec_version"] = kSpecVersion;
  out["command"] = "reproduce";
  out["J0"] = {{"sit", j0_sit}, {"wb", j0_wb}};
  json items = json::array();
  std::cout << "table,source,kind,published_J,J,relative_error,published_reduction,reduction,status\n";
  auto line = [](const PublishedRow& row, const char* kind, double j, double rel, double red, bool ok) {
    std::cout << row.table << ',' << row.source << ',' << kind << ',' << format_double(row.cost) << ','
              << format_double(j) << ',' << format_double(rel) << ',' << format_double(row.reduction) << ','
              << format_double(red) << ',' << (ok ? "pass" : "FAIL") << '\n';
  };
  for (const auto& row : rows) {
    const double j0 = row.model == ModelKind::sit ? j0_sit : j0_wb;
    const double replay = cost_of(row.model, q, row.schedule);
    const bool replay_ok = replay_within(replay, row.cost);
    all_pass = all_pass && replay_ok;
    const double rel = (replay - row.cost) / row.cost;
    line(row, "replay", replay, rel, reduction(j0, replay), replay_ok);
    json item = {{"table", row.table}, {"source", row.source}, {"published_J", row.cost},
                 {"replay_J", replay}, {"replay_relative_error", rel}, {"replay_pass", replay_ok},
                 {"published_reduction", row.reduction}, {"replay_reduction", reduction(j0, replay)}};

    if (f.run_optimizer) {
      OptimizerOptions opts;
      opts.mode = row.mode;
      opts.seeds = f.seeds;
      opts.seed = f.seed;
      opts.par = par;
      const auto res = optimize(row.model, q, row.n, row.budget, 450.0, opts);
      const double orel = (res.cost - row.cost) / row.cost;
      const double red = res.reduction_percent();
      const bool ok = std::abs(orel) <= optimizer_rtol(row) &&
                      std::abs(red - row.reduction) <= reduction_tolerance_pp(row);
      all_pass = all_pass && ok;
      line(row, "optimize", res.cost, orel, red, ok);
      item["optimized"] = {{"J", res.cost}, {"relative_error", orel}, {"reduction", red},
                           {"pass", ok}, {"converged", res.converged}, {"reason", res.reason},
                           {"schedule", schedule_json(res.schedule)}};
    }
    items.push_back(item);
  }
  out["rows"] = items;
  out["pass"] = all_pass;
  if (!f.json_path.empty()) write_file(f.json_path, out.dump(2) + "\n");
  return all_pass ? kOk : kNumerical;
}

int cmd_plots(const PlotRequest& req, const std::string& out_path) {
  const auto header = read_csv_header(req.trajectory_csv);
  if (!req.baseline_csv.empty()) read_csv_header(req.baseline_csv);
  const std::string script = plot_script(req, header);
  if (out_path.empty()) {
    std::cout << script;
  } else {
    write_file(out_path, script);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal impulsive releases of sterile or Wolbachia-carrying mosquitoes"};
  app.require_subcommand(1);
  int threads = 0;
  bool serial = false;
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the runtime default)");
  app.add_flag("--serial", serial, "use the serial reference loops instead of OpenMP");

  ScenarioFlags sim_flags;
  std::string sim_csv;
  std::string sim_json;
  auto* sim = app.add_subcommand("simulate", "simulate a release schedule and report J");
  sim_flags.attach(sim, true);
  sim->add_option("--csv", sim_csv, "trajectory CSV");
  sim->add_option("--json", sim_json, "also write the summary here");

  ScenarioFlags opt_flags;
  OptimizeFlags opt;
  auto* optc = app.add_subcommand("optimize", "optimize release times (and sizes) for a budget");
  opt_flags.attach(optc, false);
  optc->add_option("--n", opt.n, "number of releases");
  optc->add_option("--C", opt.budget, "total released mosquitoes");
  optc->add_option("--mode", opt.mode, "times-only or times-and-weights");
  optc->add_option("--seeds", opt.seeds, "multistart count");
  optc->add_option("--seed", opt.seed, "first seed");
  optc->add_option("--max-iterations", opt.max_iterations, "gradient evaluations per start");
  optc->add_option("--json", opt.json_path, "also write the result here");
  optc->add_option("--history", opt.history, "iteration history CSV");
  optc->add_option("--csv", opt.csv, "trajectory CSV of the optimized schedule");

  ScenarioFlags an_flags;
  std::string an_json;
  auto* an = app.add_subcommand("analyze", "reproduction numbers, threshold and equilibria");
  an_flags.attach(an, false);
  an->add_option("--json", an_json, "also write the report here");

  ScenarioFlags gc_flags;
  GradcheckFlags gc;
  auto* gcc = app.add_subcommand("gradcheck", "compare variational and finite-difference gradients");
  gc_flags.attach(gcc, true);
  gcc->add_option("--random", gc.random, "use a random schedule with this many releases");
  gcc->add_option("--seed", gc.seed, "seed for --random");
  gcc->add_option("--C", gc.budget, "budget for --random");
  gcc->add_option("--threshold", gc.rtol, "relative agreement required");
  gcc->add_option("--floor", gc.floor, "absolute agreement floor");
  gcc->add_option("--h-time", gc.fd.h_time, "finite-difference step for times, days");
  gcc->add_option("--h-weight", gc.fd.h_weight_rel, "relative finite-difference step for sizes");

  ReproduceFlags rep;
  auto* repc = app.add_subcommand("reproduce", "replay (and optionally re-optimize) published schedules");
  repc->add_option("--table", rep.table, "sit10, sit20, sit10-fixed, sit20-fixed, wb or all");
  repc->add_flag("--optimize", rep.run_optimizer, "also run the multistart optimizer per row");
  repc->add_option("--seeds", rep.seeds, "multistart count");
  repc->add_option("--seed", rep.seed, "first seed");
  repc->add_option("--json", rep.json_path, "write a JSON report here");

  PlotRequest plot;
  std::string plot_out;
  plot.image = "figure.png";
  auto* plc = app.add_subcommand("plots", "write a gnuplot script for a trajectory CSV");
  plc->add_option("--trajectory", plot.trajectory_csv, "controlled trajectory CSV")->required();
  plc->add_option("--baseline", plot.baseline_csv, "uncontrolled trajectory CSV");
  plc->add_option("--image", plot.image, "png the script renders to");
  plc->add_option("--title", plot.title, "figure title");
  plc->add_option("--out", plot_out, "script path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  if (threads > 0) omp_set_num_threads(threads);
  const Parallelism par = serial ? Parallelism::serial : Parallelism::openmp;
  try {
    if (*sim) return cmd_simulate(sim_flags, sim_csv, sim_json);
    if (*optc) return cmd_optimize(opt_flags, opt, par);
    if (*an) return cmd_analyze(an_flags, an_json);
    if (*gcc) return cmd_gradcheck(gc_flags, gc, par);
    if (*repc) return cmd_reproduce(rep, par);
    if (*plc) return cmd_plots(plot, plot_out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
