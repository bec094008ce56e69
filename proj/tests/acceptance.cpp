// Acceptance driver: one PASS/FAIL line per criterion. Exit status is the
// number of failures (capped at 1) so ctest can run criteria one by one.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "support.hpp"
#include "vecctl/analysis.hpp"
#include "vecctl/gradients.hpp"
#include "vecctl/optimizer.hpp"
#include "vecctl/published.hpp"
#include "vecctl/systems.hpp"

using namespace vecctl;

namespace {

namespace tol {
constexpr double r0 = 0.01;
constexpr double basic = 0.02;
constexpr double analysis_seconds = 1.0;
constexpr double theta = 1e-4;
constexpr double g_theta_rel = 0.02;
constexpr double j0_rel = 0.01;
constexpr double grad_rtol = 1e-4;
constexpr double grad_floor = 1e-6;
constexpr double release_at_zero = 0.5;  // days
constexpr double lone_release = 2.0;     // days
constexpr double merged_rel = 0.02;
constexpr double optimizer_minutes = 30.0;
constexpr double residual = 1e-8;
constexpr double r0_forms = 1e-8;
constexpr double additivity = 1e-12;
constexpr double feasibility = 1e-6;
}  // namespace tol

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

bool near(double x, double target, double abs_tol) { return std::abs(x - target) <= abs_tol; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void reproduction_numbers(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto q = EpiParams::dengue();
  const auto s = r0_sit(q);
  const auto [m, w] = r0_wb(q);
  const auto eq = equilibria_seir(q);
  const double elapsed = seconds_since(t0);
  o.detail << "r0_sit=" << s.r0 << " r0_wb=" << m.r0 << "/" << w.r0 << " basic=" << s.basic << "/" << m.basic
           << "/" << w.basic << " t=" << elapsed << "s";
  o.require(near(s.r0, 1.67, tol::r0), "r0_sit");
  o.require(near(m.r0, 1.68, tol::r0) && near(w.r0, 1.04, tol::r0), "r0_wb");
  o.require(near(s.basic, 2.80, tol::basic) && near(m.basic, 2.83, tol::basic) && near(w.basic, 1.08, tol::basic),
            "basic numbers");
  o.require(!eq.items.empty(), "equilibria");
  o.require(elapsed < tol::analysis_seconds, "runtime");
}

void threshold(Outcome& o) {
  const auto q = EpiParams::dengue();
  const double th = theta(q);
  const double g = big_G(th, q);
  o.detail << "theta=" << th << " G(theta)=" << g;
  o.require(near(th, 0.20202, tol::theta), "theta");
  o.require(std::abs(g - 14850.0) <= tol::g_theta_rel * 14850.0, "G(theta)");
}

void baselines(Outcome& o) {
  const auto q = EpiParams::dengue();
  const double sit = uncontrolled_cost(ModelKind::sit, q, 450);
  const double wb = uncontrolled_cost(ModelKind::wb, q, 450);
  o.detail << "J0_sit=" << sit << " J0_wb=" << wb;
  o.require(std::abs(sit - kPublishedJ0Sit) <= tol::j0_rel * kPublishedJ0Sit, "J0_sit");
  o.require(std::abs(wb - kPublishedJ0Wb) <= tol::j0_rel * kPublishedJ0Wb, "J0_wb");
}

void replays(Outcome& o) {
  const auto q = EpiParams::dengue();
  double worst = 0.0;
  for (const auto& row : all_published_rows()) {
    const double j = cost_of(row.model, q, row.schedule);
    worst = std::max(worst, std::abs(j - row.cost) / row.cost);
    o.require(replay_within(j, row.cost), row.source + " J=" + std::to_string(j));
  }
  o.detail << all_published_rows().size() << " schedules, worst relative error " << worst;
}

void gradients(Outcome& o) {
  const auto q = EpiParams::dengue();
  const SimTolerance fine{1e-10, 1e-10};
  double worst = 0.0;
  int checked = 0;
  for (const auto model : {ModelKind::sit, ModelKind::wb}) {
    const double budget = model == ModelKind::sit ? 3e7 : 1e4;
    for (const std::size_t n : {1u, 3u, 10u}) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = random_schedule(n, budget, 450, 1000 * n + seed);
        const auto var = grad_J(model, q, s, fine);
        const auto fd = grad_J_fd(model, q, s);
        const double mismatch = gradient_mismatch(var, fd, tol::grad_rtol, tol::grad_floor);
        worst = std::max(worst, mismatch);
        ++checked;
        if (mismatch > 1.0) {
          o.require(false, std::string(model_name(model)) + " n=" + std::to_string(n) + " seed " + std::to_string(seed));
        }
      }
    }
  }
  o.detail << checked << " schedules, worst scaled mismatch " << worst;
}

void wolbachia_regimes(Outcome& o) {
  const auto q = EpiParams::dengue();
  OptimizerOptions opts;
  opts.mode = OptimizeMode::times_only;
  const auto big = optimize(ModelKind::wb, q, 1, 2e4, 450, opts);
  const auto small = optimize(ModelKind::wb, q, 1, 1e4, 450, opts);
  const auto five = optimize(ModelKind::wb, q, 5, 2e4, 450, opts);
  o.detail << "t1(2e4)=" << big.schedule.times[0] << " t1(1e4)=" << small.schedule.times[0]
           << " n=5 -> " << five.schedule.size() << " release(s) at t=" << five.schedule.times[0]
           << " J=" << five.cost << " vs " << big.cost;
  o.require(near(big.schedule.times[0], 0.0, tol::release_at_zero), "C=2e4 release time");
  o.require(near(small.schedule.times[0], 147.5, tol::lone_release), "C=1e4 release time");
  o.require(five.schedule.size() == 1 && near(five.schedule.times[0], 0.0, tol::release_at_zero), "n=5 merge");
  o.require(std::abs(five.cost - big.cost) <= tol::merged_rel * big.cost, "n=5 cost");
}

void optimizer_tables(Outcome& o) {
  const auto q = EpiParams::dengue();
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& id : {"sit10", "sit20", "sit10-fixed", "sit20-fixed"}) {
    for (const auto& row : published_rows(id)) {
      OptimizerOptions opts;
      opts.mode = row.mode;
      const auto r = optimize(row.model, q, row.n, row.budget, 450, opts);
      const double rel = std::abs(r.cost - row.cost) / row.cost;
      const double dpp = std::abs(r.reduction_percent() - row.reduction);
      o.detail << row.source << " n=" << row.n << " C=" << row.budget << " " << mode_name(row.mode) << ": J=" << r.cost
               << " (" << rel * 100 << "%) red=" << r.reduction_percent() << "; ";
      o.require(rel <= optimizer_rtol(row), row.source + " J");
      o.require(dpp <= reduction_tolerance_pp(row), row.source + " reduction");
    }
  }
  const double minutes = seconds_since(t0) / 60.0;
  o.detail << "total " << minutes << " min";
  o.require(minutes < tol::optimizer_minutes, "runtime");
}

void properties(Outcome& o) {
  const auto q = EpiParams::dengue();

  double residual = 0.0;
  for (const auto& e : equilibria_seir(q).items) residual = std::max(residual, e.residual);
  for (double p : {0.0, theta(q), 1.0}) {
    for (const auto& e : equilibria_wb(q, p).items) {
      if (e.exists) residual = std::max(residual, e.residual);
    }
  }
  std::mt19937_64 rng(2024);
  double forms = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto r = testing::random_params(rng);
    for (const auto& e : equilibria_seir(r).items) {
      if (e.exists) residual = std::max(residual, e.residual);
    }
    const auto s = r0_sit(r);
    const auto [m, w] = r0_wb(r);
    for (const auto* x : {&s, &m, &w}) forms = std::max(forms, std::abs(x->r0 - x->closed_form) / x->closed_form);
  }
  o.require(residual < tol::residual, "equilibrium residual");
  o.require(forms < tol::r0_forms, "closed form vs spectral");

  const double split = cost_of(ModelKind::sit, q, ReleaseSchedule::from({50.0, 50.0}, {1e7, 2e7}, 450));
  const double joined = cost_of(ModelKind::sit, q, ReleaseSchedule::from({50.0}, {3e7}, 450));
  double additivity = std::abs(split - joined) / joined;
  const WbSystem w{q};
  for (double p : {0.0, 0.05, 0.3}) {
    const double twice = w.jump(w.jump(p, 3000.0, nullptr), 5000.0, nullptr);
    additivity = std::max(additivity, std::abs(twice - w.jump(p, 8000.0, nullptr)));
  }
  o.require(additivity <= tol::additivity, "jump additivity");

  bool monotone = true;
  const double dirac_sit = cost_of(ModelKind::sit, q, ReleaseSchedule::from({60.0}, {2e7}, 450), {1e-11, 1e-11});
  const double dirac_wb = cost_of(ModelKind::wb, q, ReleaseSchedule::from({60.0}, {8000.0}, 450), {1e-11, 1e-11});
  double prev_sit = 1e300;
  double prev_wb = 1e300;
  for (double eps : {1.0, 0.1, 0.01}) {
    const double es = std::abs(testing::box_pulse_sit(q, 60.0, 2e7, eps) - dirac_sit);
    const double ew = std::abs(testing::box_pulse_wb(q, 60.0, 8000.0, eps) - dirac_wb);
    monotone = monotone && es < prev_sit && ew < prev_wb;
    prev_sit = es;
    prev_wb = ew;
  }
  o.require(monotone, "box-pulse convergence");

  bool idempotent = true;
  std::uniform_real_distribution<double> wide(-100.0, 550.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> t(1 + i % 20);
    for (auto& x : t) x = wide(rng);
    const auto once = project_times(t, 450);
    idempotent = idempotent && project_times(once, 450) == once;
  }
  o.require(idempotent, "projection idempotence");

  OptimizerOptions opts;
  opts.seeds = 1;
  const auto r = optimize(ModelKind::sit, q, 10, 3e7, 450, opts);
  const double gap = std::abs(r.schedule.total() - 3e7) / 3e7;
  bool nonnegative = std::all_of(r.schedule.weights.begin(), r.schedule.weights.end(), [](double c) { return c >= 0; });
  o.require(gap <= tol::feasibility && nonnegative, "feasibility");

  o.detail << "residual=" << residual << " r0 forms=" << forms << " additivity=" << additivity
           << " box errors=" << prev_sit << "/" << prev_wb << " budget gap=" << gap;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-8)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<void(Outcome&)>> checks = {
      reproduction_numbers, threshold, baselines, replays, gradients, wolbachia_regimes, optimizer_tables, properties};
  int failures = 0;
  for (int k = 1; k <= 8; ++k) {
    if (only != 0 && k != only) continue;
    Outcome o;
    o.detail.precision(8);
    try {
      checks[k - 1](o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %d: %s  %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
