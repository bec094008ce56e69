#include "vecctl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <exception>
#include <numeric>
#include <ostream>
#include <random>

namespace vecctl {

std::string_view mode_name(OptimizeMode mode) {
  return mode == OptimizeMode::times_only ? "times-only" : "times-and-weights";
}

OptimizeMode parse_mode(std::string_view name) {
  if (name == "times-only") return OptimizeMode::times_only;
  if (name == "times-and-weights") return OptimizeMode::times_and_weights;
  throw ValidationError("unknown mode '" + std::string(name) +
                        "' (expected times-only or times-and-weights)");
}

std::vector<double> project_times(std::vector<double> times, double horizon) {
  for (double& t : times) t = std::clamp(t, 0.0, horizon);
  std::sort(times.begin(), times.end());
  return times;
}

namespace {

// Clamps times and sorts them with their weights attached.
ReleaseSchedule project_schedule(const ReleaseSchedule& s, std::vector<std::size_t>& order) {
  order.resize(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> clamped(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) clamped[i] = std::clamp(s.times[i], 0.0, s.horizon);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return clamped[a] < clamped[b]; });
  ReleaseSchedule out = s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.times[i] = clamped[order[i]];
    out.weights[i] = s.weights[order[i]];
  }
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Limited-memory BFGS product -H g restricted to the free coordinates.
class QuasiNewton {
 public:
  explicit QuasiNewton(std::size_t memory) : memory_(memory) {}

  void reset() {
    s_.clear();
    y_.clear();
  }
  [[nodiscard]] bool empty() const { return s_.empty(); }

  void update(std::vector<double> s, std::vector<double> y) {
    const double sy = dot(s, y);
    // Skipping pairs without positive curvature keeps H positive definite.
    if (!(sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y)))) return;
    s_.push_back(std::move(s));
    y_.push_back(std::move(y));
    if (s_.size() > memory_) {
      s_.pop_front();
      y_.pop_front();
    }
  }

  [[nodiscard]] std::vector<double> direction(std::vector<double> q, const std::vector<bool>& free) const {
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (!free[i]) q[i] = 0.0;
    }
    const std::size_t m = s_.size();
    std::vector<double> alpha(m);
    for (std::size_t j = m; j-- > 0;) {
      alpha[j] = dot(s_[j], q) / dot(s_[j], y_[j]);
      for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[j] * y_[j][i];
    }
    const double gamma = dot(s_.back(), y_.back()) / dot(y_.back(), y_.back());
    for (double& v : q) v *= gamma;
    for (std::size_t j = 0; j < m; ++j) {
      const double beta = dot(y_[j], q) / dot(s_[j], y_[j]);
      for (std::size_t i = 0; i < q.size(); ++i) q[i] += s_[j][i] * (alpha[j] - beta);
    }
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = free[i] ? -q[i] : 0.0;
    return q;
  }

 private:
  std::size_t memory_;
  std::deque<std::vector<double>> s_;
  std::deque<std::vector<double>> y_;
};

// Coordinates pinned at 0 or T with the gradient pushing them outwards.
std::vector<bool> free_coordinates(const std::vector<double>& x, const std::vector<double>& g,
                                   double lower, double upper) {
  std::vector<bool> free(x.size(), true);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if ((x[i] <= lower && g[i] > 0.0) || (x[i] >= upper && g[i] < 0.0)) free[i] = false;
  }
  return free;
}

bool identity(const std::vector<std::size_t>& order) {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] != i) return false;
  }
  return true;
}

bool flat(const std::vector<double>& values, std::size_t patience, double rtol) {
  if (values.size() <= patience) return false;
  const double then = values[values.size() - 1 - patience];
  const double now = values.back();
  return std::abs(then - now) <= rtol * std::max(std::abs(now), 1e-300);
}

}  // namespace

ReleaseSchedule merge_coincident(const ReleaseSchedule& schedule, double eps_t) {
  ReleaseSchedule out = schedule;
  out.times.clear();
  out.weights.clear();
  std::size_t i = 0;
  while (i < schedule.size()) {
    std::size_t j = i + 1;
    while (j < schedule.size() && schedule.times[j] - schedule.times[j - 1] < eps_t) ++j;
    double weight = 0.0;
    double moment = 0.0;
    double plain = 0.0;
    for (std::size_t m = i; m < j; ++m) {
      weight += schedule.weights[m];
      moment += schedule.weights[m] * schedule.times[m];
      plain += schedule.times[m];
    }
    const double t = weight > 0.0 ? moment / weight : plain / static_cast<double>(j - i);
    out.times.push_back(j - i == 1 ? schedule.times[i] : std::clamp(t, schedule.times[i], schedule.times[j - 1]));
    out.weights.push_back(weight);
    i = j;
  }
  return out;
}

TimeStep descend_times(ModelKind model, const EpiParams& params, const ReleaseSchedule& schedule,
                       const GradientReport& grad, const TimeStepPolicy& policy,
                       const SimTolerance& tol) {
  TimeStep out;
  out.schedule = schedule;
  out.cost = grad.cost;
  out.order.resize(schedule.size());
  std::iota(out.order.begin(), out.order.end(), 0);
  const std::size_t n = schedule.size();
  const double scale = max_abs(grad.dJ_dt);
  if (scale == 0.0 || n == 0) return out;
  if (!policy.direction.empty() && policy.direction.size() != n) {
    throw ValidationError("the trial direction needs one entry per release");
  }

  std::vector<double> direction = policy.direction;
  if (direction.empty()) {
    direction.resize(n);
    for (std::size_t i = 0; i < n; ++i) direction[i] = -policy.max_move * grad.dJ_dt[i] / scale;
  }
  const double longest = max_abs(direction);

  double alpha = 1.0;
  while (alpha * longest >= policy.min_move) {
    ReleaseSchedule trial = schedule;
    double decrease = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      trial.times[i] = std::clamp(schedule.times[i] + alpha * direction[i], 0.0, schedule.horizon);
      decrease += grad.dJ_dt[i] * (schedule.times[i] - trial.times[i]);
    }
    std::vector<std::size_t> order;
    trial = project_schedule(trial, order);
    const double j = cost_of(model, params, trial, tol);
    ++out.evaluations;
    if (decrease > 0.0 && j <= grad.cost - policy.armijo * decrease) {
      out.schedule = trial;
      out.cost = j;
      out.move = alpha * longest;
      out.alpha = alpha;
      out.order = std::move(order);
      return out;
    }
    alpha *= 0.5;
  }
  out.stalled = true;
  return out;
}

TimeStep descend_times(ModelKind model, const EpiParams& params, const ReleaseSchedule& schedule,
                       const TimeStepPolicy& policy, const SimTolerance& tol) {
  const auto grad = grad_J(model, params, schedule, tol, Parallelism::openmp, GradientParts::times);
  return descend_times(model, params, schedule, grad, policy, tol);
}

WeightStep update_weights(const ReleaseSchedule& schedule, const std::vector<double>& grad_c,
                          double lambda, double rho, double eps_c) {
  if (grad_c.size() != schedule.size()) throw ValidationError("gradient and schedule lengths differ");
  const double gap = schedule.total() - schedule.budget;
  WeightStep out;
  out.schedule = schedule;
  out.eps_c = eps_c;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    out.schedule.weights[i] =
        std::max(schedule.weights[i] - eps_c * (grad_c[i] + lambda + rho * gap), 0.0);
  }
  out.lambda = std::max(lambda + rho * gap, 0.0);
  return out;
}

double augmented_lagrangian(double cost, const ReleaseSchedule& schedule, double lambda, double rho) {
  const double gap = schedule.total() - schedule.budget;
  return cost + lambda * gap + 0.5 * rho * gap * gap;
}

OptimizationResult optimize_once(ModelKind model, const EpiParams& params, std::size_t n,
                                 double budget, double horizon, const OptimizerOptions& opts,
                                 std::uint64_t seed) {
  if (n == 0) throw ValidationError("need at least one release");
  if (!(budget > 0.0)) throw ValidationError("budget C must be positive");
  params.validate();

  std::mt19937_64 rng(seed);
  std::vector<double> times = opts.initial_times;
  if (times.empty()) {
    std::uniform_real_distribution<double> uniform(0.0, horizon);
    times.resize(n);
    for (double& t : times) t = uniform(rng);
  } else if (times.size() != n) {
    throw ValidationError("initial_times must have n entries");
  }
  ReleaseSchedule sched = ReleaseSchedule::equal_weights(project_times(times, horizon), budget, horizon);

  OptimizationResult res;
  res.seed = seed;
  res.uncontrolled = uncontrolled_cost(model, params, horizon, opts.tol);
  res.rho = opts.rho_scale * res.uncontrolled / (budget * budget);
  double lambda = 0.0;
  double cost = cost_of(model, params, sched, opts.tol);
  std::size_t iter = 0;

  auto record = [&](const std::string& phase, double step) {
    IterationRecord r;
    r.iteration = iter;
    r.phase = phase;
    r.cost = cost;
    r.budget_gap = sched.total() - budget;
    r.step = step;
    r.lambda = lambda;
    r.releases = sched.size();
    res.history.push_back(r);
  };
  record("start", 0.0);

  QuasiNewton times_qn(opts.memory);
  double fraction = opts.weight_fraction;
  bool finished = false;
  for (std::size_t cycle = 0; cycle < opts.max_cycles && !finished; ++cycle) {
    const double cycle_start = cost;

    // Times, to flatness.
    std::vector<double> costs{cost};
    bool stalled = false;
    bool flat_times = false;
    std::vector<double> prev_t;
    std::vector<double> prev_g;
    std::vector<bool> prev_free;
    times_qn.reset();
    for (std::size_t it = 0; it < opts.phase_iterations && iter < opts.max_iterations; ++it) {
      const auto grad = grad_J(model, params, sched, opts.tol, opts.par, GradientParts::times);
      ++iter;
      const auto free = free_coordinates(sched.times, grad.dJ_dt, 0.0, horizon);
      if (!prev_t.empty() && free == prev_free) {
        std::vector<double> ds(sched.size());
        std::vector<double> dg(sched.size());
        for (std::size_t i = 0; i < sched.size(); ++i) {
          ds[i] = sched.times[i] - prev_t[i];
          dg[i] = grad.dJ_dt[i] - prev_g[i];
        }
        times_qn.update(std::move(ds), std::move(dg));
      } else {
        times_qn.reset();
      }

      TimeStepPolicy policy = opts.time_policy;
      TimeStep step;
      if (!times_qn.empty()) {
        std::vector<double> d = times_qn.direction(grad.dJ_dt, free);
        if (dot(d, grad.dJ_dt) < 0.0) {
          const double longest = max_abs(d);
          if (longest > opts.max_trial_move) {
            for (double& v : d) v *= opts.max_trial_move / longest;
          }
          policy.direction = std::move(d);
          step = descend_times(model, params, sched, grad, policy, opts.tol);
        } else {
          step.stalled = true;
        }
        if (step.stalled) {
          times_qn.reset();
          policy.direction.clear();
        }
      }
      if (policy.direction.empty()) step = descend_times(model, params, sched, grad, policy, opts.tol);
      if (step.stalled) {
        stalled = true;
        record("times", 0.0);
        break;
      }
      const std::size_t before = step.schedule.size();
      if (identity(step.order)) {
        prev_t = sched.times;
        prev_g = grad.dJ_dt;
        prev_free = free;
      } else {
        prev_t.clear();
      }
      sched = merge_coincident(step.schedule, opts.merge_eps);
      if (sched.size() == before) {
        cost = step.cost;
      } else {
        cost = cost_of(model, params, sched, opts.tol);
        prev_t.clear();
      }
      record("times", step.move);
      costs.push_back(cost);
      if (flat(costs, opts.patience, opts.flat_rtol)) {
        flat_times = true;
        break;
      }
    }
    if (opts.mode == OptimizeMode::times_only) {
      res.converged = stalled || flat_times;
      res.reason = flat_times ? "flat" : stalled ? "step floor" : "iteration cap";
      if (!res.converged && cycle + 1 < opts.max_cycles && iter < opts.max_iterations) continue;
      finished = true;
      break;
    }

    // Weights, one augmented-Lagrangian step per iteration.
    std::vector<double> lagrangians{augmented_lagrangian(cost, sched, lambda, res.rho)};
    bool weights_done = false;
    for (std::size_t it = 0; it < opts.phase_iterations && iter < opts.max_iterations; ++it) {
      const auto grad = grad_J(model, params, sched, opts.tol, opts.par, GradientParts::weights);
      ++iter;
      const double gap = sched.total() - budget;
      std::vector<double> direction(sched.size());
      for (std::size_t i = 0; i < sched.size(); ++i) direction[i] = grad.dJ_dc[i] + lambda + res.rho * gap;
      const double scale = max_abs(direction);
      if (scale == 0.0) {
        weights_done = std::abs(gap) <= 1e-6 * budget;
        break;
      }
      const double current = augmented_lagrangian(grad.cost, sched, lambda, res.rho);
      double frac = fraction;
      bool accepted = false;
      while (frac >= 1e-9) {
        const double eps = frac * budget / static_cast<double>(sched.size()) / scale;
        WeightStep step = update_weights(sched, grad.dJ_dc, lambda, res.rho, eps);
        double decrease = 0.0;
        for (std::size_t i = 0; i < sched.size(); ++i) {
          decrease += direction[i] * (sched.weights[i] - step.schedule.weights[i]);
        }
        const double j = cost_of(model, params, step.schedule, opts.tol);
        if (augmented_lagrangian(j, step.schedule, lambda, res.rho) <=
            current - opts.time_policy.armijo * decrease) {
          sched = step.schedule;
          lambda = step.lambda;
          cost = j;
          fraction = std::min(2.0 * frac, opts.weight_fraction);
          record("weights", eps);
          accepted = true;
          break;
        }
        frac *= 0.5;
      }
      if (!accepted) {
        // No primal progress at this multiplier; still take the dual step.
        lambda = std::max(lambda + res.rho * gap, 0.0);
        record("weights", 0.0);
      }
      lagrangians.push_back(augmented_lagrangian(cost, sched, lambda, res.rho));
      if (flat(lagrangians, opts.patience, opts.flat_rtol) &&
          std::abs(sched.total() - budget) <= 1e-6 * budget) {
        weights_done = true;
        break;
      }
    }

    if (weights_done && std::abs(cost - cycle_start) <= opts.flat_rtol * cost * opts.patience) {
      res.converged = true;
      res.reason = "flat";
      finished = true;
    }
    if (iter >= opts.max_iterations) {
      res.reason = "iteration cap";
      finished = true;
    }
  }
  if (!finished && res.reason.empty()) res.reason = "cycle cap";

  if (opts.mode == OptimizeMode::times_and_weights && !sched.feasible()) {
    // Scale back onto the budget so the reported schedule is admissible.
    const double total = sched.total();
    if (total > 0.0) {
      for (double& c : sched.weights) c *= budget / total;
    } else {
      for (double& c : sched.weights) c = budget / static_cast<double>(sched.size());
    }
    cost = cost_of(model, params, sched, opts.tol);
    record("restore", 0.0);
  }
  if (res.reason.empty()) res.reason = "cycle cap";
  res.schedule = sched;
  res.cost = cost;
  res.lambda = lambda;
  return res;
}

OptimizationResult optimize(ModelKind model, const EpiParams& params, std::size_t n, double budget,
                            double horizon, const OptimizerOptions& opts) {
  const std::size_t starts = std::max<std::size_t>(opts.seeds, 1);
  std::vector<OptimizationResult> runs(starts);
  OptimizerOptions inner = opts;
  // Starts run side by side; the gradients inside each stay serial.
  if (opts.par == Parallelism::openmp) inner.par = Parallelism::serial;
  std::exception_ptr failure;
  const long count = static_cast<long>(starts);
#pragma omp parallel for schedule(dynamic) if (opts.par == Parallelism::openmp)
  for (long i = 0; i < count; ++i) {
    try {
      runs[static_cast<std::size_t>(i)] =
          optimize_once(model, params, n, budget, horizon, inner, opts.seed + static_cast<std::uint64_t>(i));
    } catch (...) {
#pragma omp critical(vecctl_optimize_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::size_t best = 0;
  for (std::size_t i = 1; i < starts; ++i) {
    if (runs[i].cost < runs[best].cost) best = i;
  }
  OptimizationResult out = runs[best];
  out.start_costs.clear();
  for (const auto& r : runs) out.start_costs.push_back(r.cost);
  return out;
}

void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history) {
  out << "iteration,phase,cost,budget_gap,step,lambda,releases\n";
  for (const auto& r : history) {
    out << r.iteration << ',' << r.phase << ',' << format_double(r.cost) << ','
        << format_double(r.budget_gap) << ',' << format_double(r.step) << ','
        << format_double(r.lambda) << ',' << r.releases << '\n';
  }
}

}  // namespace vecctl
