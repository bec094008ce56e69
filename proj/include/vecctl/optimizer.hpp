#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vecctl/gradients.hpp"
#include "vecctl/impulse.hpp"

namespace vecctl {

enum class OptimizeMode { times_only, times_and_weights };
std::string_view mode_name(OptimizeMode mode);
OptimizeMode parse_mode(std::string_view name);

/// Clamp every time to [0, T], then sort.
std::vector<double> project_times(std::vector<double> times, double horizon);

/// Releases closer than eps_t (consecutive gaps) are merged into one at the
/// weight-averaged time carrying the summed weight.
ReleaseSchedule merge_coincident(const ReleaseSchedule& schedule, double eps_t);

struct TimeStepPolicy {
  double max_move = 10.0;  // largest displacement of any release on the first trial, days
  double min_move = 1e-6;  // backtracking floor, days
  double armijo = 1e-4;
  /// Optional first trial displacement in days (for example a quasi-Newton
  /// direction). It must be a descent direction. When empty the gradient is
  /// scaled so that its largest entry moves max_move.
  std::vector<double> direction;
};

struct TimeStep {
  ReleaseSchedule schedule;
  double cost = 0.0;
  double move = 0.0;   // accepted largest displacement, days; 0 if none
  double alpha = 0.0;  // accepted backtracking factor
  bool stalled = false;
  std::size_t evaluations = 0;
  /// Release i of the new schedule was release order[i] of the old one.
  std::vector<std::size_t> order;
};

/// One projected-gradient step t <- P(t - eps_t grad_t J), halved until the
/// Armijo condition holds or the largest move drops below the floor (stall;
/// schedule unchanged).
TimeStep descend_times(ModelKind model, const EpiParams& params, const ReleaseSchedule& schedule,
                       const GradientReport& grad, const TimeStepPolicy& policy,
                       const SimTolerance& tol = {});
TimeStep descend_times(ModelKind model, const EpiParams& params, const ReleaseSchedule& schedule,
                       const TimeStepPolicy& policy, const SimTolerance& tol = {});

struct WeightStep {
  ReleaseSchedule schedule;
  double lambda = 0.0;
  double eps_c = 0.0;
};

/// One augmented-Lagrangian step on the weights with a fixed eps_c:
///   c <- max(c - eps_c (grad_c J + lambda + rho (sum c - C)), 0)
///   lambda <- max(lambda + rho (sum c - C), 0)
/// with both right-hand sides using the weights before the step.
WeightStep update_weights(const ReleaseSchedule& schedule, const std::vector<double>& grad_c,
                          double lambda, double rho, double eps_c);

/// L(u, lambda) = J + lambda (sum c - C) + rho/2 (sum c - C)^2.
double augmented_lagrangian(double cost, const ReleaseSchedule& schedule, double lambda, double rho);

struct IterationRecord {
  std::size_t iteration = 0;
  std::string phase;  // times, weights or restore
  double cost = 0.0;
  double budget_gap = 0.0;  // sum c - C
  double step = 0.0;        // days for times, eps_c for weights
  double lambda = 0.0;
  std::size_t releases = 0;
};

struct OptimizerOptions {
  OptimizeMode mode = OptimizeMode::times_and_weights;
  std::size_t seeds = 5;
  std::uint64_t seed = 1;
  std::size_t patience = 25;
  double flat_rtol = 1e-8;
  std::size_t max_iterations = 1500;  // gradient evaluations per start
  std::size_t phase_iterations = 150;
  std::size_t max_cycles = 12;
  double merge_eps = 1e-6;  // days
  double rho_scale = 100.0;  // rho = rho_scale * J0 / C^2
  TimeStepPolicy time_policy;
  std::size_t memory = 8;         // quasi-Newton pairs kept for the time phase
  double max_trial_move = 50.0;   // cap on a quasi-Newton trial displacement, days
  double weight_fraction = 0.2;  // first trial moves some c_i by this fraction of C/n
  SimTolerance tol{};
  Parallelism par = Parallelism::openmp;
  /// Optional starting times for every start (random when empty).
  std::vector<double> initial_times;
};

struct OptimizationResult {
  ReleaseSchedule schedule;
  double cost = 0.0;
  double uncontrolled = 0.0;
  double lambda = 0.0;
  double rho = 0.0;
  std::vector<IterationRecord> history;
  bool converged = false;
  std::string reason;
  std::uint64_t seed = 0;
  std::vector<double> start_costs;  // final J of every start, in seed order

  [[nodiscard]] double reduction_percent() const { return (uncontrolled - cost) / uncontrolled * 100.0; }
};

/// Single start from `seed`.
OptimizationResult optimize_once(ModelKind model, const EpiParams& params, std::size_t n, double budget,
                                 double horizon, const OptimizerOptions& opts, std::uint64_t seed);

/// Multistart over opts.seeds consecutive seeds; returns the best run.
OptimizationResult optimize(ModelKind model, const EpiParams& params, std::size_t n, double budget,
                            double horizon, const OptimizerOptions& opts = {});

void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history);

}  // namespace vecctl
