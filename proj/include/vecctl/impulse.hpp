#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "vecctl/model.hpp"
#include "vecctl/ode.hpp"
#include "vecctl/params.hpp"
#include "vecctl/systems.hpp"
#include "vecctl/textio.hpp"

namespace vecctl {

enum class ModelKind { sit, wb };

std::string_view model_name(ModelKind model);
ModelKind parse_model(std::string_view name);

/// Release times t_1 <= ... <= t_n in [0, T] with sizes c_i >= 0 and budget C.
struct ReleaseSchedule {
  std::vector<double> times;
  std::vector<double> weights;
  double budget = 0.0;
  double horizon = 450.0;

  [[nodiscard]] std::size_t size() const { return times.size(); }
  [[nodiscard]] double total() const;
  /// |sum c - C| <= 1e-6 C.
  [[nodiscard]] bool feasible() const;
  /// Throws ValidationError on mismatched lengths, unordered or out-of-range
  /// times, negative weights or a nonpositive horizon.
  void validate() const;

  /// Every release gets C/n.
  static ReleaseSchedule equal_weights(std::vector<double> times, double budget, double horizon);
  /// Budget set to the sum of the given weights.
  static ReleaseSchedule from(std::vector<double> times, std::vector<double> weights,
                              double horizon);
};

/// Integration accuracy. The absolute tolerance is atol times one individual
/// per component (1/K for the proportion p, one person-day for the cost).
struct SimTolerance {
  double rtol = 1e-8;
  double atol = 1e-8;

  bool operator==(const SimTolerance&) const = default;
};

template <std::size_t N>
using Augmented = Vec<N + 1>;

template <std::size_t N>
struct ReleaseRecord {
  double time = 0.0;
  double weight = 0.0;
  Augmented<N> left{};
  Augmented<N> right{};
};

/// Piecewise-smooth solution; the last component of every stored state is the
/// accumulated cost.
template <std::size_t N>
struct Trajectory {
  double horizon = 0.0;
  std::vector<double> breakpoints;
  std::vector<ReleaseRecord<N>> releases;
  std::vector<DenseStep<N + 1>> steps;
  Augmented<N> initial{};
  Augmented<N> final_state{};
  std::vector<std::string> warnings;
  IntegrationStats stats;

  [[nodiscard]] double cost() const { return final_state[N]; }

  /// Right-continuous evaluation: at a release time this is the post-jump state.
  [[nodiscard]] Augmented<N> state_at(double t) const {
    if (t <= 0.0 && (releases.empty() || releases.front().time > 0.0)) return initial;
    if (t >= horizon) return final_state;
    // Releases at exactly t take precedence (zero-length segments have no steps).
    Augmented<N> out{};
    bool found_release = false;
    for (const auto& r : releases) {
      if (r.time == t) {
        out = r.right;
        found_release = true;
      }
    }
    if (found_release) return out;
    if (steps.empty()) return initial;
    auto it = std::upper_bound(steps.begin(), steps.end(), t,
                               [](double v, const DenseStep<N + 1>& s) { return v < s.t0; });
    if (it == steps.begin()) return initial;
    --it;
    return (*it)(std::min(t, it->t1()));
  }

  /// Left limit at t (equal to state_at(t) away from releases).
  [[nodiscard]] Augmented<N> state_left(double t) const {
    for (const auto& r : releases) {
      if (r.time == t) return r.left;
    }
    return state_at(t);
  }
};

namespace detail {

template <std::size_t N>
Tolerances<N + 1> augmented_tolerance(const Vec<N>& unit, const SimTolerance& tol) {
  Tolerances<N + 1> out;
  out.rtol = tol.rtol;
  for (std::size_t i = 0; i < N; ++i) out.atol[i] = tol.atol * unit[i];
  out.atol[N] = tol.atol;
  return out;
}

template <std::size_t N>
void check_nonnegative(const Augmented<N>& x, const Vec<N>& scale, double t) {
  for (std::size_t i = 0; i < N; ++i) {
    if (x[i] < -1e-9 * scale[i] || !std::isfinite(x[i])) {
      throw NumericalError("state component " + std::to_string(i) + " reached " +
                           format_double(x[i]) + " at t = " + format_double(t));
    }
  }
}

}  // namespace detail

/// Integrates a system with impulsive releases, restarting the integrator at
/// each release time and accumulating the cost channel J' = x[kInfected].
/// `System` follows the SitSystem/WbSystem interface. Dense steps are kept only
/// when `keep_dense` is set.
template <class System>
Trajectory<System::N> simulate_system(const System& sys, const ReleaseSchedule& schedule,
                                      const Vec<System::N>& init, const SimTolerance& tol,
                                      bool keep_dense = true) {
  constexpr std::size_t N = System::N;
  schedule.validate();
  const double max_release =
      schedule.weights.empty() ? 0.0
                               : *std::max_element(schedule.weights.begin(), schedule.weights.end());
  const Vec<N> scale = sys.scale(max_release);
  const auto atol = detail::augmented_tolerance<N>(sys.unit(), tol);

  Trajectory<N> traj;
  traj.horizon = schedule.horizon;
  traj.breakpoints.push_back(0.0);
  for (double t : schedule.times) traj.breakpoints.push_back(t);
  traj.breakpoints.push_back(schedule.horizon);

  Augmented<N> x{};
  for (std::size_t i = 0; i < N; ++i) x[i] = init[i];
  x[N] = 0.0;
  traj.initial = x;
  detail::check_nonnegative<N>(x, scale, 0.0);

  auto rhs = [&sys](double, const Augmented<N>& z) {
    Vec<N> s;
    for (std::size_t i = 0; i < N; ++i) s[i] = z[i];
    const Vec<N> d = sys.rhs(s);
    Augmented<N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = d[i];
    out[N] = z[System::kInfected];
    return out;
  };

  auto advance = [&](double from, double to) {
    if (to <= from) return;
    const std::size_t first = traj.steps.size();
    x = integrate_dp5<N + 1>(rhs, from, to, x, atol, keep_dense ? &traj.steps : nullptr,
                             &traj.stats);
    if (keep_dense) {
      for (std::size_t s = first; s < traj.steps.size(); ++s) {
        detail::check_nonnegative<N>(traj.steps[s].coeff[0], scale, traj.steps[s].t0);
      }
    }
    detail::check_nonnegative<N>(x, scale, to);
  };

  double t = 0.0;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    advance(t, schedule.times[k]);
    t = schedule.times[k];
    ReleaseRecord<N> rec;
    rec.time = t;
    rec.weight = schedule.weights[k];
    rec.left = x;
    bool clamped = false;
    x[System::kControl] = sys.jump(x[System::kControl], schedule.weights[k], &clamped);
    if (clamped) {
      traj.warnings.push_back("release " + std::to_string(k + 1) + " at t = " + format_double(t) +
                              ": control component clamped to its admissible range");
    }
    rec.right = x;
    traj.releases.push_back(rec);
  }
  advance(t, schedule.horizon);
  traj.final_state = x;
  return traj;
}

Trajectory<sit::kDim> simulate_sit(const EpiParams& params, const ReleaseSchedule& schedule,
                                   const SitState& init, const SimTolerance& tol = {},
                                   bool keep_dense = true);
Trajectory<wb::kDim> simulate_wb(const EpiParams& params, const ReleaseSchedule& schedule,
                                 const WbState& init, const SimTolerance& tol = {},
                                 bool keep_dense = true);

/// (H - I_H0, 0, I_H0, K* - I_M0, 0, I_M0, 0).
SitState default_sit_init(const EpiParams& params, double ih0 = 20.0, double im0 = 20.0);
/// (H - I_H0, 0, I_H0, 0, I_M0, 0, 0, 0).
WbState default_wb_init(const EpiParams& params, double ih0 = 20.0, double im0 = 20.0);

/// Cost J of a schedule from the default initial condition of the model,
/// without storing dense output.
double cost_of(ModelKind model, const EpiParams& params, const ReleaseSchedule& schedule,
               const SimTolerance& tol = {});

/// Uncontrolled cost J_0 on [0, T].
double uncontrolled_cost(ModelKind model, const EpiParams& params, double horizon,
                         const SimTolerance& tol = {});

/// sum_{t_j <= t} c_j exp(-d_S (t - t_j)); right-continuous at release times.
double sterile_population(const ReleaseSchedule& schedule, double d_S, double t);

template <std::size_t N>
double cost_J(const Trajectory<N>& traj) {
  return traj.cost();
}

std::vector<std::string> component_names(ModelKind model);

/// n sorted uniform times on [0, T]; weights are C/n scaled by a uniform
/// factor in [0.5, 1.5]. The budget is set to the sum of the weights.
ReleaseSchedule random_schedule(std::size_t n, double budget, double horizon, std::uint64_t seed);

/// Writes `time,<components...>,cost` with one row per accepted step start,
/// the final state, and explicit left/right rows at each release.
void write_trajectory_csv(std::ostream& out, const Trajectory<sit::kDim>& traj);
void write_trajectory_csv(std::ostream& out, const Trajectory<wb::kDim>& traj);

}  // namespace vecctl
