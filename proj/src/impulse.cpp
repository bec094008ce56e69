#include "vecctl/impulse.hpp"

#include <cmath>
#include <ostream>
#include <random>

namespace vecctl {

std::string_view model_name(ModelKind model) { return model == ModelKind::sit ? "sit" : "wb"; }

ModelKind parse_model(std::string_view name) {
  if (name == "sit") return ModelKind::sit;
  if (name == "wb") return ModelKind::wb;
  throw ValidationError("unknown model '" + std::string(name) + "' (expected sit or wb)");
}

double ReleaseSchedule::total() const {
  double s = 0.0;
  for (double c : weights) s += c;
  return s;
}

bool ReleaseSchedule::feasible() const { return std::abs(total() - budget) <= 1e-6 * budget; }

void ReleaseSchedule::validate() const {
  if (times.size() != weights.size()) {
    throw ValidationError("schedule has " + std::to_string(times.size()) + " times but " +
                          std::to_string(weights.size()) + " weights");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ValidationError("horizon must be positive and finite");
  }
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw ValidationError("budget must be >= 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0 && times[i] <= horizon)) {
      throw ValidationError("release time " + format_double(times[i]) + " lies outside [0, " +
                            format_double(horizon) + "]");
    }
    if (i > 0 && times[i] < times[i - 1]) throw ValidationError("release times must be nondecreasing");
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw ValidationError("release sizes must be finite and nonnegative");
    }
  }
}

ReleaseSchedule ReleaseSchedule::equal_weights(std::vector<double> times, double budget,
                                               double horizon) {
  ReleaseSchedule s;
  const double each = times.empty() ? 0.0 : budget / static_cast<double>(times.size());
  s.weights.assign(times.size(), each);
  s.times = std::move(times);
  s.budget = budget;
  s.horizon = horizon;
  return s;
}

ReleaseSchedule ReleaseSchedule::from(std::vector<double> times, std::vector<double> weights,
                                      double horizon) {
  ReleaseSchedule s;
  s.times = std::move(times);
  s.weights = std::move(weights);
  s.budget = s.total();
  s.horizon = horizon;
  return s;
}

Trajectory<sit::kDim> simulate_sit(const EpiParams& params, const ReleaseSchedule& schedule,
                                   const SitState& init, const SimTolerance& tol,
                                   bool keep_dense) {
  return simulate_system(SitSystem{params}, schedule, init, tol, keep_dense);
}

Trajectory<wb::kDim> simulate_wb(const EpiParams& params, const ReleaseSchedule& schedule,
                                 const WbState& init, const SimTolerance& tol, bool keep_dense) {
  if (!(init[wb::P] >= 0.0 && init[wb::P] <= 1.0)) {
    throw ValidationError("initial proportion p must lie in [0, 1]");
  }
  return simulate_system(WbSystem{params}, schedule, init, tol, keep_dense);
}

SitState default_sit_init(const EpiParams& params, double ih0, double im0) {
  using namespace sit;
  SitState x{};
  x[S_H] = params.H - ih0;
  x[I_H] = ih0;
  x[S_M] = params.k_star() - im0;
  x[I_M] = im0;
  return x;
}

WbState default_wb_init(const EpiParams& params, double ih0, double im0) {
  using namespace wb;
  WbState x{};
  x[S_H] = params.H - ih0;
  x[I_H] = ih0;
  x[I_M] = im0;
  return x;
}

double cost_of(ModelKind model, const EpiParams& params, const ReleaseSchedule& schedule,
               const SimTolerance& tol) {
  if (model == ModelKind::sit) {
    return simulate_sit(params, schedule, default_sit_init(params), tol, false).cost();
  }
  return simulate_wb(params, schedule, default_wb_init(params), tol, false).cost();
}

double uncontrolled_cost(ModelKind model, const EpiParams& params, double horizon,
                         const SimTolerance& tol) {
  ReleaseSchedule empty;
  empty.horizon = horizon;
  return cost_of(model, params, empty, tol);
}

double sterile_population(const ReleaseSchedule& schedule, double d_S, double t) {
  double m = 0.0;
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    if (schedule.times[j] <= t) m += schedule.weights[j] * std::exp(-d_S * (t - schedule.times[j]));
  }
  return m;
}

std::vector<std::string> component_names(ModelKind model) {
  if (model == ModelKind::sit) return {"S_H", "E_H", "I_H", "S_M", "E_M", "I_M", "M_S"};
  return {"S_H", "E_H", "I_H", "E_M", "I_M", "E_W", "I_W", "p"};
}

ReleaseSchedule random_schedule(std::size_t n, double budget, double horizon, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> when(0.0, horizon);
  std::uniform_real_distribution<double> spread(0.5, 1.5);
  std::vector<double> times(n);
  std::vector<double> weights(n);
  for (double& t : times) t = when(rng);
  std::sort(times.begin(), times.end());
  for (double& c : weights) c = budget / static_cast<double>(n) * spread(rng);
  return ReleaseSchedule::from(std::move(times), std::move(weights), horizon);
}

namespace {

template <std::size_t N>
void write_csv(std::ostream& out, const Trajectory<N>& traj, const std::vector<std::string>& names) {
  out << "time";
  for (const auto& n : names) out << ',' << n;
  out << ",cost\n";
  auto row = [&](double t, const Augmented<N>& x) {
    out << format_double(t);
    for (double v : x) out << ',' << format_double(v);
    out << '\n';
  };

  const bool release_at_zero = !traj.releases.empty() && traj.releases.front().time == 0.0;
  if (!release_at_zero) row(0.0, traj.initial);
  std::size_t si = 0;
  std::size_t ri = 0;
  double last_release = -1.0;
  while (si < traj.steps.size() || ri < traj.releases.size()) {
    if (ri < traj.releases.size() &&
        (si >= traj.steps.size() || traj.releases[ri].time <= traj.steps[si].t0)) {
      const auto& r = traj.releases[ri++];
      row(r.time, r.left);
      row(r.time, r.right);
      last_release = r.time;
    } else {
      const auto& s = traj.steps[si++];
      // The first step after a release starts from the right limit already written.
      if (s.t0 != last_release && !(s.t0 == 0.0 && !release_at_zero)) row(s.t0, s.coeff[0]);
    }
  }
  if (last_release != traj.horizon) row(traj.horizon, traj.final_state);
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory<sit::kDim>& traj) {
  write_csv(out, traj, component_names(ModelKind::sit));
}

void write_trajectory_csv(std::ostream& out, const Trajectory<wb::kDim>& traj) {
  write_csv(out, traj, component_names(ModelKind::wb));
}

}  // namespace vecctl
