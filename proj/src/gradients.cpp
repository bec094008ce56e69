#include "vecctl/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>

namespace vecctl {

std::string_view method_name(GradientMethod method) {
  return method == GradientMethod::variational ? "variational" : "finite-difference";
}

namespace {

// Runs body(i) for i in [0, count), in parallel when requested. The first
// exception thrown by any iteration is rethrown on the calling thread.
void for_each_index(std::size_t count, Parallelism par, const std::function<void(std::size_t)>& body) {
  if (par == Parallelism::serial) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(vecctl_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

template <class System>
Vec<System::N> initial_state(const System& sys);

template <>
Vec<sit::kDim> initial_state(const SitSystem& sys) {
  return default_sit_init(sys.q);
}
template <>
Vec<wb::kDim> initial_state(const WbSystem& sys) {
  return default_wb_init(sys.q);
}

template <class System>
Augmented<System::N> augmented_rhs(const System& sys, const Augmented<System::N>& z) {
  constexpr std::size_t N = System::N;
  Vec<N> x;
  for (std::size_t i = 0; i < N; ++i) x[i] = z[i];
  const Vec<N> d = sys.rhs(x);
  Augmented<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = d[i];
  out[N] = z[System::kInfected];
  return out;
}

// Integrates the base state together with its variation from t_k to T. The
// variation is rescaled at the start so that it has population size, which
// lets one tolerance serve both halves; the system is linear in it, so the
// scale is divided out at the end.
template <class System>
SensitivitySamples run_sensitivity(const System& sys, const Trajectory<System::N>& base,
                                   const ReleaseSchedule& schedule, std::size_t k, Perturbation which,
                                   const SimTolerance& tol, double alpha,
                                   const std::vector<double>* sample_times) {
  constexpr std::size_t N = System::N;
  constexpr std::size_t M = N + 1;
  constexpr std::size_t D = 2 * M;
  constexpr std::size_t c = System::kControl;

  SensitivitySamples out;
  const auto& rec = base.releases.at(k);
  Augmented<N> delta{};
  if (which == Perturbation::time) {
    const auto fl = augmented_rhs(sys, rec.left);
    const auto fr = augmented_rhs(sys, rec.right);
    for (std::size_t i = 0; i < M; ++i) delta[i] = fl[i] - fr[i];
    delta[c] = sys.jump_slope(rec.left[c], rec.right[c]) * fl[c] - fr[c];
  } else {
    delta[c] = sys.jump_gain(rec.right[c]);
  }
  for (double& v : delta) v *= alpha;

  const double max_release =
      *std::max_element(schedule.weights.begin(), schedule.weights.end());
  const Vec<N> scale = sys.scale(max_release);
  double size = 0.0;
  for (std::size_t i = 0; i < N; ++i) size = std::max(size, std::abs(delta[i]) / scale[i]);

  auto zeros = [&] {
    if (sample_times) out.samples.assign(sample_times->size(), std::vector<double>(M, 0.0));
    return out;
  };
  if (size == 0.0 || rec.time >= schedule.horizon) return zeros();
  const double nu = 1.0 / size;

  Vec<D> w{};
  for (std::size_t i = 0; i < M; ++i) {
    w[i] = rec.right[i];
    w[M + i] = nu * delta[i];
  }

  Tolerances<D> atol;
  atol.rtol = tol.rtol;
  const Vec<N> unit = sys.unit();
  for (std::size_t i = 0; i < N; ++i) {
    atol.atol[i] = tol.atol * unit[i];
    atol.atol[M + i] = tol.atol * unit[i];
  }
  atol.atol[N] = tol.atol;
  atol.atol[M + N] = tol.atol;

  auto rhs = [&sys](double, const Vec<D>& z) {
    Vec<N> x;
    for (std::size_t i = 0; i < N; ++i) x[i] = z[i];
    const Vec<N> f = sys.rhs(x);
    const Mat<N> J = sys.jacobian(x);
    Vec<D> d;
    for (std::size_t i = 0; i < N; ++i) {
      d[i] = f[i];
      double acc = 0.0;
      for (std::size_t j = 0; j < N; ++j) acc += J[i][j] * z[M + j];
      d[M + i] = acc;
    }
    d[N] = z[System::kInfected];
    d[M + N] = z[M + System::kInfected];
    return d;
  };

  std::vector<DenseStep<D>> steps;
  std::vector<std::pair<double, Vec<D>>> jumps;  // right limits at later releases
  auto* dense = sample_times ? &steps : nullptr;
  double t = rec.time;
  for (std::size_t j = k + 1; j < schedule.size(); ++j) {
    w = integrate_dp5<D>(rhs, t, schedule.times[j], w, atol, dense);
    t = schedule.times[j];
    const double y_minus = w[c];
    const double y_plus = sys.jump(y_minus, schedule.weights[j], nullptr);
    w[c] = y_plus;
    w[M + c] *= sys.jump_slope(y_minus, y_plus);
    if (sample_times) jumps.emplace_back(t, w);
  }
  w = integrate_dp5<D>(rhs, t, schedule.horizon, w, atol, dense);
  out.dJ = w[M + N] / nu;

  if (sample_times) {
    for (double s : *sample_times) {
      std::vector<double> v(M, 0.0);
      if (s > rec.time) {
        Vec<D> z = w;
        bool from_jump = false;
        for (const auto& [tj, zj] : jumps) {
          if (tj == s) {
            z = zj;
            from_jump = true;
          }
        }
        if (!from_jump && s < schedule.horizon && !steps.empty()) {
          auto it = std::upper_bound(steps.begin(), steps.end(), s,
                                     [](double v0, const DenseStep<D>& st) { return v0 < st.t0; });
          if (it != steps.begin()) --it;
          z = (*it)(std::min(s, it->t1()));
        }
        for (std::size_t i = 0; i < M; ++i) v[i] = z[M + i] / nu;
      }
      out.samples.push_back(std::move(v));
    }
  }
  return out;
}

template <class System>
GradientReport variational(const System& sys, const ReleaseSchedule& schedule,
                           const SimTolerance& tol, Parallelism par, GradientParts parts) {
  const auto base = simulate_system(sys, schedule, initial_state(sys), tol, false);
  const std::size_t n = schedule.size();
  GradientReport rep;
  rep.method = GradientMethod::variational;
  rep.tol = tol;
  rep.cost = base.cost();
  rep.dJ_dt.assign(n, 0.0);
  rep.dJ_dc.assign(n, 0.0);
  std::vector<std::pair<std::size_t, Perturbation>> tasks;
  for (std::size_t k = 0; k < n; ++k) {
    if (parts != GradientParts::weights) tasks.emplace_back(k, Perturbation::time);
    if (parts != GradientParts::times) tasks.emplace_back(k, Perturbation::weight);
  }
  for_each_index(tasks.size(), par, [&](std::size_t task) {
    const auto [k, which] = tasks[task];
    const double d = run_sensitivity(sys, base, schedule, k, which, tol, 1.0, nullptr).dJ;
    (which == Perturbation::time ? rep.dJ_dt : rep.dJ_dc)[k] = d;
  });
  return rep;
}

template <class System>
SensitivitySamples sampled(const System& sys, const ReleaseSchedule& schedule, std::size_t k,
                           Perturbation which, const std::vector<double>& times,
                           const SimTolerance& tol, double alpha) {
  const auto base = simulate_system(sys, schedule, initial_state(sys), tol, false);
  return run_sensitivity(sys, base, schedule, k, which, tol, alpha, &times);
}

template <class System>
GradientReport finite_difference(const System& sys, const ReleaseSchedule& schedule,
                                 const FdOptions& opts, Parallelism par) {
  const auto init = initial_state(sys);
  auto cost = [&](const ReleaseSchedule& s) {
    return simulate_system(sys, s, init, opts.tol, false).cost();
  };
  const double j0 = cost(schedule);
  const std::size_t n = schedule.size();
  GradientReport rep;
  rep.method = GradientMethod::finite_difference;
  rep.tol = opts.tol;
  rep.cost = j0;
  rep.dJ_dt.assign(n, 0.0);
  rep.dJ_dc.assign(n, 0.0);

  for_each_index(2 * n, par, [&](std::size_t task) {
    const std::size_t k = task / 2;
    ReleaseSchedule s = schedule;
    if (task % 2 == 0) {
      const double h = opts.h_time;
      const double t = schedule.times[k];
      const double lo = k > 0 ? schedule.times[k - 1] : 0.0;
      const double hi = k + 1 < n ? schedule.times[k + 1] : schedule.horizon;
      auto at = [&](double tk) {
        s.times[k] = tk;
        return cost(s);
      };
      if (t - h >= lo && t + h <= hi) {
        rep.dJ_dt[k] = (at(t + h) - at(t - h)) / (2.0 * h);
      } else if (t + 2.0 * h <= hi) {
        rep.dJ_dt[k] = (-3.0 * j0 + 4.0 * at(t + h) - at(t + 2.0 * h)) / (2.0 * h);
      } else if (t - 2.0 * h >= lo) {
        rep.dJ_dt[k] = (3.0 * j0 - 4.0 * at(t - h) + at(t - 2.0 * h)) / (2.0 * h);
      } else {
        throw ValidationError("finite-difference step " + format_double(h) +
                              " collides with a neighbouring release at release " +
                              std::to_string(k + 1));
      }
    } else {
      const double c = schedule.weights[k];
      const double h = opts.h_weight_rel * std::max(c, 1.0);
      auto at = [&](double ck) {
        s.weights[k] = ck;
        return cost(s);
      };
      if (c - h >= 0.0) {
        rep.dJ_dc[k] = (at(c + h) - at(c - h)) / (2.0 * h);
      } else {
        rep.dJ_dc[k] = (-3.0 * j0 + 4.0 * at(c + h) - at(c + 2.0 * h)) / (2.0 * h);
      }
    }
  });
  return rep;
}

// Product formula shared by delta_p_time and delta_p_cost; `start` is the
// variation of p just after release k.
double product_formula(const Trajectory<wb::kDim>& traj, const ReleaseSchedule& schedule,
                       const EpiParams& q, std::size_t k, double t, double start) {
  const double th = theta(q);
  auto guard = [&](double p_plus) {
    for (double zero : {0.0, th, 1.0}) {
      if (std::abs(p_plus - zero) < 1e-9) {
        throw ValidationError("p(t_i+) = " + format_double(p_plus) +
                              " is within 1e-9 of a zero of f; the product formula degenerates");
      }
    }
  };
  const auto& rk = traj.releases.at(k);
  double delta = start;
  double p_plus = rk.right[wb::P];
  guard(p_plus);
  for (std::size_t j = k + 1; j < schedule.size() && schedule.times[j] < t; ++j) {
    const auto& rj = traj.releases[j];
    const double pl = rj.left[wb::P];
    const double pr = rj.right[wb::P];
    delta *= f_invasion(pl, q) / f_invasion(p_plus, q) * g_release(pr, q) / g_release(pl, q);
    p_plus = pr;
    guard(p_plus);
  }
  return delta * f_invasion(traj.state_at(t)[wb::P], q) / f_invasion(p_plus, q);
}

}  // namespace

double delta_ms_time(const ReleaseSchedule& schedule, double d_S, std::size_t k, double t) {
  const double tk = schedule.times.at(k);
  if (t <= tk) return 0.0;
  return d_S * schedule.weights[k] * std::exp(-d_S * (t - tk));
}

double delta_ms_cost(const ReleaseSchedule& schedule, double d_S, std::size_t k, double t) {
  const double tk = schedule.times.at(k);
  if (t <= tk) return 0.0;
  return std::exp(-d_S * (t - tk));
}

double delta_p_time(const Trajectory<wb::kDim>& traj, const ReleaseSchedule& schedule,
                    const EpiParams& q, std::size_t k, double t) {
  if (t <= schedule.times.at(k)) return 0.0;
  const auto& rk = traj.releases.at(k);
  const double pl = rk.left[wb::P];
  const double pr = rk.right[wb::P];
  const double start =
      (f_invasion(pl, q) * g_release(pr, q) - f_invasion(pr, q) * g_release(pl, q)) / g_release(pl, q);
  return product_formula(traj, schedule, q, k, t, start);
}

double delta_p_cost(const Trajectory<wb::kDim>& traj, const ReleaseSchedule& schedule,
                    const EpiParams& q, std::size_t k, double t) {
  if (t <= schedule.times.at(k)) return 0.0;
  const double start = g_release(traj.releases.at(k).right[wb::P], q);
  return product_formula(traj, schedule, q, k, t, start);
}

SensitivitySamples sensitivity(ModelKind model, const EpiParams& params,
                               const ReleaseSchedule& schedule, std::size_t k, Perturbation which,
                               const std::vector<double>& sample_times, const SimTolerance& tol,
                               double alpha) {
  if (k >= schedule.size()) throw ValidationError("release index out of range");
  if (model == ModelKind::sit) return sampled(SitSystem{params}, schedule, k, which, sample_times, tol, alpha);
  return sampled(WbSystem{params}, schedule, k, which, sample_times, tol, alpha);
}

GradientReport grad_J(ModelKind model, const EpiParams& params, const ReleaseSchedule& schedule,
                      const SimTolerance& tol, Parallelism par, GradientParts parts) {
  if (model == ModelKind::sit) return variational(SitSystem{params}, schedule, tol, par, parts);
  return variational(WbSystem{params}, schedule, tol, par, parts);
}

GradientReport grad_J_fd(ModelKind model, const EpiParams& params, const ReleaseSchedule& schedule,
                         const FdOptions& opts, Parallelism par) {
  if (model == ModelKind::sit) return finite_difference(SitSystem{params}, schedule, opts, par);
  return finite_difference(WbSystem{params}, schedule, opts, par);
}

double gradient_mismatch(const GradientReport& a, const GradientReport& b, double rtol, double floor) {
  if (a.dJ_dt.size() != b.dJ_dt.size() || a.dJ_dc.size() != b.dJ_dc.size()) {
    throw ValidationError("gradient reports have different lengths");
  }
  double worst = 0.0;
  auto scan = [&](const std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      worst = std::max(worst, std::abs(x[i] - y[i]) / std::max(rtol * std::abs(y[i]), floor));
    }
  };
  scan(a.dJ_dt, b.dJ_dt);
  scan(a.dJ_dc, b.dJ_dc);
  return worst;
}

}  // namespace vecctl
