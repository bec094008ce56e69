#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "vecctl/impulse.hpp"

namespace vecctl {

enum class GradientMethod { variational, finite_difference };
std::string_view method_name(GradientMethod method);

/// Serial loops are the reference; the OpenMP variant distributes the
/// per-release integrations over threads.
enum class Parallelism { serial, openmp };

struct GradientReport {
  std::vector<double> dJ_dt;  // person-days per day
  std::vector<double> dJ_dc;  // person-days per mosquito
  GradientMethod method = GradientMethod::variational;
  SimTolerance tol;
  double cost = 0.0;
};

/// Which release parameter is perturbed.
enum class Perturbation { time, weight };

/// Closed-form variation of the sterile population with respect to t_k
/// (d_S c_k e^{-d_S (t - t_k)} after t_k, zero before). k is zero-based.
double delta_ms_time(const ReleaseSchedule& schedule, double d_S, std::size_t k, double t);
/// Variation of M_S with respect to c_k: e^{-d_S (t - t_k)} after t_k.
double delta_ms_cost(const ReleaseSchedule& schedule, double d_S, std::size_t k, double t);

/// Product formula for the variation of p with respect to t_k, built from the
/// left/right limits of p at the releases of `traj`. Throws ValidationError
/// when some p(t_i+) used by the formula is within 1e-9 of a zero of f
/// (0, theta or 1); grad_J integrates the variation directly instead.
double delta_p_time(const Trajectory<wb::kDim>& traj, const ReleaseSchedule& schedule,
                    const EpiParams& params, std::size_t k, double t);
double delta_p_cost(const Trajectory<wb::kDim>& traj, const ReleaseSchedule& schedule,
                    const EpiParams& params, std::size_t k, double t);

/// Variation of the full augmented state (components then cost) with respect
/// to one release parameter, sampled at the given times (right-continuous),
/// together with the variation of J. `alpha` scales the initial jump of the
/// variational system; the result is linear in it.
struct SensitivitySamples {
  double dJ = 0.0;
  std::vector<std::vector<double>> samples;
};
SensitivitySamples sensitivity(ModelKind model, const EpiParams& params,
                               const ReleaseSchedule& schedule, std::size_t k, Perturbation which,
                               const std::vector<double>& sample_times, const SimTolerance& tol = {},
                               double alpha = 1.0);

/// Which halves of the gradient to compute; the other is left at zero.
enum class GradientParts { both, times, weights };

/// dJ/dt_k and dJ/dc_k from the forward variational equations.
GradientReport grad_J(ModelKind model, const EpiParams& params, const ReleaseSchedule& schedule,
                      const SimTolerance& tol = {}, Parallelism par = Parallelism::openmp,
                      GradientParts parts = GradientParts::both);

struct FdOptions {
  // Smaller steps drown in roundoff: J is ~1e5 and carries ~1e-9 of noise.
  double h_time = 3e-3;        // days
  double h_weight_rel = 1e-3;  // step is h_weight_rel * max(c_k, 1)
  SimTolerance tol{1e-13, 1e-13};
};

/// Central differences by re-simulation (second-order one-sided differences
/// at the ends of [0, T] or next to a neighbouring release). Throws
/// ValidationError when neither side has room for the step.
GradientReport grad_J_fd(ModelKind model, const EpiParams& params, const ReleaseSchedule& schedule,
                         const FdOptions& opts = {}, Parallelism par = Parallelism::openmp);

/// Largest |a - b| / max(rtol |b|, floor) over both gradient vectors, so a
/// value at or below 1 means every entry agrees to rtol relative or to floor
/// absolute.
double gradient_mismatch(const GradientReport& a, const GradientReport& b, double rtol = 1e-4,
                         double floor = 1e-6);

}  // namespace vecctl
