// Shared by the unit tests and the acceptance driver.
#pragma once

#include <algorithm>
#include <array>
#include <random>

#include "vecctl/impulse.hpp"
#include "vecctl/ode.hpp"

namespace vecctl::testing {

inline EpiParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> factor(0.5, 2.0);
  EpiParams q = EpiParams::dengue();
  for (const auto& key : EpiParams::keys()) {
    if (key == "s_h" || key == "s_c") continue;
    q.set(key, q.get(key) * factor(rng));
  }
  // Keep the transmission ordering the model requires, and d_M < b_M so that K* > 0.
  std::array<double, 3> beta = {q.beta_WH, q.beta_HW, q.beta_HM};
  std::sort(beta.begin(), beta.end());
  q.beta_WH = beta[0];
  q.beta_HW = beta[1];
  q.beta_HM = beta[2];
  q.d_M = std::min(q.d_M, 0.5 * q.b_M);
  return q;
}


// SIT with the impulse replaced by a constant release rate c/eps on [t, t+eps].
inline double box_pulse_sit(const EpiParams& q, double t_release, double c, double eps) {
  Tolerances<sit::kDim + 1> tol;
  tol.rtol = 1e-11;
  tol.atol.fill(1e-11);
  Augmented<sit::kDim> x{};
  const auto init = default_sit_init(q);
  for (std::size_t i = 0; i < sit::kDim; ++i) x[i] = init[i];
  auto rhs_with = [&](double rate) {
    return [&q, rate](double, const Augmented<sit::kDim>& z) {
      SitState s;
      for (std::size_t i = 0; i < sit::kDim; ++i) s[i] = z[i];
      const auto d = rhs_sit(s, q);
      Augmented<sit::kDim> out;
      for (std::size_t i = 0; i < sit::kDim; ++i) out[i] = d[i];
      out[sit::M_S] += rate;
      out[sit::kDim] = z[sit::I_H];
      return out;
    };
  };
  x = integrate_dp5<sit::kDim + 1>(rhs_with(0.0), 0.0, t_release, x, tol);
  x = integrate_dp5<sit::kDim + 1>(rhs_with(c / eps), t_release, t_release + eps, x, tol);
  x = integrate_dp5<sit::kDim + 1>(rhs_with(0.0), t_release + eps, 450.0, x, tol);
  return x[sit::kDim];
}

// WB with p' = f(p) + u g(p), u = c/eps on [t, t+eps].
inline double box_pulse_wb(const EpiParams& q, double t_release, double c, double eps) {
  Tolerances<wb::kDim + 1> tol;
  tol.rtol = 1e-11;
  tol.atol.fill(1e-11);
  tol.atol[wb::P] = 1e-11 / q.K;
  Augmented<wb::kDim> x{};
  const auto init = default_wb_init(q);
  for (std::size_t i = 0; i < wb::kDim; ++i) x[i] = init[i];
  auto rhs_with = [&](double rate) {
    return [&q, rate](double, const Augmented<wb::kDim>& z) {
      WbState s;
      for (std::size_t i = 0; i < wb::kDim; ++i) s[i] = z[i];
      const auto d = rhs_wb(s, q);
      Augmented<wb::kDim> out;
      for (std::size_t i = 0; i < wb::kDim; ++i) out[i] = d[i];
      out[wb::P] += rate * g_release(z[wb::P], q);
      out[wb::kDim] = z[wb::I_H];
      return out;
    };
  };
  x = integrate_dp5<wb::kDim + 1>(rhs_with(0.0), 0.0, t_release, x, tol);
  x = integrate_dp5<wb::kDim + 1>(rhs_with(c / eps), t_release, t_release + eps, x, tol);
  x = integrate_dp5<wb::kDim + 1>(rhs_with(0.0), t_release + eps, 450.0, x, tol);
  return x[wb::kDim];
}

}  // namespace vecctl::testing
