#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "vecctl/model.hpp"
#include "vecctl/params.hpp"

namespace vecctl {

/// Mixed error tolerance: component i is weighted by atol[i] + rtol * |y_i|.
template <std::size_t N>
struct Tolerances {
  double rtol = 1e-8;
  Vec<N> atol{};
};

/// One accepted Dormand-Prince step with its fourth-order continuous extension.
template <std::size_t N>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec<N>, 5> coeff{};

  [[nodiscard]] double t1() const { return t0 + h; }

  [[nodiscard]] Vec<N> operator()(double t) const {
    const double a = (t - t0) / h;
    const double b = 1.0 - a;
    Vec<N> y;
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = coeff[0][i] +
             a * (coeff[1][i] + b * (coeff[2][i] + a * (coeff[3][i] + b * coeff[4][i])));
    }
    return y;
  }
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;

  IntegrationStats& operator+=(const IntegrationStats& o) {
    accepted += o.accepted;
    rejected += o.rejected;
    rhs_evals += o.rhs_evals;
    return *this;
  }
};

namespace detail {

template <std::size_t N>
double error_norm(const Vec<N>& err, const Vec<N>& y0, const Vec<N>& y1, const Tolerances<N>& tol) {
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = tol.atol[i] + tol.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / sc;
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(N));
}

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, const Vec<N>& k) {
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
  return out;
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 to t1 with the Dormand-Prince 5(4) pair.
/// Every accepted step is appended to `dense` when given. The final step is
/// shortened to land exactly on t1. Throws NumericalError on step underflow.
template <std::size_t N, class Rhs>
Vec<N> integrate_dp5(Rhs&& rhs, double t0, double t1, Vec<N> y, const Tolerances<N>& tol,
                     std::vector<DenseStep<N>>* dense = nullptr,
                     IntegrationStats* stats = nullptr) {
  if (!(t1 >= t0)) throw ValidationError("integrate_dp5 requires t1 >= t0");
  if (t1 == t0) return y;

  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                   a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                   a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                   a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                   e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  IntegrationStats local;
  const double span = t1 - t0;

  Vec<N> k1 = rhs(t0, y);
  ++local.rhs_evals;

  // Starting step from the local Lipschitz estimate.
  double h = 0.0;
  {
    Vec<N> zero{};
    const double d0 = detail::error_norm(y, y, zero, tol);
    const double dd1 = detail::error_norm(k1, y, zero, tol);
    double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / dd1;
    h0 = std::min(h0, span);
    const Vec<N> y1 = detail::axpy(y, h0, k1);
    const Vec<N> f1 = rhs(t0 + h0, y1);
    ++local.rhs_evals;
    Vec<N> df;
    for (std::size_t i = 0; i < N; ++i) df[i] = f1[i] - k1[i];
    const double d2 = detail::error_norm(df, y, zero, tol) / h0;
    const double dmax = std::max(dd1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6 * span, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    h = std::min({100.0 * h0, h1, span});
  }

  double t = t0;
  bool last_rejected = false;
  while (t < t1) {
    const double min_step = 1e-12 * std::max(1.0, std::abs(t));
    if (h < min_step) {
      throw NumericalError("step size underflow at t = " + std::to_string(t));
    }
    bool final_step = false;
    if (t + h >= t1 || t1 - (t + h) < min_step) {
      h = t1 - t;
      final_step = true;
    }

    const Vec<N> k2 = rhs(t + c2 * h, detail::axpy(y, h * a21, k1));
    Vec<N> tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const Vec<N> k3 = rhs(t + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const Vec<N> k4 = rhs(t + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    const Vec<N> k5 = rhs(t + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    const Vec<N> k6 = rhs(t + h, tmp);
    Vec<N> y_new;
    for (std::size_t i = 0; i < N; ++i) {
      y_new[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    }
    const double t_new = final_step ? t1 : t + h;
    const Vec<N> k7 = rhs(t_new, y_new);
    local.rhs_evals += 6;

    Vec<N> err;
    for (std::size_t i = 0; i < N; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
    const double en = detail::error_norm(err, y, y_new, tol);
    if (!std::isfinite(en)) {
      h *= 0.1;
      last_rejected = true;
      ++local.rejected;
      continue;
    }

    double fac = en == 0.0 ? 10.0 : 0.9 * std::pow(en, -0.2);
    if (en <= 1.0) {
      if (dense) {
        DenseStep<N> step;
        step.t0 = t;
        step.h = h;
        for (std::size_t i = 0; i < N; ++i) {
          const double dy = y_new[i] - y[i];
          const double bspl = h * k1[i] - dy;
          step.coeff[0][i] = y[i];
          step.coeff[1][i] = dy;
          step.coeff[2][i] = bspl;
          step.coeff[3][i] = dy - h * k7[i] - bspl;
          step.coeff[4][i] =
              h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        dense->push_back(step);
      }
      ++local.accepted;
      t = t_new;
      y = y_new;
      k1 = k7;
      if (last_rejected) fac = std::min(fac, 1.0);
      h *= std::clamp(fac, 0.2, 10.0);
      last_rejected = false;
    } else {
      ++local.rejected;
      h *= std::clamp(fac, 0.1, 0.9);
      last_rejected = true;
    }
  }
  if (stats) *stats += local;
  return y;
}

}  // namespace vecctl
