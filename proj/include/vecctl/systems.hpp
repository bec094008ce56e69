#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "vecctl/model.hpp"
#include "vecctl/params.hpp"

namespace vecctl {

// Each controlled system bundles its right-hand side, Jacobian, release jump and
// the derivatives of the jump that the sensitivity code needs. The jump acts on
// a single scalar component y (M_S or p).

struct SitSystem {
  static constexpr std::size_t N = sit::kDim;
  static constexpr std::size_t kInfected = sit::I_H;
  static constexpr std::size_t kControl = sit::M_S;

  const EpiParams& q;

  [[nodiscard]] Vec<N> rhs(const Vec<N>& x) const { return rhs_sit(x, q); }
  [[nodiscard]] Mat<N> jacobian(const Vec<N>& x) const { return jacobian_sit(x, q); }

  /// y+ as a function of y- and the release size.
  [[nodiscard]] double jump(double y, double c, bool* clamped) const {
    if (clamped) *clamped = false;
    return y + c;
  }
  /// dy+/dy- and dy+/dc.
  [[nodiscard]] double jump_slope(double /*y_minus*/, double /*y_plus*/) const { return 1.0; }
  [[nodiscard]] double jump_gain(double /*y_plus*/) const { return 1.0; }

  /// One individual for every count; used as the absolute-tolerance unit.
  [[nodiscard]] Vec<N> unit() const {
    Vec<N> u;
    u.fill(1.0);
    return u;
  }
  /// Population scale per component, used by the negative-state guard.
  [[nodiscard]] Vec<N> scale(double max_release) const {
    return {q.H, q.H, q.H, q.K, q.K, q.K, std::max(q.K, max_release)};
  }
};

struct WbSystem {
  static constexpr std::size_t N = wb::kDim;
  static constexpr std::size_t kInfected = wb::I_H;
  static constexpr std::size_t kControl = wb::P;

  const EpiParams& q;

  [[nodiscard]] Vec<N> rhs(const Vec<N>& x) const { return rhs_wb(x, q); }
  [[nodiscard]] Mat<N> jacobian(const Vec<N>& x) const { return jacobian_wb(x, q); }

  [[nodiscard]] double jump(double p, double c, bool* clamped) const {
    if (clamped) *clamped = false;
    double base = p;
    if (base < 0.0 || base > kMaxProportion) {
      base = std::clamp(base, 0.0, kMaxProportion);
      if (clamped) *clamped = true;
    }
    if (c == 0.0) return p;
    bool hit = false;
    const double out = big_G_inverse(big_G(base, q) + c, q, &hit);
    if (clamped && hit) *clamped = true;
    return out;
  }
  [[nodiscard]] double jump_slope(double p_minus, double p_plus) const {
    return g_release(p_plus, q) / g_release(p_minus, q);
  }
  [[nodiscard]] double jump_gain(double p_plus) const { return g_release(p_plus, q); }

  [[nodiscard]] Vec<N> unit() const {
    Vec<N> u;
    u.fill(1.0);
    u[wb::P] = 1.0 / q.K;
    return u;
  }
  [[nodiscard]] Vec<N> scale(double /*max_release*/) const {
    return {q.H, q.H, q.H, q.K, q.K, q.K, q.K, 1.0};
  }
};

}  // namespace vecctl
