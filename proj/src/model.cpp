#include "vecctl/model.hpp"

#include <algorithm>
#include <cmath>

namespace vecctl {
namespace {

struct InvasionTerms {
  double numerator;    // d_M b_W - d_W b_M (1 - s_h p)
  double denominator;  // b_M (1-p)(1 - s_h p) + b_W p
};

InvasionTerms invasion_terms(double p, const EpiParams& q) {
  return {q.d_M * q.b_W - q.d_W * q.b_M * (1.0 - q.s_h * p),
          q.b_M * (1.0 - p) * (1.0 - q.s_h * p) + q.b_W * p};
}

}  // namespace

SeirState rhs_seir(const SeirState& x, const EpiParams& q) {
  using namespace seir;
  const double m = x[S_M] + x[E_M] + x[I_M];
  const double bite_mh = q.beta_MH / q.H * x[I_M] * x[S_H];
  const double bite_hm = q.beta_HM / q.H * x[S_M] * x[I_H];
  SeirState d{};
  d[S_H] = q.b_H * q.H - bite_mh - q.b_H * x[S_H];
  d[E_H] = bite_mh - (q.gamma_H + q.b_H) * x[E_H];
  d[I_H] = q.gamma_H * x[E_H] - (q.sigma_H + q.b_H) * x[I_H];
  d[S_M] = q.b_M * m * (1.0 - m / q.K) - bite_hm - q.d_M * x[S_M];
  d[E_M] = bite_hm - (q.gamma_M + q.d_M) * x[E_M];
  d[I_M] = q.gamma_M * x[E_M] - q.d_M * x[I_M];
  return d;
}

double fertility_factor(double wild, double sterile, double s_c) {
  if (wild <= 0.0) return 0.0;
  return wild / (wild + s_c * sterile);
}

SitState rhs_sit(const SitState& x, const EpiParams& q) {
  using namespace sit;
  const double m = x[S_M] + x[E_M] + x[I_M];
  const double bite_mh = q.beta_MH / q.H * x[I_M] * x[S_H];
  const double bite_hm = q.beta_HM / q.H * x[S_M] * x[I_H];
  SitState d{};
  d[S_H] = q.b_H * q.H - bite_mh - q.b_H * x[S_H];
  d[E_H] = bite_mh - (q.gamma_H + q.b_H) * x[E_H];
  d[I_H] = q.gamma_H * x[E_H] - (q.sigma_H + q.b_H) * x[I_H];
  d[S_M] = q.b_M * m * (1.0 - m / q.K) * fertility_factor(m, x[M_S], q.s_c) - bite_hm -
           q.d_M * x[S_M];
  d[E_M] = bite_hm - (q.gamma_M + q.d_M) * x[E_M];
  d[I_M] = q.gamma_M * x[E_M] - q.d_M * x[I_M];
  d[M_S] = -q.d_S * x[M_S];
  return d;
}

WbState rhs_wb(const WbState& x, const EpiParams& q) {
  using namespace wb;
  const double infection = (q.beta_MH * x[I_M] + q.beta_WH * x[I_W]) * x[S_H] / q.H;
  const double wild_susceptible = q.K * (1.0 - x[P]) - x[E_M] - x[I_M];
  const double wol_susceptible = q.K * x[P] - x[E_W] - x[I_W];
  WbState d{};
  d[S_H] = q.b_H * q.H - infection - q.b_H * x[S_H];
  d[E_H] = infection - (q.gamma_H + q.b_H) * x[E_H];
  d[I_H] = q.gamma_H * x[E_H] - (q.sigma_H + q.b_H) * x[I_H];
  d[E_M] = q.beta_HM / q.H * wild_susceptible * x[I_H] - (q.gamma_M + q.d_M) * x[E_M];
  d[I_M] = q.gamma_M * x[E_M] - q.d_M * x[I_M];
  d[E_W] = q.beta_HW / q.H * wol_susceptible * x[I_H] - (q.gamma_W + q.d_W) * x[E_W];
  d[I_W] = q.gamma_W * x[E_W] - q.d_W * x[I_W];
  d[P] = f_invasion(x[P], q);
  return d;
}

Mat<sit::kDim> jacobian_sit(const SitState& x, const EpiParams& q) {
  using namespace sit;
  Mat<kDim> j{};
  const double m = x[S_M] + x[E_M] + x[I_M];
  const double ms = x[M_S];

  // Birth term b_M m (1 - m/K) phi(m, M_S) and its partials.
  double d_birth_dm = 0.0;
  double d_birth_dms = 0.0;
  if (m > 0.0) {
    const double denom = m + q.s_c * ms;
    const double phi = m / denom;
    const double logistic = m * (1.0 - m / q.K);
    const double dphi_dm = q.s_c * ms / (denom * denom);
    const double dphi_dms = -q.s_c * m / (denom * denom);
    d_birth_dm = q.b_M * ((1.0 - 2.0 * m / q.K) * phi + logistic * dphi_dm);
    d_birth_dms = q.b_M * logistic * dphi_dms;
  }

  j[S_H][S_H] = -q.beta_MH * x[I_M] / q.H - q.b_H;
  j[S_H][I_M] = -q.beta_MH * x[S_H] / q.H;

  j[E_H][S_H] = q.beta_MH * x[I_M] / q.H;
  j[E_H][E_H] = -(q.gamma_H + q.b_H);
  j[E_H][I_M] = q.beta_MH * x[S_H] / q.H;

  j[I_H][E_H] = q.gamma_H;
  j[I_H][I_H] = -(q.sigma_H + q.b_H);

  j[S_M][I_H] = -q.beta_HM * x[S_M] / q.H;
  j[S_M][S_M] = d_birth_dm - q.beta_HM * x[I_H] / q.H - q.d_M;
  j[S_M][E_M] = d_birth_dm;
  j[S_M][I_M] = d_birth_dm;
  j[S_M][M_S] = d_birth_dms;

  j[E_M][I_H] = q.beta_HM * x[S_M] / q.H;
  j[E_M][S_M] = q.beta_HM * x[I_H] / q.H;
  j[E_M][E_M] = -(q.gamma_M + q.d_M);

  j[I_M][E_M] = q.gamma_M;
  j[I_M][I_M] = -q.d_M;

  j[M_S][M_S] = -q.d_S;
  return j;
}

Mat<wb::kDim> jacobian_wb(const WbState& x, const EpiParams& q) {
  using namespace wb;
  Mat<kDim> j{};
  const double force = (q.beta_MH * x[I_M] + q.beta_WH * x[I_W]) / q.H;

  j[S_H][S_H] = -force - q.b_H;
  j[S_H][I_M] = -q.beta_MH * x[S_H] / q.H;
  j[S_H][I_W] = -q.beta_WH * x[S_H] / q.H;

  j[E_H][S_H] = force;
  j[E_H][E_H] = -(q.gamma_H + q.b_H);
  j[E_H][I_M] = q.beta_MH * x[S_H] / q.H;
  j[E_H][I_W] = q.beta_WH * x[S_H] / q.H;

  j[I_H][E_H] = q.gamma_H;
  j[I_H][I_H] = -(q.sigma_H + q.b_H);

  const double bite_m = q.beta_HM / q.H;
  j[E_M][I_H] = bite_m * (q.K * (1.0 - x[P]) - x[E_M] - x[I_M]);
  j[E_M][E_M] = -bite_m * x[I_H] - (q.gamma_M + q.d_M);
  j[E_M][I_M] = -bite_m * x[I_H];
  j[E_M][P] = -bite_m * q.K * x[I_H];

  j[I_M][E_M] = q.gamma_M;
  j[I_M][I_M] = -q.d_M;

  const double bite_w = q.beta_HW / q.H;
  j[E_W][I_H] = bite_w * (q.K * x[P] - x[E_W] - x[I_W]);
  j[E_W][E_W] = -bite_w * x[I_H] - (q.gamma_W + q.d_W);
  j[E_W][I_W] = -bite_w * x[I_H];
  j[E_W][P] = bite_w * q.K * x[I_H];

  j[I_W][E_W] = q.gamma_W;
  j[I_W][I_W] = -q.d_W;

  j[P][P] = f_invasion_derivative(x[P], q);
  return j;
}

double f_invasion(double p, const EpiParams& q) {
  const auto [num, den] = invasion_terms(p, q);
  return p * (1.0 - p) * num / den;
}

double f_invasion_derivative(double p, const EpiParams& q) {
  const auto [num, den] = invasion_terms(p, q);
  const double dnum = q.d_W * q.b_M * q.s_h;
  const double dden = -q.b_M * ((1.0 - q.s_h * p) + q.s_h * (1.0 - p)) + q.b_W;
  return (1.0 - 2.0 * p) * num / den + p * (1.0 - p) * (dnum * den - num * dden) / (den * den);
}

double g_release(double p, const EpiParams& q) {
  const double wild = q.b_M * (1.0 - p) * (1.0 - q.s_h * p);
  return wild / (wild + q.b_W * p) / q.K;
}

double big_G(double p, const EpiParams& q) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ValidationError("G(p) is defined for p in [0, 1) only");
  }
  // 1/g(p) = K [1 + (b_W/b_M) p / ((1-p)(1-s_h p))], integrated by partial fractions.
  const double ratio = q.b_W / q.b_M;
  double tail = 0.0;
  if (q.s_h == 0.0) {
    tail = -std::log1p(-p) - p;
  } else if (std::abs(1.0 - q.s_h) < 1e-12) {
    tail = p / (1.0 - p) + std::log1p(-p);
  } else {
    tail = (-std::log1p(-p) + std::log1p(-q.s_h * p) / q.s_h) / (1.0 - q.s_h);
  }
  return q.K * (p + ratio * tail);
}

double big_G_inverse(double v, const EpiParams& q, bool* clamped) {
  if (clamped) *clamped = false;
  if (!(v >= 0.0)) throw ValidationError("G^{-1}(v) requires v >= 0");
  if (v == 0.0) return 0.0;
  double lo = 0.0;
  double hi = kMaxProportion;
  if (v >= big_G(hi, q)) {
    if (clamped) *clamped = true;
    return hi;
  }
  // G is increasing and convex, so Newton started to the right of the root
  // converges monotonically; bisection guards the remaining cases.
  double p = std::min(v / q.K, 0.5);
  for (int iter = 0; iter < 200; ++iter) {
    const double residual = big_G(p, q) - v;
    if (residual > 0.0) {
      hi = p;
    } else {
      lo = p;
    }
    double next = p - residual * g_release(p, q);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - p);
    p = next;
    if (step < 1e-15 || hi - lo < 1e-14) break;
  }
  return p;
}

double theta(const EpiParams& q) {
  const double ratio = q.d_M * q.b_W / (q.d_W * q.b_M);
  constexpr double kEdge = 1e-12;
  if (!(ratio < 1.0) || ratio < 1.0 - q.s_h - kEdge || q.s_h == 0.0) {
    throw ValidationError("no interior invasion threshold: need 1 - s_h < d_M b_W/(d_W b_M) < 1");
  }
  return std::min(1.0, (1.0 - ratio) / q.s_h);
}

}  // namespace vecctl
