#include "vecctl/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "vecctl/impulse.hpp"

namespace vecctl {
namespace {

double human_progression(const EpiParams& q) { return (q.gamma_H + q.b_H) * (q.sigma_H + q.b_H) / (q.b_H * q.gamma_H); }

template <std::size_t N>
double scaled_residual(const Vec<N>& d, const Vec<N>& scale) {
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) worst = std::max(worst, std::abs(d[i]) / scale[i]);
  return worst;
}

// V for one host block followed by vector blocks, each a 2x2 lower-triangular
// progression (incubation, then removal).
Eigen::MatrixXd transfer_matrix(const EpiParams& q, const std::vector<std::pair<double, double>>& vectors) {
  const Eigen::Index n = 2 + 2 * static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, n);
  V(0, 0) = q.gamma_H + q.b_H;
  V(1, 0) = -q.gamma_H;
  V(1, 1) = q.sigma_H + q.b_H;
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    const Eigen::Index i = 2 + 2 * static_cast<Eigen::Index>(k);
    const auto [gamma, death] = vectors[k];
    V(i, i) = gamma + death;
    V(i + 1, i) = -gamma;
    V(i + 1, i + 1) = death;
  }
  return V;
}

double radius_of(const Eigen::MatrixXd& F, const Eigen::MatrixXd& V) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(V.rows(), V.cols());
  const Eigen::MatrixXd Vinv = V.triangularView<Eigen::Lower>().solve(I);
  if (!Vinv.allFinite()) throw NumericalError("transfer matrix V is singular");
  return spectral_radius(F * Vinv);
}

double closed_form_r0(double beta_in, double beta_out, double vectors, double gamma_v, double d_v,
                      const EpiParams& q) {
  return std::sqrt(beta_in * beta_out * vectors * gamma_v * q.gamma_H /
                   (q.H * d_v * (q.b_H + q.sigma_H) * (gamma_v + d_v) * (q.gamma_H + q.b_H)));
}

R0Report wb_report(const EpiParams& q, double p, const std::string& label) {
  R0Report rep;
  rep.label = label;
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(6, 6);
  F(0, 3) = q.beta_MH;
  F(0, 5) = q.beta_WH;
  F(2, 1) = q.beta_HM * q.K * (1.0 - p) / q.H;
  F(4, 1) = q.beta_HW * q.K * p / q.H;
  rep.F = F;
  rep.V = transfer_matrix(q, {{q.gamma_M, q.d_M}, {q.gamma_W, q.d_W}});
  rep.r0 = radius_of(rep.F, rep.V);
  rep.basic = rep.r0 * rep.r0;
  rep.closed_form = p == 0.0 ? closed_form_r0(q.beta_HM, q.beta_MH, q.K, q.gamma_M, q.d_M, q)
                             : closed_form_r0(q.beta_HW, q.beta_WH, q.K, q.gamma_W, q.d_W, q);
  return rep;
}

bool is_invasion_zero(double p, const EpiParams& q) {
  return p == 0.0 || p == 1.0 || std::abs(f_invasion(p, q)) <= 1e-12;
}

}  // namespace

const Equilibrium& EquilibriumSet::get(const std::string& label) const {
  for (const auto& e : items) {
    if (e.label == label) return e;
  }
  throw ValidationError("no equilibrium labelled '" + label + "'");
}

double spectral_radius(const Eigen::MatrixXd& A, double tol, int max_iter) {
  if (A.rows() != A.cols()) throw ValidationError("spectral_radius needs a square matrix");
  const Eigen::MatrixXd A2 = A * A;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(A.rows()) / std::sqrt(static_cast<double>(A.rows()));
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd y = A2 * x;
    const double norm = y.norm();
    if (norm == 0.0 || !std::isfinite(norm)) return 0.0;
    y /= norm;
    const double change = std::abs(norm - lambda);
    lambda = norm;
    x = y;
    if (it > 0 && change <= tol * lambda) break;
  }
  return std::sqrt(lambda);
}

EquilibriumSet equilibria_seir(const EpiParams& q) {
  q.validate();
  const double ks = q.k_star();
  const Vec<seir::kDim> scale{q.H, q.H, q.H, q.K, q.K, q.K};
  EquilibriumSet set;
  auto add = [&](const std::string& label, const SeirState& x, bool exists) {
    Equilibrium e;
    e.label = label;
    e.state.assign(x.begin(), x.end());
    e.exists = exists;
    e.residual = exists ? scaled_residual(rhs_seir(x, q), scale) : 0.0;
    set.items.push_back(std::move(e));
  };
  add("extinction", {q.H, 0, 0, 0, 0, 0}, true);
  add("disease-free", {q.H, 0, 0, ks, 0, 0}, true);

  const double r0 = r0_sit(q).closed_form;
  const double a_h = human_progression(q);
  const double a_m = (q.gamma_M + q.d_M) / q.gamma_M;
  SeirState endemic{};
  const bool exists = r0 > 1.0;
  if (exists) {
    const double excess = 1.0 - 1.0 / (r0 * r0);
    const double ih = ks * q.beta_MH / (q.H * q.b_H * a_m + ks * q.beta_MH) * excess * q.H / a_h;
    const double im = q.beta_HM / (a_h * q.d_M + q.beta_HM) * excess * ks / a_m;
    endemic = {q.H - a_h * ih, (q.sigma_H + q.b_H) / q.gamma_H * ih, ih,
               ks - a_m * im, q.d_M / q.gamma_M * im, im};
  }
  add("endemic", endemic, exists);
  return set;
}

R0Report r0_sit(const EpiParams& q) {
  R0Report rep;
  rep.label = "sit-baseline";
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(4, 4);
  F(0, 3) = q.beta_MH;
  F(2, 1) = q.beta_HM * q.k_star() / q.H;
  rep.F = F;
  rep.V = transfer_matrix(q, {{q.gamma_M, q.d_M}});
  rep.r0 = radius_of(rep.F, rep.V);
  rep.basic = rep.r0 * rep.r0;
  rep.closed_form = closed_form_r0(q.beta_HM, q.beta_MH, q.k_star(), q.gamma_M, q.d_M, q);
  return rep;
}

std::pair<R0Report, R0Report> r0_wb(const EpiParams& q) {
  return {wb_report(q, 0.0, "wolbachia-free"), wb_report(q, 1.0, "full-invasion")};
}

double r_pstar(const EpiParams& q, double p_star) {
  if (!(p_star >= 0.0 && p_star <= 1.0)) throw ValidationError("p* must lie in [0, 1]");
  const auto [m, w] = r0_wb(q);
  return std::sqrt(w.closed_form * w.closed_form * p_star +
                   m.closed_form * m.closed_form * (1.0 - p_star));
}

Quadratic endemic_polynomial(const EpiParams& q, double p_star) {
  const auto [rm, rw] = r0_wb(q);
  const double m = rm.closed_form * rm.closed_form * (1.0 - p_star);
  const double w = rw.closed_form * rw.closed_form * p_star;
  const double r2 = m + w;
  const double a_h = human_progression(q);
  Quadratic P;
  P.a = q.beta_HM * q.beta_HW + a_h * (m * q.d_M * q.beta_HW + w * q.d_W * q.beta_HM);
  P.b = q.beta_HM * q.d_W + q.beta_HW * q.d_M - m * q.d_M * q.beta_HW - w * q.d_W * q.beta_HM +
        a_h * r2 * q.d_M * q.d_W;
  P.c = q.d_M * q.d_W * (1.0 - r2);
  return P;
}

Quadratic paper_endemic_polynomial(const EpiParams& q, double p_star) {
  const auto [rm, rw] = r0_wb(q);
  const double r2 = r_pstar(q, p_star) * r_pstar(q, p_star);
  const double a_h = human_progression(q);
  Quadratic P;
  P.a = q.beta_HM * q.beta_HW +
        a_h * (q.beta_HM * q.d_W * rm.closed_form * rm.closed_form * (1.0 - p_star) +
               q.beta_HW * q.d_M * rw.closed_form * rw.closed_form * p_star);
  P.b = r2 * a_h * q.d_M * q.d_W - (r2 - 1.0) * (q.beta_HM * q.d_W + q.beta_HW * q.d_M);
  P.c = -(r2 - 1.0) * q.d_M * q.d_W;
  return P;
}

EquilibriumSet equilibria_wb(const EpiParams& q, double p_star) {
  q.validate();
  if (!(p_star >= 0.0 && p_star <= 1.0) || !is_invasion_zero(p_star, q)) {
    throw ValidationError("p* must be an equilibrium proportion (0, theta or 1)");
  }
  const WbState scale{q.H, q.H, q.H, q.K, q.K, q.K, q.K, 1.0};
  EquilibriumSet set;
  auto add = [&](const std::string& label, const WbState& x, bool exists) {
    Equilibrium e;
    e.label = label;
    e.state.assign(x.begin(), x.end());
    e.exists = exists;
    e.residual = exists ? scaled_residual(rhs_wb(x, q), scale) : 0.0;
    set.items.push_back(std::move(e));
  };
  add("disease-free", {q.H, 0, 0, 0, 0, 0, 0, p_star}, true);

  WbState endemic{};
  const bool exists = r_pstar(q, p_star) > 1.0;
  if (exists) {
    const Quadratic P = endemic_polynomial(q, p_star);
    const double disc = P.b * P.b - 4.0 * P.a * P.c;
    if (disc < 0.0) throw NumericalError("endemic polynomial has no real root although R_p* > 1");
    const double s = -0.5 * (P.b + std::copysign(std::sqrt(disc), P.b));
    const double z1 = s / P.a;
    const double z2 = P.c / s;
    const int positive = (z1 > 0.0) + (z2 > 0.0);
    if (positive != 1) {
      throw NumericalError("endemic polynomial must have exactly one positive root, found " +
                           std::to_string(positive));
    }
    const double r = z1 > 0.0 ? z1 : z2;
    const double a_h = human_progression(q);
    const double a_m = (q.gamma_M + q.d_M) / q.gamma_M;
    const double a_w = (q.gamma_W + q.d_W) / q.gamma_W;
    const double ih = q.H * r;
    const double im = q.K / a_m * q.beta_HM * r / (q.d_M + q.beta_HM * r) * (1.0 - p_star);
    const double iw = q.K / a_w * q.beta_HW * r / (q.d_W + q.beta_HW * r) * p_star;
    endemic = {q.H - a_h * ih, (q.sigma_H + q.b_H) / q.gamma_H * ih, ih,
               q.d_M / q.gamma_M * im, im, q.d_W / q.gamma_W * iw, iw, p_star};
  }
  add("endemic", endemic, exists);
  return set;
}

PersistenceProbe persistence_probe(const EpiParams& q, double horizon) {
  ReleaseSchedule empty;
  empty.horizon = horizon;
  const auto traj = simulate_sit(q, empty, default_sit_init(q));
  PersistenceProbe out;
  out.horizon = horizon;
  out.final_infected = traj.final_state[sit::I_H];
  out.min_infected_tail = out.final_infected;
  for (const auto& s : traj.steps) {
    if (s.t0 >= 0.5 * horizon) out.min_infected_tail = std::min(out.min_infected_tail, s.coeff[0][sit::I_H]);
  }
  return out;
}

}  // namespace vecctl
