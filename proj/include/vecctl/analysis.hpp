#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vecctl/model.hpp"
#include "vecctl/params.hpp"

namespace vecctl {

/// Per-stage reproduction number of one disease-free equilibrium. r0 is the
/// spectral radius of F V^-1; closed_form is the analytic square-root formula.
struct R0Report {
  std::string label;  // sit-baseline, wolbachia-free or full-invasion
  double r0 = 0.0;
  double basic = 0.0;  // r0^2
  double closed_form = 0.0;
  Eigen::MatrixXd F;
  Eigen::MatrixXd V;
};

struct Equilibrium {
  std::string label;
  std::vector<double> state;
  bool exists = false;
  double residual = 0.0;  // max_i |rhs_i| / scale_i, zero when absent
};

struct EquilibriumSet {
  std::vector<Equilibrium> items;

  /// Throws ValidationError for an unknown label.
  [[nodiscard]] const Equilibrium& get(const std::string& label) const;
};

/// Coefficients of a Z^2 + b Z + c.
struct Quadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  [[nodiscard]] double operator()(double z) const { return (a * z + b) * z + c; }
};

/// Largest eigenvalue modulus of a small nonnegative matrix by power iteration
/// on A^2 (the next-generation spectra come in +-r pairs). Zero when the
/// iterate vanishes.
double spectral_radius(const Eigen::MatrixXd& A, double tol = 1e-12, int max_iter = 10000);

EquilibriumSet equilibria_seir(const EpiParams& params);
R0Report r0_sit(const EpiParams& params);

/// R_0^M at the Wolbachia-free equilibrium and R_0^W at full invasion.
std::pair<R0Report, R0Report> r0_wb(const EpiParams& params);

/// sqrt((R_0^W)^2 p* + (R_0^M)^2 (1 - p*)).
double r_pstar(const EpiParams& params, double p_star);

/// Polynomial whose positive root r gives I_H* = H r at the equilibrium p*.
Quadratic endemic_polynomial(const EpiParams& params, double p_star);

/// The polynomial as printed in the literature; its root does not zero the
/// right-hand side and is kept for comparison only.
Quadratic paper_endemic_polynomial(const EpiParams& params, double p_star);

/// Disease-free state (H, 0, ..., 0, p*) and, when R_{p*} > 1, the endemic
/// state. p* must be a zero of f (0, theta or 1).
EquilibriumSet equilibria_wb(const EpiParams& params, double p_star);

/// Long-horizon diagnostic: minimum of I_H over the second half of an
/// uncontrolled SEIR run on [0, horizon].
struct PersistenceProbe {
  double horizon = 0.0;
  double min_infected_tail = 0.0;
  double final_infected = 0.0;
};
PersistenceProbe persistence_probe(const EpiParams& params, double horizon = 5000.0);

}  // namespace vecctl
