#pragma once

#include <array>
#include <cstddef>

#include "vecctl/params.hpp"

namespace vecctl {

template <std::size_t N>
using Vec = std::array<double, N>;

/// Dense row-major square matrix; row i holds the partials of component i.
template <std::size_t N>
using Mat = std::array<Vec<N>, N>;

// Component layouts. The recovered humans are never stored: R_H = H - S_H - E_H - I_H.
namespace seir {
enum Index : std::size_t { S_H, E_H, I_H, S_M, E_M, I_M, kDim };
}
namespace sit {
enum Index : std::size_t { S_H, E_H, I_H, S_M, E_M, I_M, M_S, kDim };
}
namespace wb {
// Wild susceptibles are implicit: S_M = K(1-p) - E_M - I_M, S_W = Kp - E_W - I_W.
enum Index : std::size_t { S_H, E_H, I_H, E_M, I_M, E_W, I_W, P, kDim };
}

using SeirState = Vec<seir::kDim>;
using SitState = Vec<sit::kDim>;
using WbState = Vec<wb::kDim>;

SeirState rhs_seir(const SeirState& x, const EpiParams& p);

/// Uncontrolled sterile-male system; releases are applied as jumps elsewhere.
SitState rhs_sit(const SitState& x, const EpiParams& p);

/// Reduced Wolbachia system with the proportion equation p' = f(p).
WbState rhs_wb(const WbState& x, const EpiParams& p);

Mat<sit::kDim> jacobian_sit(const SitState& x, const EpiParams& p);
Mat<wb::kDim> jacobian_wb(const WbState& x, const EpiParams& p);

/// Probability M/(M + s_c M_S) that a wild female mates with a fertile male.
/// Zero when no wild females are present.
double fertility_factor(double wild, double sterile, double s_c);

/// Proportion dynamics p(1-p)(d_M b_W - d_W b_M(1 - s_h p)) / D(p).
double f_invasion(double p, const EpiParams& params);
double f_invasion_derivative(double p, const EpiParams& params);

/// Per-mosquito effect of a release on the proportion, (1/K) b_M(1-p)(1-s_h p) / D(p).
double g_release(double p, const EpiParams& params);

/// G(p) = integral of 1/g from 0 to p, in closed form. Throws for p outside [0, 1).
double big_G(double p, const EpiParams& params);

/// Largest proportion representable by big_G_inverse.
inline constexpr double kMaxProportion = 1.0 - 1e-12;

/// Unique p in [0, 1) with G(p) = v, to 1e-12 absolute. Values of v beyond
/// G(kMaxProportion) return kMaxProportion and set *clamped.
double big_G_inverse(double v, const EpiParams& params, bool* clamped = nullptr);

/// Interior zero of f, (1/s_h)(1 - d_M b_W / (d_W b_M)).
double theta(const EpiParams& params);

}  // namespace vecctl
