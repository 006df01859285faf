#pragma once

#include <array>

#include "kndirac/np_tetrad.hpp"

namespace kn {

struct GammaSet {
  std::array<Mat4c, 4> g;  // gamma^(0..3)
  Mat4c g5;                // i g0 g1 g2 g3
};

// chiral (Weyl) set: g0 = [[0,I],[I,0]], gi = [[0,s_i],[-s_i,0]]
const GammaSet& gamma_weyl();

// G^mu = u^mu_(a) gamma^(a); needs the vector variance
std::array<Mat4c, 4> general_dirac_matrices(const OrthonormalTetrad& u);

// max over mu, nu of the entrywise deviation of {G^mu, G^nu}/2 from g^{mu nu} Id
double clifford_residual(const std::array<Mat4c, 4>& G, const MetricComponents& g);

// (i/4!) sqrt|g| eps_{mu nu rho sigma} G^mu G^nu G^rho G^sigma, orientation eps_{tau r theta phi} = +1
Mat4c chirality_from(const std::array<Mat4c, 4>& G, double sqrt_abs_g);

// spin-connection term of the EF tetrad in closed form
Mat4c b_term_closed(const BLPoint& x, const SpacetimeParams& p);
// same term from its definition: central differences in r and theta of the tetrad
Mat4c b_term_numeric(const BLPoint& x, const SpacetimeParams& p, double h);

// A_mu d_mu + A0 at one point; mu in (tau, r, theta, phi)
struct DiracStencil {
  std::array<Mat4c, 4> A;
  Mat4c A0;
  BLPoint x;
  SpacetimeParams p;
};

// i G^mu d_mu + B - m
DiracStencil dirac_stencil(const BLPoint& x, const SpacetimeParams& p, double mass);

// the closed-form alpha/beta entries, with typos corrected; equals -(i G^mu d_mu + B)
DiracStencil alpha_beta_stencil(const BLPoint& x, const SpacetimeParams& p);

// Gamma D st D^-1, derivative of D^-1 taken in closed form
DiracStencil transform_stencil(const DiracStencil& st);

// the transformed operator assembled from D1~, D0~, L+-~ and the mass diagonal
DiracStencil transformed_closed(const BLPoint& x, const SpacetimeParams& p, double mass);

struct DtransformData {
  Vec4c D;     // diagonal of D
  Vec4c Gam;   // diagonal of Gamma
  Vec4c dDinv_r, dDinv_th;  // derivatives of the diagonal of D^-1
};

DtransformData d_transform(const BLPoint& x, const SpacetimeParams& p);

// action on e^{-i w tau} e^{-i k phi} F(r, theta): A_r d_r + A_th d_th + A0
struct ModeOperator {
  Mat4c Ar, Ath, A0;
};

ModeOperator mode_evaluate(const DiracStencil& st, double omega, double k);

double max_abs(const Mat4c& m);
double stencil_distance(const DiracStencil& a, const DiracStencil& b);

// <psi, S phi> with S swapping the upper and lower 2-blocks
cplx spin_inner(const Vec4c& psi, const Vec4c& phi);

}  // namespace kn
