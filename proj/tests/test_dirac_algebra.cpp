#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kndirac/dirac_algebra.hpp"

using namespace kn;

namespace {

SpacetimeParams random_slow(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  SpacetimeParams p;
  p.M = 0.5 + std::abs(U(rng));
  for (;;) {
    p.a = 0.95 * p.M * U(rng);
    p.Q = 0.95 * p.M * U(rng);
    if (p.a * p.a + p.Q * p.Q < 0.95 * p.M * p.M) return p;
  }
}

BLPoint random_point(std::mt19937_64& rng, const SpacetimeParams& p, bool inside) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto h = horizons(p);
  double th = 0.1 + 2.9 * U(rng);
  if (inside && h.r_minus > 0.0) return {h.r_minus + (h.r_plus - h.r_minus) * (0.05 + 0.9 * U(rng)), th};
  return {h.r_plus + 0.05 + 10 * U(rng), th};
}

const double eta[4] = {1, -1, -1, -1};

// coefficient of X in the expansion of B over {gamma^a, gamma^a gamma5}
cplx coeff(const Mat4c& B, const Mat4c& X) { return (B * X.inverse()).trace() / 4.0; }

}  // namespace

TEST_CASE("gamma matrices") {
  const auto& gs = gamma_weyl();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Mat4c ac = 0.5 * (gs.g[a] * gs.g[b] + gs.g[b] * gs.g[a]);
      Mat4c want = (a == b ? eta[a] : 0.0) * Mat4c::Identity();
      CHECK(max_abs(ac - want) == 0.0);
    }
  CHECK(max_abs(gs.g5 * gs.g5 - Mat4c::Identity()) == 0.0);
  for (int a = 0; a < 4; ++a) CHECK(max_abs(gs.g5 * gs.g[a] + gs.g[a] * gs.g5) == 0.0);
  Mat4c expect = Vec4c(-1, -1, 1, 1).asDiagonal();
  CHECK(max_abs(gs.g5 - expect) == 0.0);
}

TEST_CASE("general Dirac matrices") {
  SpacetimeParams p{1.0, 0.6, 0.3};
  BLPoint x{3.0, 1.0};
  auto g = metric(x, Chart::EF, p);
  auto G = general_dirac_matrices(orthonormal_u_ef(x, p).vectors);
  CHECK(clifford_residual(G, g) < 1e-10);
  Mat4 ginv = g.g.inverse();
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) CHECK(std::abs((G[mu] * G[nu]).trace() - 4.0 * ginv(mu, nu)) < 1e-10);

  OrthonormalTetrad flat{{Vec4(1, 0, 0, 0), Vec4(0, 1, 0, 0), Vec4(0, 0, 1, 0), Vec4(0, 0, 0, 1)},
                         Variance::vectors, Chart::BL};
  auto Gf = general_dirac_matrices(flat);
  for (int a = 0; a < 4; ++a) CHECK(max_abs(Gf[a] - gamma_weyl().g[a]) == 0.0);

  CHECK_THROWS_AS(general_dirac_matrices(orthonormal_u_ef(x, p).forms), DomainError);
}

TEST_CASE("Clifford relation on random samples, both charts") {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    auto p = random_slow(rng);
    auto x = random_point(rng, p, i % 2);
    auto ge = metric(x, Chart::EF, p);
    worst = std::max(worst, clifford_residual(general_dirac_matrices(orthonormal_u_ef(x, p).vectors), ge));
    auto gb = metric(x, Chart::BL, p);
    auto ub = orthonormal_from_null(symmetric_bl_tetrad(x, p));
    worst = std::max(worst, clifford_residual(general_dirac_matrices(ub), gb));
  }
  CHECK(worst < 1e-9);
  MESSAGE("max Clifford residual " << worst);
}

TEST_CASE("chirality matrix is constant") {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto p = random_slow(rng);
    auto x = random_point(rng, p, i % 2);
    auto G = general_dirac_matrices(orthonormal_u_ef(x, p).vectors);
    double sg = delta_sigma(x, p).Sigma * std::sin(x.theta);
    worst = std::max(worst, max_abs(chirality_from(G, sg) - gamma_weyl().g5));
  }
  CHECK(worst <= 1e-12);
  MESSAGE("max deviation from gamma5 " << worst);
}

TEST_CASE("spin-connection term, closed form") {
  const auto& gs = gamma_weyl();
  // a = 0: no gamma5 parts
  SpacetimeParams s{1.0, 0.0, 0.4};
  Mat4c B = b_term_closed({3.0, 0.8}, s);
  for (int a = 0; a < 4; ++a) CHECK(std::abs(coeff(B, gs.g[a] * gs.g5)) < 1e-15);
  // equator: the cos and cot terms vanish, leaving the r a sin gamma1 gamma5 term
  SpacetimeParams p{1.0, 0.6, 0.3};
  B = b_term_closed({3.0, M_PI / 2}, p);
  CHECK(std::abs(coeff(B, gs.g[0] * gs.g5)) < 1e-15);
  CHECK(std::abs(coeff(B, gs.g[3] * gs.g5)) < 1e-15);
  CHECK(std::abs(coeff(B, gs.g[1])) < 1e-15);
  CHECK(std::abs(coeff(B, gs.g[1] * gs.g5) - 3.0 * 0.6 / (2 * std::pow(9.0, 1.5))) < 1e-15);
}

TEST_CASE("spin-connection term against its definition") {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    auto p = random_slow(rng);
    auto x = random_point(rng, p, i % 2);
    double h = 1e-5 * std::max(1.0, x.r);
    worst = std::max(worst, max_abs(b_term_numeric(x, p, h) - b_term_closed(x, p)));
  }
  CHECK(worst < 1e-6);
  MESSAGE("max |B_fd - B| " << worst);

  SpacetimeParams p{1.0, 0.6, 0.48};
  BLPoint x{5.0, 0.7};
  Mat4c Bc = b_term_closed(x, p);
  CHECK(max_abs(b_term_numeric(x, p, 1e-5) - Bc) < 1e-6);

  // the printed + sign on the a^2 cos sin gamma1 term does not match the definition
  auto [D, S] = delta_sigma(x, p);
  (void)D;
  Mat4c printed = Bc + I * p.a * p.a * std::cos(x.theta) * std::sin(x.theta) / std::pow(S, 1.5) *
                           gamma_weyl().g[1];
  CHECK(max_abs(b_term_numeric(x, p, 1e-5) - printed) > 1e-3);

  // Schwarzschild: no gamma0 gamma5 / gamma3 gamma5 contributions
  SpacetimeParams s{1.0, 0.0, 0.0};
  Mat4c Bs = b_term_numeric({4.0, 0.9}, s, 1e-5);
  const auto& gs = gamma_weyl();
  CHECK(std::abs(coeff(Bs, gs.g[0] * gs.g5)) < 1e-9);
  CHECK(std::abs(coeff(Bs, gs.g[3] * gs.g5)) < 1e-9);
}

TEST_CASE("finite-difference order of the spin-connection check") {
  SpacetimeParams p{1.0, 0.6, 0.48};
  BLPoint x{5.0, 0.7};
  Mat4c Bc = b_term_closed(x, p);
  double hs[3] = {1e-3, 1e-4, 1e-5};
  double e[3];
  for (int i = 0; i < 3; ++i) e[i] = max_abs(b_term_numeric(x, p, hs[i]) - Bc);
  // least-squares slope of log e against log h
  double mx = 0, my = 0;
  for (int i = 0; i < 3; ++i) {
    mx += std::log(hs[i]) / 3;
    my += std::log(e[i]) / 3;
  }
  double num = 0, den = 0;
  for (int i = 0; i < 3; ++i) {
    num += (std::log(hs[i]) - mx) * (std::log(e[i]) - my);
    den += (std::log(hs[i]) - mx) * (std::log(hs[i]) - mx);
  }
  double slope = num / den;
  CHECK(slope > 1.7);
  CHECK(slope < 2.3);
  // halving h quarters the discrepancy
  double e1 = max_abs(b_term_numeric(x, p, 2e-3) - Bc), e2 = max_abs(b_term_numeric(x, p, 1e-3) - Bc);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  MESSAGE("errors " << e[0] << " " << e[1] << " " << e[2] << " slope " << slope);
}

TEST_CASE("Dirac stencil") {
  SpacetimeParams p{1.0, 0.6, 0.3};
  BLPoint x{3.0, 1.0};
  double m = 0.7;
  auto st = dirac_stencil(x, p, m);
  for (int mu = 0; mu < 4; ++mu) {
    CHECK(st.A[mu].topLeftCorner<2, 2>().cwiseAbs().maxCoeff() == 0.0);
    CHECK(st.A[mu].bottomRightCorner<2, 2>().cwiseAbs().maxCoeff() == 0.0);
  }
  double S = delta_sigma(x, p).Sigma;
  CHECK(max_abs(st.A[idx::th] - I / std::sqrt(S) * gamma_weyl().g[1]) < 1e-15);

  std::mt19937_64 rng(4);
  double worst_ab = 0.0, worst_ind = 0.0;
  for (int i = 0; i < 200; ++i) {
    auto q = random_slow(rng);
    auto y = random_point(rng, q, i % 2);
    double mass = 0.1 * (i % 10);
    auto d = dirac_stencil(y, q, mass);
    // closed-form alpha/beta entries are the negative of i G d + B
    auto ab = alpha_beta_stencil(y, q);
    for (auto& A : ab.A) A = -A;
    ab.A0 = -ab.A0 - mass * Mat4c::Identity();
    worst_ab = std::max(worst_ab, stencil_distance(d, ab));
    // independent assembly from the null tetrad and Gram-Schmidt-free conversion
    auto G = general_dirac_matrices(orthonormal_from_null(ef_null_tetrad(y, q).vectors));
    DiracStencil ind = d;
    for (int mu = 0; mu < 4; ++mu) ind.A[mu] = I * G[mu];
    ind.A0 = b_term_closed(y, q) - mass * Mat4c::Identity();
    worst_ind = std::max(worst_ind, stencil_distance(d, ind));
  }
  CHECK(worst_ab < 1e-10);
  CHECK(worst_ind < 1e-10);
}

TEST_CASE("transformed operator") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst_closed = 0.0, worst_fd = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto p = random_slow(rng);
    auto x = random_point(rng, p, i % 2);
    double m = 2 * U(rng);
    auto st = dirac_stencil(x, p, m);
    auto tr = transform_stencil(st);
    auto cl = transformed_closed(x, p, m);
    worst_closed = std::max(worst_closed, stencil_distance(tr, cl));

    // conjugation with numerically differentiated D
    auto Dof = [&](double r, double th) {
      double Del = delta_of(r, p);
      cplx dl(r, p.a * std::cos(th)), dlb(r, -p.a * std::cos(th));
      return Vec4c(std::sqrt(dlb), std::sqrt(dlb * std::abs(Del)), std::sqrt(dl * std::abs(Del)),
                   std::sqrt(dl));
    };
    double h = 1e-5 * std::max(1.0, x.r);
    Vec4c Dc = Dof(x.r, x.theta);
    Vec4c dr = (Dof(x.r + h, x.theta).cwiseInverse() - Dof(x.r - h, x.theta).cwiseInverse()) / (2 * h);
    Vec4c dt = (Dof(x.r, x.theta + h).cwiseInverse() - Dof(x.r, x.theta - h).cwiseInverse()) / (2 * h);
    cplx dl(x.r, p.a * std::cos(x.theta)), dlb(x.r, -p.a * std::cos(x.theta));
    Vec4c gam = -I * Vec4c(dl, -dl, -dlb, dlb);
    Mat4c left = gam.cwiseProduct(Dc).asDiagonal();
    DiracStencil fd = st;
    for (int mu = 0; mu < 4; ++mu) fd.A[mu] = left * st.A[mu] * Dc.cwiseInverse().asDiagonal();
    fd.A0 = left * (st.A0 * Dc.cwiseInverse().asDiagonal() + st.A[idx::r] * dr.asDiagonal() +
                    st.A[idx::th] * dt.asDiagonal());
    worst_fd = std::max(worst_fd, stencil_distance(fd, cl));
  }
  CHECK(worst_closed < 1e-10);
  CHECK(worst_fd < 1e-6);
  MESSAGE("transform: analytic " << worst_closed << ", finite-difference " << worst_fd);

  SpacetimeParams p{1.0, 0.6, 0.3};
  BLPoint x{3.0, 1.0};
  double m = 0.7, w = 0.4, k = 0.5;
  auto op = mode_evaluate(transform_stencil(dirac_stencil(x, p, m)), w, k);
  cplx dl(x.r, p.a * std::cos(x.theta));
  Vec4c want(I * dl * m, -I * dl * m, -I * std::conj(dl) * m, I * std::conj(dl) * m);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(op.A0(i, i) - want(i)) < 1e-12);
    CHECK(std::abs(op.Ar(i, i)) < 1e-14);
    CHECK(std::abs(op.Ath(i, i)) < 1e-14);
  }
  auto op0 = mode_evaluate(transform_stencil(dirac_stencil(x, p, 0.0)), w, k);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(op0.A0(i, i)) < 1e-13);

  CHECK_THROWS_AS(transformed_closed({2.0, 1.0}, SpacetimeParams{1.0, 0.0, 0.0}, 1.0), DomainError);
}

TEST_CASE("spin inner product") {
  Vec4c e0(1, 0, 0, 0), e2(0, 0, 1, 0);
  CHECK(spin_inner(e0, e2) == cplx(1.0));
  CHECK(spin_inner(e0, e0) == cplx(0.0));
  std::mt19937_64 rng(6);
  std::normal_distribution<double> N;
  for (int i = 0; i < 100; ++i) {
    Vec4c a, b;
    for (int j = 0; j < 4; ++j) {
      a(j) = cplx(N(rng), N(rng));
      b(j) = cplx(N(rng), N(rng));
    }
    CHECK(std::abs(spin_inner(a, b) - std::conj(spin_inner(b, a))) < 1e-14);
    cplx c(0.3, -1.2);
    CHECK(std::abs(spin_inner(a, c * b) - c * spin_inner(a, b)) < 1e-13);
    CHECK(std::abs(spin_inner(c * a, b) - std::conj(c) * spin_inner(a, b)) < 1e-13);
  }
}
