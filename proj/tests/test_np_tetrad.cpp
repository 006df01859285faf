#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kndirac/np_tetrad.hpp"

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

// point off both horizons; interior when inside is set and r_- > 0
BLPoint random_point(std::mt19937_64& rng, const SpacetimeParams& p, bool inside) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto h = horizons(p);
  double th = 0.02 + 3.1 * U(rng);
  if (inside) return {h.r_minus + (h.r_plus - h.r_minus) * (0.02 + 0.96 * U(rng)), th};
  return {h.r_plus + 0.02 + 30 * U(rng), th};
}

MetricComponents minkowski() { return {Chart::BL, Vec4(1, -1, -1, -1).asDiagonal()}; }

double vdiff(const NullTetrad& a, const NullTetrad& b) {
  return std::max({(a.l - b.l).cwiseAbs().maxCoeff(), (a.n - b.n).cwiseAbs().maxCoeff(),
                   (a.m - b.m).cwiseAbs().maxCoeff(), (a.mbar - b.mbar).cwiseAbs().maxCoeff()});
}

double udiff(const OrthonormalTetrad& a, const OrthonormalTetrad& b) {
  double w = 0.0;
  for (int i = 0; i < 4; ++i) w = std::max(w, (a.u[i] - b.u[i]).cwiseAbs().maxCoeff());
  return w;
}

std::array<Vec4, 4> coordinate_frame() {
  return {Vec4(1, 0, 0, 0), Vec4(0, 1, 0, 0), Vec4(0, 0, 1, 0), Vec4(0, 0, 0, 1)};
}

}  // namespace

TEST_CASE("gram-schmidt") {
  auto id = gram_schmidt_tetrad(coordinate_frame(), minkowski());
  for (int i = 0; i < 4; ++i) CHECK((id.u[i] - coordinate_frame()[i]).norm() == 0.0);

  SpacetimeParams p{1.0, 0.6, 0.3};
  auto g = metric({3.0, 1.0}, Chart::EF, p);
  auto u = gram_schmidt_tetrad(coordinate_frame(), g);
  CHECK(u.chart == Chart::EF);
  CHECK(dyad_residual(u, g) < 1e-10);
  auto again = gram_schmidt_tetrad(u.u, g);
  CHECK(udiff(again, u) < 1e-10);

  // at r_+ the EF coordinate vector d_tau is null; start from l + n instead
  auto h = horizons(p);
  auto gh = metric({h.r_plus, 1.0}, Chart::EF, p);
  auto ef = ef_null_tetrad({h.r_plus, 1.0}, p);
  Vec4 t = (ef.vectors.l + ef.vectors.n).real();
  auto uh = gram_schmidt_tetrad({t, Vec4(0, 1, 0, 0), Vec4(0, 0, 1, 0), Vec4(0, 0, 0, 1)}, gh);
  CHECK(dyad_residual(uh, gh) < 1e-10);

  CHECK_THROWS_AS(gram_schmidt_tetrad({Vec4(0, 1, 0, 0), Vec4(1, 0, 0, 0), Vec4(0, 0, 1, 0), Vec4(0, 0, 0, 1)},
                                      minkowski()),
                  DomainError);
  CHECK_THROWS_AS(gram_schmidt_tetrad({Vec4(1, 0, 0, 0), Vec4(0, 1, 0, 0), Vec4(0, 2, 0, 0), Vec4(0, 0, 0, 1)},
                                      minkowski()),
                  DomainError);
}

TEST_CASE("gram-schmidt on random charts and points") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-0.3, 0.3);
  for (int i = 0; i < 200; ++i) {
    auto p = random_slow(rng);
    bool in = (i % 2) && horizons(p).r_minus > 0.0;
    auto x = random_point(rng, p, in);
    for (Chart c : {Chart::BL, Chart::EF}) {
      auto g = metric(x, c, p);
      // perturb a tetrad so the input is generic but keeps a timelike first vector
      OrthonormalTetrad base = c == Chart::EF ? orthonormal_u_ef(x, p).vectors
                                              : orthonormal_from_null(symmetric_bl_tetrad(x, p));
      std::array<Vec4, 4> f;
      for (int k = 0; k < 4; ++k) {
        f[k] = base.u[k];
        for (int j = 0; j < 4; ++j)
          if (j != k) f[k] += U(rng) * (k == 0 ? 0.3 : 1.0) * base.u[j];
      }
      auto u = gram_schmidt_tetrad(f, g);
      CHECK(dyad_residual(u, g) < 1e-10);
    }
  }
}

TEST_CASE("null <-> orthonormal, Minkowski") {
  OrthonormalTetrad std_tet{coordinate_frame(), Variance::vectors, Chart::BL};
  auto nt = null_from_orthonormal(std_tet);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK((nt.l - Vec4c(s, 0, 0, s)).norm() < 1e-16);
  CHECK((nt.n - Vec4c(s, 0, 0, -s)).norm() < 1e-16);
  CHECK((nt.m - Vec4c(0, s, cplx(0, s), 0)).norm() < 1e-16);
  CHECK(np_residual(nt, minkowski()) < 1e-15);
  CHECK(udiff(orthonormal_from_null(nt), std_tet) < 1e-15);
}

TEST_CASE("null <-> orthonormal, EF tetrad round trip") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    auto p = random_slow(rng);
    auto x = random_point(rng, p, (i % 2) && horizons(p).r_minus > 0.0);
    auto ef = ef_null_tetrad(x, p);
    for (const auto* nt : {&ef.vectors, &ef.forms}) {
      auto u = orthonormal_from_null(*nt);
      auto back = null_from_orthonormal(u);
      CHECK(vdiff(back, *nt) < 1e-12 * std::max(1.0, nt->l.norm()));
      CHECK(back.variance == nt->variance);
      auto g = metric(x, Chart::EF, p);
      CHECK(dyad_residual(u, g) < 1e-10);
      CHECK(np_residual(back, g) < 1e-10);
    }
  }
}

TEST_CASE("class-3 rotation") {
  SpacetimeParams p{1.0, 0.6, 0.3};
  BLPoint x{3.0, 1.0};
  auto nt = symmetric_bl_tetrad(x, p);
  CHECK(vdiff(class3_rotation(nt, 1.0), nt) == 0.0);
  CHECK_THROWS_AS(class3_rotation(nt, 0.0), DomainError);

  auto g = metric(x, Chart::BL, p);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  for (int i = 0; i < 100; ++i) {
    cplx C(N(rng), N(rng));
    auto r = class3_rotation(nt, C);
    CHECK(np_residual(r, g) < 1e-10);
    CHECK(std::abs((r.l.transpose() * g.g.cast<cplx>() * r.n)(0, 0) - 1.0) < 1e-12);
  }
  // non-real C leaves l complex, which has no orthonormal counterpart
  CHECK_THROWS_AS(orthonormal_from_null(class3_rotation(nt, cplx(1.0, 1.0))), DomainError);
}

TEST_CASE("symmetric BL tetrad") {
  SpacetimeParams p{1.0, 0.6, 0.3};
  BLPoint x{3.0, 1.0};
  auto nt = symmetric_bl_tetrad(x, p);
  CHECK(nt.chart == Chart::BL);
  CHECK(nt.variance == Variance::vectors);
  CHECK(np_residual(nt, metric(x, Chart::BL, p)) < 1e-10);

  SpacetimeParams s{1.0, 0.0, 0.0};
  BLPoint xs{5.0, M_PI / 2};
  auto ns = symmetric_bl_tetrad(xs, s);
  auto gs = metric(xs, Chart::BL, s).g.cast<cplx>();
  CHECK(std::abs((ns.l.transpose() * gs * ns.l)(0, 0)) == 0.0);
  // outgoing radial null direction: dr/dt = 1 - 2M/r
  CHECK(std::abs(ns.l(idx::r) / ns.l(idx::t) - (1 - 2.0 / 5.0)) < 1e-15);

  // inside, n is the negative of the exterior expression
  auto h = horizons(p);
  BLPoint xi{0.5 * (h.r_plus + h.r_minus), 1.0};
  auto ni = symmetric_bl_tetrad(xi, p);
  auto [D, S] = delta_sigma(xi, p);
  double nl = 1.0 / std::sqrt(2 * S * std::abs(D));
  double rho2 = xi.r * xi.r + p.a * p.a;
  Vec4c ext(rho2 * nl, -D * nl, 0.0, p.a * nl);
  CHECK((ni.n + ext).norm() < 1e-14);
  CHECK(np_residual(ni, metric(xi, Chart::BL, p)) < 1e-10);

  CHECK_THROWS_AS(symmetric_bl_tetrad({2.0, 1.0}, s), DomainError);
}

TEST_CASE("NP conditions at random points, both charts") {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    auto p = random_slow(rng);
    auto x = random_point(rng, p, (i % 2) && horizons(p).r_minus > 0.0);
    auto bl = symmetric_bl_tetrad(x, p);
    double e1 = np_residual(bl, metric(x, Chart::BL, p));
    auto ef = ef_null_tetrad(x, p);
    auto g = metric(x, Chart::EF, p);
    double e2 = np_residual(ef.vectors, g);
    double e3 = np_residual(ef.forms, g);
    worst = std::max({worst, e1, e2, e3});
  }
  CHECK(worst < 1e-10);
  MESSAGE("max NP residual " << worst);
}

TEST_CASE("EF tetrad on the horizon and index lowering") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    auto p = random_slow(rng);
    auto h = horizons(p);
    BLPoint x{h.r_plus, 0.02 + 3.1 * U(rng)};
    auto ef = ef_null_tetrad(x, p);
    auto g = metric(x, Chart::EF, p);
    CHECK(ef.vectors.l.allFinite());
    CHECK(np_residual(ef.vectors, g) < 1e-10);
    CHECK(np_residual(ef.forms, g) < 1e-10);
    auto y = random_point(rng, p, (i % 2) && h.r_minus > 0.0);
    auto efy = ef_null_tetrad(y, p);
    auto low = lower(efy.vectors, metric(y, Chart::EF, p));
    CHECK(vdiff(low, efy.forms) < 1e-10 * std::max(1.0, efy.forms.l.norm()));
  }
  SpacetimeParams s{1.0, 0.0, 0.0};
  for (double r : {1.0, 2.0, 3.0, 7.0}) {
    BLPoint x{r, 0.8};
    auto ef = ef_null_tetrad(x, s);
    double D = r * r - 2 * r;
    double k = 1.0 / (std::sqrt(2.0) * r * 2.0);
    CHECK(std::abs(ef.vectors.l(idx::t) - (2 * r * r - D) * k) < 1e-15);
    CHECK(std::abs(ef.vectors.l(idx::r) - D * k) < 1e-15);
    CHECK(std::abs(ef.vectors.l(idx::ph)) == 0.0);
  }
}

TEST_CASE("construction chain: BL frame -> EF coordinates -> class-3 rotation") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 200; ++i) {
    auto p = random_slow(rng);
    auto h = horizons(p);
    auto x = random_point(rng, p, (i % 2) && h.r_minus > 0.0);
    auto moved = push_forward(symmetric_bl_tetrad(x, p), bl_to_ef_jacobian(x.r, p), Chart::EF);
    double C = std::sqrt(std::abs(delta_of(x.r, p))) / h.r_plus;
    auto rotated = class3_rotation(moved, C);
    auto ef = ef_null_tetrad(x, p).vectors;
    CHECK(vdiff(rotated, ef) < 1e-10 * std::max(1.0, ef.l.norm()));
  }
  SpacetimeParams p{1.0, 0.6, 0.3};
  auto h = horizons(p);
  BLPoint x{3.0, 1.0};
  auto moved = push_forward(symmetric_bl_tetrad(x, p), bl_to_ef_jacobian(3.0, p), Chart::EF);
  auto rotated = class3_rotation(moved, std::sqrt(delta_of(3.0, p)) / h.r_plus);
  CHECK(vdiff(rotated, ef_null_tetrad(x, p).vectors) < 1e-10);
}

TEST_CASE("orthonormal EF tetrad") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto p = random_slow(rng);
    auto h = horizons(p);
    auto x = random_point(rng, p, (i % 2) && h.r_minus > 0.0);
    if (i % 7 == 0) x.r = h.r_plus;
    auto u = orthonormal_u_ef(x, p);
    auto g = metric(x, Chart::EF, p);
    auto [D, S] = delta_sigma(x, p);
    (void)D;
    CHECK(u.vectors.u[1](idx::th) == 1.0 / std::sqrt(S));
    CHECK(u.vectors.u[1](idx::t) == 0.0);
    CHECK(u.vectors.u[1](idx::r) == 0.0);
    CHECK(u.vectors.u[1](idx::ph) == 0.0);
    auto ef = ef_null_tetrad(x, p);
    double sc = std::max(1.0, ef.vectors.l.norm());
    CHECK(udiff(orthonormal_from_null(ef.vectors), u.vectors) < 1e-10 * sc);
    CHECK(udiff(orthonormal_from_null(ef.forms), u.forms) < 1e-10 * std::max(1.0, ef.forms.l.norm()));
    CHECK(dyad_residual(u.vectors, g) < 1e-10);
    CHECK(dyad_residual(u.forms, g) < 1e-10);
    CHECK(udiff(lower(u.vectors, g), u.forms) < 1e-10 * std::max(1.0, ef.forms.l.norm()));
  }
  SpacetimeParams p{1.0, 0.6, 0.3};
  auto h = horizons(p);
  BLPoint xh{h.r_plus, 1.2};
  auto u = orthonormal_u_ef(xh, p);
  auto g = metric(xh, Chart::EF, p).g;
  CHECK(std::abs(u.vectors.u[0].dot(g * u.vectors.u[0]) - 1.0) < 1e-12);
}

TEST_CASE("EF tetrad is smooth across r_+") {
  SpacetimeParams p{1.0, 0.6, 0.3};
  auto h = horizons(p);
  double th = 0.9;
  double step = 1e-4;
  double worst = 0.0;
  for (int j = -50; j < 50; ++j) {
    double r0 = h.r_plus + j * step;
    auto a = ef_null_tetrad({r0, th}, p);
    auto b = ef_null_tetrad({r0 + step, th}, p);
    worst = std::max(worst, vdiff(a.vectors, b.vectors) / step);
    worst = std::max(worst, vdiff(a.forms, b.forms) / step);
  }
  CHECK(worst < 10.0);
  MESSAGE("max difference quotient across r_+ " << worst);
}

TEST_CASE("tags are enforced") {
  SpacetimeParams p{1.0, 0.6, 0.3};
  BLPoint x{3.0, 1.0};
  auto ef = ef_null_tetrad(x, p);
  CHECK_THROWS_AS(np_residual(ef.vectors, metric(x, Chart::BL, p)), DomainError);
  CHECK_THROWS_AS(lower(ef.forms, metric(x, Chart::EF, p)), DomainError);
  CHECK_THROWS_AS(push_forward(ef.forms, Mat4::Identity(), Chart::EF), DomainError);
  auto u = orthonormal_u_ef(x, p);
  CHECK_THROWS_AS(dyad_residual(u.vectors, metric(x, Chart::BL, p)), DomainError);
  CHECK_THROWS_AS(ef_null_tetrad({horizons(p).r_minus, 1.0}, p), DomainError);
}
