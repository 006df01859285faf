#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "kndirac/angular_solver.hpp"
#include "ode_helper.hpp"

using namespace kn;

namespace {

double integrate_theta(const std::function<double(double)>& f) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double th) { return f(th) * std::sin(th); }, 0.0, M_PI, 15, 1e-14);
}

// fixed 150-point rule, for many smooth integrands
double integrate_theta_fixed(const std::function<double(double)>& f) {
  return boost::math::quadrature::gauss<double, 150>::integrate([&](double th) { return f(th) * std::sin(th); },
                                                                0.0, M_PI);
}

// regular local solutions at the poles, leading two orders; am is a*mass
Vec2c north_data(double t, double k, double xi, double am) {
  if (k > 0) return Vec2c(std::pow(t, k - 0.5), (xi + am) / (2 * k + 1) * std::pow(t, k + 0.5));
  return Vec2c(-(xi - am) / (1 - 2 * k) * std::pow(t, -k + 0.5), std::pow(t, -k - 0.5));
}

// phi = pi - theta
Vec2c south_data(double phi, double k, double xi, double am) {
  if (k > 0) return Vec2c((xi + am) / (2 * k + 1) * std::pow(phi, k + 0.5), std::pow(phi, k - 0.5));
  return Vec2c(std::pow(phi, -k - 0.5), -(xi - am) / (1 - 2 * k) * std::pow(phi, -k + 0.5));
}

// Wronskian at pi/2 of the solutions regular at the two poles
double mismatch(double xi, ModeParams mode, const SpacetimeParams& p) {
  mode.xi = xi;
  double t0 = 1e-3;
  double am = p.a * mode.mass;
  auto V = [&](double th) { return angular_system(th, mode, p); };
  Vec2c left = integrate_2x2(V, north_data(t0, mode.k, xi, am), t0, 0.5 * M_PI);
  Vec2c right = integrate_2x2(V, south_data(t0, mode.k, xi, am), M_PI - t0, 0.5 * M_PI);
  return (left(0) * right(1) - left(1) * right(0)).real();
}

double shoot(double guess, const ModeParams& mode, const SpacetimeParams& p) {
  auto f = [&](double x) { return mismatch(x, mode, p); };
  double lo = guess - 0.05, hi = guess + 0.05;
  std::uintmax_t it = 100;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), it);
  return 0.5 * (r.first + r.second);
}

SpacetimeParams random_slow(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  SpacetimeParams p;
  p.M = 1.0;
  for (;;) {
    p.a = 0.9 * U(rng);
    p.Q = 0.9 * U(rng);
    if (p.a * p.a + p.Q * p.Q < 0.9) return p;
  }
}

ModeParams random_mode(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_int_distribution<int> K(-3, 2);
  return ModeParams{1.5 * U(rng), K(rng) + 0.5, std::abs(U(rng)), 0.0};
}

}  // namespace

TEST_CASE("theta quadrature") {
  auto q = theta_quadrature(41);
  CHECK(q.theta.size() == 41);
  double s0 = 0, s2 = 0, s8 = 0;
  for (size_t i = 0; i < q.theta.size(); ++i) {
    CHECK(q.theta[i] > 0.0);
    CHECK(q.theta[i] < M_PI);
    CHECK(q.weight[i] > 0.0);
    double c = std::cos(q.theta[i]);
    s0 += q.weight[i];
    s2 += q.weight[i] * c * c;
    s8 += q.weight[i] * std::pow(std::sin(q.theta[i]), 7) * std::cos(5 * q.theta[i] + 0.2);
  }
  CHECK(std::abs(s0 - 2.0) < 1e-14);
  CHECK(std::abs(s2 - 2.0 / 3.0) < 1e-14);
  double ref = integrate_theta([](double t) { return std::pow(std::sin(t), 7) * std::cos(5 * t + 0.2); });
  CHECK(std::abs(s8 - ref) < 1e-14);
}

TEST_CASE("weighted Jacobi basis") {
  for (double k : {0.5, -1.5, 3.5}) {
    for (int comp : {1, 2}) {
      auto b = AngularBasis::for_component(comp, k, 30);
      auto q = theta_quadrature(120);
      Eigen::MatrixXd B(q.theta.size(), 30);
      Eigen::VectorXd v, dv;
      for (size_t i = 0; i < q.theta.size(); ++i) {
        b.eval(q.theta[i], v, dv);
        B.row(i) = std::sqrt(q.weight[i]) * v;
      }
      Eigen::MatrixXd G = B.transpose() * B;
      CHECK((G - Eigen::MatrixXd::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-12);
      // derivative against central differences
      double th = 1.1, h = 1e-5;
      Eigen::VectorXd vp, vm, tmp;
      b.eval(th, v, dv);
      b.eval(th + h, vp, tmp);
      b.eval(th - h, vm, tmp);
      Eigen::VectorXd fd = (vp - vm) / (2 * h);
      CHECK((fd - dv).cwiseAbs().maxCoeff() < 1e-5 * (1 + dv.cwiseAbs().maxCoeff()));
    }
  }
  // pole exponents
  auto b1 = AngularBasis::for_component(1, -1.5, 4);
  CHECK(b1.alpha() == 2.0);
  CHECK(b1.beta() == 1.0);
}

TEST_CASE("discretization errors and symmetry") {
  SpacetimeParams p{1.0, 0.7, 0.2};
  ModeParams mode{0.9, -2.5, 0.6, 0.0};
  CHECK_THROWS_AS(discretize_angular(mode, p, DiscretizationSpec{7}), DomainError);
  CHECK_THROWS_AS(angular_eigenpairs(mode, p, DiscretizationSpec{16}, 17), DomainError);
  auto d = discretize_angular(mode, p, DiscretizationSpec{40});
  CHECK(d.H.rows() == 80);
  // the two off-diagonal blocks are assembled separately
  CHECK((d.H - d.H.transpose()).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("matrix action on a manufactured function") {
  SpacetimeParams p{1.0, 0.6, 0.3};
  for (double k : {0.5, -1.5}) {
    ModeParams mode{1.2, k, 0.7, 0.0};
    int N = 40;
    auto d = discretize_angular(mode, p, DiscretizationSpec{N});
    double A1 = 0.5 * d.basis1.alpha(), B1 = 0.5 * d.basis1.beta();
    double A2 = 0.5 * d.basis2.alpha(), B2 = 0.5 * d.basis2.beta();
    // Y_j = (1-x)^A (1+x)^B g_j(x), written with its own derivatives
    auto Y = [&](double th, int j, double* dY) {
      double x = std::cos(th), s = std::sin(th);
      double A = j == 1 ? A1 : A2, B = j == 1 ? B1 : B2;
      double w = std::pow(1 - x, A) * std::pow(1 + x, B);
      double dw = w * (A * (1 + x) - B * (1 - x)) / s;
      double g = j == 1 ? std::exp(x) : std::sin(2 * x + 0.3);
      double gx = j == 1 ? std::exp(x) : 2 * std::cos(2 * x + 0.3);
      *dY = dw * g - w * s * gx;
      return w * g;
    };
    auto HY = [&](double th, int row) {
      double s = std::sin(th), c = std::cos(th);
      double f = p.a * mode.omega * s + mode.k / s, hc = 0.5 * c / s, am = p.a * mode.mass;
      double d1, d2;
      double y1 = Y(th, 1, &d1), y2 = Y(th, 2, &d2);
      if (row == 1) return -am * c * y1 + (d2 + (hc + f) * y2);
      return -(d1 + (hc - f) * y1) + am * c * y2;
    };
    Eigen::VectorXd cvec(2 * N), proj(2 * N);
    for (int i = 0; i < N; ++i) {
      auto bi = [&](double th, int comp) {
        Eigen::VectorXd v, dv;
        (comp == 1 ? d.basis1 : d.basis2).eval(th, v, dv);
        return v(i);
      };
      double dd;
      cvec(i) = integrate_theta_fixed([&](double th) { return bi(th, 1) * Y(th, 1, &dd); });
      cvec(N + i) = integrate_theta_fixed([&](double th) { return bi(th, 2) * Y(th, 2, &dd); });
      proj(i) = integrate_theta_fixed([&](double th) { return bi(th, 1) * HY(th, 1); });
      proj(N + i) = integrate_theta_fixed([&](double th) { return bi(th, 2) * HY(th, 2); });
    }
    Eigen::VectorXd act = d.H * cvec;
    CHECK((act - proj).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("a = 0, k = 1/2: symmetric spectrum") {
  SpacetimeParams p{1.0, 0.0, 0.4};
  ModeParams mode{0.0, 0.5, 0.0, 0.0};
  auto e64 = angular_eigenpairs(mode, p, DiscretizationSpec{64}, 8);
  auto e256 = angular_eigenpairs(mode, p, DiscretizationSpec{256}, 8);
  REQUIRE(e64.size() == 8);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(e64[i].xi + e64[7 - i].xi) < 1e-10);
    CHECK(e64[i].n == -(4 - i));
    CHECK(e64[7 - i].n == 4 - i);
  }
  for (int i = 0; i < 8; ++i) {
    CHECK(std::abs(e64[i].xi - e256[i].xi) < 1e-10);
    CHECK(std::abs(e64[i].xi - shoot(e64[i].xi, mode, p)) < 1e-8);
  }
}

TEST_CASE("a = 0: no omega dependence") {
  SpacetimeParams p{1.0, 0.0, 0.5};
  for (double k : {0.5, -2.5}) {
    auto base = angular_spectrum(ModeParams{0.0, k, 0.8, 0.0}, p, DiscretizationSpec{48}).xi;
    for (double w : {1.0, 5.0}) {
      auto s = angular_spectrum(ModeParams{w, k, 0.8, 0.0}, p, DiscretizationSpec{48}).xi;
      for (size_t i = 0; i < s.size(); ++i) CHECK(std::abs(s[i] - base[i]) < 1e-8);
    }
  }
}

TEST_CASE("shooting oracle at random modes") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 6; ++t) {
    auto p = random_slow(rng);
    auto mode = random_mode(rng);
    auto e = angular_eigenpairs(mode, p, DiscretizationSpec{64}, 4);
    for (auto& x : e) CHECK(std::abs(x.xi - shoot(x.xi, mode, p)) < 1e-8);
  }
}

TEST_CASE("self-convergence N = 128 vs 256") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 3; ++t) {
    auto p = random_slow(rng);
    auto mode = random_mode(rng);
    auto a = angular_eigenpairs(mode, p, DiscretizationSpec{128}, 5);
    auto b = angular_eigenpairs(mode, p, DiscretizationSpec{256}, 5);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(a[i].xi - b[i].xi) < 1e-8);
  }
}

TEST_CASE("realness and non-degeneracy over random modes") {
  std::mt19937_64 rng(9);
  double worst_im = 0, worst_gap = 1e300;
  for (int t = 0; t < 50; ++t) {
    auto p = random_slow(rng);
    auto mode = random_mode(rng);
    auto e = angular_eigenpairs(mode, p, DiscretizationSpec{48}, 10);
    for (size_t i = 0; i < e.size(); ++i) {
      worst_im = std::max(worst_im, e[i].imag_residual);
      if (i > 0) worst_gap = std::min(worst_gap, e[i].xi - e[i - 1].xi);
    }
  }
  CHECK(worst_im < 1e-8);
  CHECK(worst_gap > 1e-6);
}

TEST_CASE("eigenfunctions: orthonormal and solve the angular system") {
  SpacetimeParams p{1.0, 0.8, 0.3};
  ModeParams mode{1.1, -1.5, 0.9, 0.0};
  auto e = angular_eigenpairs(mode, p, DiscretizationSpec{64}, 6);
  for (size_t i = 0; i < e.size(); ++i) {
    for (size_t j = i; j < e.size(); ++j) {
      double g = integrate_theta([&](double th) {
        auto a = e[i].at(th), b = e[j].at(th);
        return (std::conj(a.Y(0)) * b.Y(0) + std::conj(a.Y(1)) * b.Y(1)).real();
      });
      CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-8);
    }
    ModeParams m = mode;
    m.xi = e[i].xi;
    double worst = 0;
    for (double th = 0.05; th < M_PI - 0.05; th += 0.1) {
      auto s = e[i].at(th);
      Vec2c r = s.dY - angular_system(th, m, p) * s.Y;
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-8);
    // samples on the stored grid
    REQUIRE(e[i].theta.size() == e[i].Y.size());
    size_t mid = e[i].theta.size() / 2;
    CHECK(std::abs(e[i].at(e[i].theta[mid]).Y(0) - e[i].Y[mid](0)) < 1e-14);
  }
}

TEST_CASE("continuation in omega") {
  DiscretizationSpec spec{40};
  // a = 0: flat
  {
    SpacetimeParams p{1.0, 0.0, 0.3};
    std::vector<double> w;
    for (int i = 0; i <= 10; ++i) w.push_back(0.3 * i);
    auto c = xi_continuation(ModeParams{0, 0.5, 0.4, 0}, w, p, spec, 1);
    for (double x : c.xi) CHECK(std::abs(x - c.xi.front()) < 1e-8);
  }
  // a omega over [0, 0.5], k = 1/2, m = 0
  SpacetimeParams p{1.0, 0.5, 0.2};
  std::vector<double> w;
  for (int i = 0; i <= 50; ++i) w.push_back(0.02 * i);
  for (int n : {1, -1, 2}) {
    auto c = xi_continuation(ModeParams{0, 0.5, 0.0, 0}, w, p, spec, n, 1);
    CHECK(c.max_jump_over_half_gap < 1.0);
    CHECK(c.max_second_difference < 10.0);
    bool inc = true, dec = true;
    for (size_t i = 1; i < c.xi.size(); ++i) {
      inc = inc && c.xi[i] >= c.xi[i - 1];
      dec = dec && c.xi[i] <= c.xi[i - 1];
    }
    CHECK((inc || dec));
    std::vector<double> rw(w.rbegin(), w.rend());
    auto start = angular_eigenpairs(ModeParams{w.back(), 0.5, 0.0, 0}, p, spec, 8);
    int n_end = 0;
    for (auto& e : start)
      if (std::abs(e.xi - c.xi.back()) < 1e-12) n_end = e.n;
    REQUIRE(n_end != 0);
    auto r = xi_continuation(ModeParams{0, 0.5, 0.0, 0}, rw, p, spec, n_end, 1);
    for (size_t i = 0; i < w.size(); ++i) CHECK(std::abs(r.xi[w.size() - 1 - i] - c.xi[i]) < 1e-8);
    auto par = xi_continuation(ModeParams{0, 0.5, 0.0, 0}, w, p, spec, n, 4);
    CHECK(par.xi == c.xi);
  }
  // a coarse sweep violates the gap assumption
  CHECK_THROWS_AS(xi_continuation(ModeParams{0, 0.5, 0.0, 0}, {0.0, 12.0}, SpacetimeParams{1.0, 0.9, 0.1}, spec, 3),
                  NumericalError);
  CHECK_THROWS_AS(xi_continuation(ModeParams{0, 0.5, 0.0, 0}, {}, p, spec, 1), DomainError);
}
