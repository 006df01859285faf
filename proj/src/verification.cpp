#include "kndirac/verification.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "kndirac/tortoise_inverter.hpp"

namespace kn::verify {

Check below(std::string name, double value, double hi) {
  return {std::move(name), value, -unbounded, hi, value < hi};
}

Check above(std::string name, double value, double lo) {
  return {std::move(name), value, lo, unbounded, value > lo};
}

Check within(std::string name, double value, double lo, double hi) {
  return {std::move(name), value, lo, hi, value >= lo && value <= hi};
}

bool Report::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void Report::add(const Report& other) { checks.insert(checks.end(), other.checks.begin(), other.checks.end()); }

double Sampler::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

int Sampler::integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

SpacetimeParams Sampler::params(double bound) {
  SpacetimeParams p;
  p.M = uniform(0.5, 1.5);
  for (;;) {
    p.a = bound * p.M * uniform(-1.0, 1.0);
    p.Q = bound * p.M * uniform(-1.0, 1.0);
    if (p.a * p.a + p.Q * p.Q < bound * p.M * p.M) return p;
  }
}

BLPoint Sampler::point(const SpacetimeParams& p, bool inside) {
  auto h = horizons(p);
  double th = uniform(0.1, 3.0);
  if (inside && h.r_minus > 0.0) return {h.r_minus + (h.r_plus - h.r_minus) * uniform(0.05, 0.95), th};
  return {h.r_plus + 0.05 + uniform(0.0, 10.0), th};
}

ModeParams Sampler::mode() {
  ModeParams m;
  m.omega = uniform(-2.0, 2.0);
  m.k = integer(-3, 2) + 0.5;
  m.mass = uniform(0.0, 1.0);
  m.xi = uniform(-3.0, 3.0);
  return m;
}

Report clifford(std::uint64_t seed, int points) {
  Sampler s(seed);
  double ef = 0.0, bl = 0.0;
  for (int i = 0; i < points; ++i) {
    auto p = s.params(0.95);
    auto x = s.point(p, i % 2);
    ef = std::max(ef, clifford_residual(general_dirac_matrices(orthonormal_u_ef(x, p).vectors),
                                        metric(x, Chart::EF, p)));
    bl = std::max(bl, clifford_residual(general_dirac_matrices(orthonormal_from_null(symmetric_bl_tetrad(x, p))),
                                        metric(x, Chart::BL, p)));
  }
  return {"clifford", {below("clifford_residual_ef", ef, 1e-9), below("clifford_residual_bl", bl, 1e-9)}};
}

namespace {

double null_distance(const NullTetrad& a, const NullTetrad& b) {
  return std::max({(a.l - b.l).cwiseAbs().maxCoeff(), (a.n - b.n).cwiseAbs().maxCoeff(),
                   (a.m - b.m).cwiseAbs().maxCoeff(), (a.mbar - b.mbar).cwiseAbs().maxCoeff()});
}

}  // namespace

Report tetrad(std::uint64_t seed, int points) {
  Sampler s(seed);
  double np = 0.0, dyad = 0.0, chain = 0.0;
  for (int i = 0; i < points; ++i) {
    auto p = s.params(0.95);
    auto h = horizons(p);
    auto x = s.point(p, i % 2);
    auto g = metric(x, Chart::EF, p);
    auto ef = ef_null_tetrad(x, p);
    np = std::max({np, np_residual(ef.vectors, g), np_residual(ef.forms, g),
                   np_residual(symmetric_bl_tetrad(x, p), metric(x, Chart::BL, p))});
    dyad = std::max(dyad, dyad_residual(orthonormal_u_ef(x, p).vectors, g));
    auto moved = push_forward(symmetric_bl_tetrad(x, p), bl_to_ef_jacobian(x.r, p), Chart::EF);
    auto rotated = class3_rotation(moved, std::sqrt(std::abs(delta_of(x.r, p))) / h.r_plus);
    chain = std::max(chain, null_distance(rotated, ef.vectors) / std::max(1.0, ef.vectors.l.norm()));
  }
  return {"tetrad",
          {below("np_residual", np, 1e-10), below("dyad_residual", dyad, 1e-10),
           below("construction_chain", chain, 1e-10)}};
}

Report spin_connection(std::uint64_t seed, int points, double h) {
  Sampler s(seed);
  double worst = 0.0, order_lo = unbounded, order_hi = -unbounded;
  const double hs[3] = {4e-3, 2e-3, 1e-3};
  for (int i = 0; i < points; ++i) {
    auto p = s.params(0.95);
    auto x = s.point(p, i % 2);
    double scale = std::max(1.0, x.r);
    Mat4c Bc = b_term_closed(x, p);
    worst = std::max(worst, max_abs(b_term_numeric(x, p, h * scale) - Bc));
    double e[3];
    for (int j = 0; j < 3; ++j) e[j] = max_abs(b_term_numeric(x, p, hs[j] * scale) - Bc);
    std::vector<double> hv(hs, hs + 3), ev(e, e + 3);
    double order = fit_slope(hv, ev);
    order_lo = std::min(order_lo, order);
    order_hi = std::max(order_hi, order);
  }
  return {"spin_connection",
          {below("bterm_max_difference", worst, 1e-6), within("fd_order_min", order_lo, 1.7, 2.3),
           within("fd_order_max", order_hi, 1.7, 2.3)}};
}

Report transformed_operator(std::uint64_t seed, int points) {
  Sampler s(seed);
  double closed = 0.0, fd_worst = 0.0;
  for (int i = 0; i < points; ++i) {
    auto p = s.params(0.95);
    auto x = s.point(p, i % 2);
    double m = s.uniform(0.0, 2.0);
    auto st = dirac_stencil(x, p, m);
    auto cl = transformed_closed(x, p, m);
    closed = std::max(closed, stencil_distance(transform_stencil(st), cl));

    auto Dof = [&](double r, double th) {
      double Del = delta_of(r, p);
      cplx dl(r, p.a * std::cos(th)), dlb(r, -p.a * std::cos(th));
      return Vec4c(std::sqrt(dlb), std::sqrt(dlb * std::abs(Del)), std::sqrt(dl * std::abs(Del)), std::sqrt(dl));
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
    fd_worst = std::max(fd_worst, stencil_distance(fd, cl));
  }
  return {"transformed_operator",
          {below("assembly_difference", closed, 1e-10), below("conjugation_fd_difference", fd_worst, 1e-6)}};
}

Report temporal(std::uint64_t seed, int param_sets, int nr, int nth) {
  Sampler s(seed);
  double d1 = unbounded, d2 = unbounded, d3 = unbounded;
  for (int t = 0; t < param_sets; ++t) {
    auto q = s.params(0.95);
    auto h = horizons(q);
    double lo = h.r_minus + 1e-6, hi = 100 * q.M;
    for (int i = 0; i < nr; ++i) {
      double r = lo + (hi - lo) * i / (nr - 1.0);
      for (int j = 0; j < nth; ++j) {
        auto m = temporal_minors({r, M_PI * (j + 0.5) / nth}, q);
        d1 = std::min(d1, m.d1);
        d2 = std::min(d2, m.d2);
        d3 = std::min(d3, m.d3);
      }
    }
  }
  return {"temporal", {above("min_minor_1", d1, 0.0), above("min_minor_2", d2, 0.0), above("min_minor_3", d3, 0.0)}};
}

Report separation(std::uint64_t seed, int modes) {
  Sampler s(seed);
  double stencil = 0.0, residual = 0.0, split = 0.0;
  for (int i = 0; i < modes; ++i) {
    auto p = s.params(0.9);
    auto mode = s.mode();
    auto h = horizons(p);
    bool inside = (i % 3 == 0) && h.r_minus > 0.0;
    BLPoint x{inside ? h.r_minus + (h.r_plus - h.r_minus) * s.uniform(0.3, 0.7) : h.r_plus + s.uniform(0.5, 5.5),
              s.uniform(0.4, 2.7)};
    auto op = mode_evaluate(transform_stencil(dirac_stencil(x, p, mode.mass)), mode.omega, mode.k);
    auto R = radial_operator(x.r, mode, p);
    auto A = angular_operator(x.theta, mode, p);
    stencil = std::max({stencil, max_abs(op.Ar - R.D), max_abs(op.Ath - A.D), max_abs(op.A0 - (R.Z + A.Z))});
    // first-order data of a simultaneous solution through generic values
    RadialSample X;
    X.X = Vec2c(cplx(s.uniform(-1, 1), s.uniform(-1, 1)), cplx(s.uniform(-1, 1), s.uniform(-1, 1)));
    X.dX = radial_system(x.r, mode, p) * X.X;
    AngularSample Y;
    Y.Y = Vec2c(cplx(s.uniform(-1, 1), 0.0), cplx(s.uniform(-1, 1), 0.0));
    Y.dY = angular_system(x.theta, mode, p) * Y.Y;
    auto sp = assemble_separated(X, Y, h.r_plus);
    Vec4c res = op.Ar * sp.dPhi_r + op.Ath * sp.dPhi_th + op.A0 * sp.Phi;
    residual = std::max(residual, res.norm() / std::max(1.0, sp.Phi.norm()));
    split = std::max(split, separation_residual(mode, X, Y, x, p).total);
  }
  return {"separation",
          {below("stencil_vs_separated_operators", stencil, 1e-10), below("end_to_end_residual", residual, 1e-8),
           below("separated_residual", split, 1e-8)}};
}

double gram_deviation(const std::vector<AngularEigenpair>& pairs) {
  if (pairs.empty()) return 0.0;
  auto q = theta_quadrature(3 * pairs.front().N + 61);
  size_t n = pairs.size();
  std::vector<std::vector<Vec2c>> vals(n);
  for (size_t i = 0; i < n; ++i)
    for (double th : q.theta) vals[i].push_back(pairs[i].at(th).Y);
  double worst = 0.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i; j < n; ++j) {
      cplx g = 0.0;
      for (size_t t = 0; t < q.theta.size(); ++t) g += q.weight[t] * vals[i][t].dot(vals[j][t]);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

namespace {

std::vector<double> lowest(std::vector<double> xi, size_t count) {
  std::sort(xi.begin(), xi.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  xi.resize(std::min(count, xi.size()));
  std::sort(xi.begin(), xi.end());
  return xi;
}

}  // namespace

Report angular(std::uint64_t seed, const AngularSuiteOptions& opt) {
  Sampler s(seed);
  double imag = 0.0, gram = 0.0, conv = 0.0, gap = unbounded, reversal = 0.0;
  const size_t tracked = 16;
  for (int i = 0; i < opt.modes; ++i) {
    auto p = s.params(0.9);
    auto mode = s.mode();
    auto sp = angular_spectrum(mode, p, {opt.N});
    auto sp2 = angular_spectrum(mode, p, {2 * opt.N});
    imag = std::max({imag, sp.imag_residual, sp2.imag_residual});
    auto a = lowest(sp.xi, tracked), b = lowest(sp2.xi, tracked);
    for (size_t j = 0; j < tracked; ++j) conv = std::max(conv, std::abs(a[j] - b[j]));
    for (size_t j = 1; j < tracked; ++j) gap = std::min(gap, a[j] - a[j - 1]);
    if (i < 4) gram = std::max(gram, gram_deviation(angular_eigenpairs(mode, p, {opt.N}, 8)));
  }
  // sweep over omega and back
  for (int t = 0; t < 2; ++t) {
    auto p = s.params(0.9);
    ModeParams base = s.mode();
    double w0 = s.uniform(-1.0, 0.0), w1 = w0 + 1.0;
    std::vector<double> w;
    for (int j = 0; j < opt.sweep_points; ++j) w.push_back(w0 + (w1 - w0) * j / (opt.sweep_points - 1.0));
    DiscretizationSpec spec{opt.N / 2};
    int n = t == 0 ? 1 : -2;
    auto fwd = xi_continuation(base, w, p, spec, n);
    ModeParams end = base;
    end.omega = w.back();
    int n_end = 0;
    for (auto& e : angular_eigenpairs(end, p, spec, 12))
      if (std::abs(e.xi - fwd.xi.back()) < 1e-12) n_end = e.n;
    if (n_end == 0) {
      reversal = unbounded;
      continue;
    }
    std::vector<double> rw(w.rbegin(), w.rend());
    auto back = xi_continuation(base, rw, p, spec, n_end);
    for (size_t j = 0; j < w.size(); ++j)
      reversal = std::max(reversal, std::abs(back.xi[w.size() - 1 - j] - fwd.xi[j]));
  }
  return {"angular",
          {below("max_imag_part", imag, 1e-8), below("gram_deviation", gram, 1e-8),
           below("self_convergence_N_2N", conv, 1e-8), above("min_gap", gap, 1e-6),
           below("sweep_reversal", reversal, 1e-8)}};
}

RadialTrajectory combine(const FundamentalTrajectory& ft, const Vec2c& f) {
  RadialTrajectory out;
  out.rstar = ft.rstar;
  out.r = ft.r;
  out.mode = ft.mode;
  out.params = ft.params;
  out.branch = ft.branch;
  out.stats = ft.stats;
  out.rotating = ft.rotating;
  out.X.reserve(ft.Y.size());
  for (const auto& Y : ft.Y) out.X.push_back(Y * f);
  return out;
}

InfinityCheck infinity_check(const ModeParams& mode, const SpacetimeParams& p, const Vec2c& f0,
                             const InfinityCheckOptions& opt) {
  InfinityCheck out;
  out.f0 = f0;
  Mat2c Y0;
  Y0.col(0) = asymptotic_data(opt.u_start, mode, p, Vec2c(1.0, 0.0));
  Y0.col(1) = asymptotic_data(opt.u_start, mode, p, Vec2c(0.0, 1.0));
  out.fundamental = integrate_fundamental(mode, p, Branch::exterior,
                                          log_samples(opt.u_start, opt.u_end, opt.per_decade), Y0, opt.tol);
  out.combined = combine(out.fundamental, f0);
  out.fit = fit_infinity(out.combined, opt.fit);
  out.report = {"infinity",
                {within("slope", out.fit.slope, -1.3, -0.7), above("slope_without_log_phase", out.fit.slope_ablated, -0.3),
                 below("abel_drift", out.fundamental.abel_drift, 10 * opt.tol)}};
  return out;
}

HorizonCheck horizon_check(const ModeParams& mode, const SpacetimeParams& p, const Vec2c& x0, double tol) {
  HorizonCheck out;
  double alpha = horizon_alpha(p);
  TortoiseInverter inv(p, Branch::interior);
  auto samples = linear_samples(inv.rstar_mid(), horizon_span_end(p), 0.02 / alpha);
  Mat2c Y0;
  Y0 << 1.0, 0.0, 0.0, 1.0;
  out.fundamental = integrate_fundamental(mode, p, Branch::interior, samples, Y0, tol);
  out.combined = combine(out.fundamental, x0);
  out.fit = fit_horizon(out.combined);
  out.report = {"horizon",
                {within("rate_over_alpha", out.fit.rate / alpha, 0.9, 1.1),
                 within("cauchy_rate_over_alpha", out.fit.cauchy_rate / alpha, 0.9, 1.1),
                 below("abel_drift", out.fundamental.abel_drift, 10 * tol)}};
  return out;
}

Report integrator_health(std::uint64_t seed, double tol) {
  Sampler s(seed);
  double expo = 0.0, expo_rot = 0.0, super = 0.0;
  for (int t = 0; t < 5; ++t) {
    Mat2c A;
    double w = s.uniform(0.3, 1.0), m = s.uniform(0.0, 0.9 * w);
    A << I * w, -I * m, I * m, -I * w;
    Mat2c B = A;
    B(0, 0) += cplx(s.uniform(-0.05, 0.05), s.uniform(-0.5, 0.5));
    B(0, 1) += cplx(s.uniform(-0.05, 0.05), 0.0);
    Vec2c X0(cplx(s.uniform(-1, 1), s.uniform(-1, 1)), cplx(s.uniform(-1, 1), s.uniform(-1, 1)));
    Mat2c Y0 = Mat2c::Zero();
    Y0.col(0) = X0;
    auto samples = linear_samples(0.0, 60.0, 1.5);
    for (const Mat2c& C : {A, B}) {
      std::function<Mat2c(double)> U = [&](double) { return C; };
      auto sol = integrate_linear(U, samples, Y0, 1, tol);
      for (size_t i = 0; i < samples.size(); ++i) {
        Vec2c ref = (C * samples[i]).exp() * X0;
        expo = std::max(expo, (sol.Y[i].col(0) - ref).norm() / ref.norm());
      }
    }
    std::function<Mat2c(double)> U = [&](double) { return A; };
    auto rot = integrate_linear(U, samples, Y0, 1, tol, 0.4 / w, A);
    for (size_t i = 0; i < samples.size(); ++i) {
      Vec2c ref = (A * samples[i]).exp() * X0;
      expo_rot = std::max(expo_rot, (rot.Y[i].col(0) - ref).norm() / ref.norm());
    }
  }
  for (int t = 0; t < 4; ++t) {
    SpacetimeParams p{1.0, s.uniform(0.2, 0.7), s.uniform(0.1, 0.4)};
    ModeParams mode{s.uniform(0.4, 1.0), s.integer(-2, 1) + 0.5, s.uniform(0.0, 0.3), s.uniform(-2, 2)};
    Vec2c X0(cplx(s.uniform(-1, 1), s.uniform(-1, 1)), cplx(s.uniform(-1, 1), s.uniform(-1, 1)));
    Vec2c X1(cplx(s.uniform(-1, 1), s.uniform(-1, 1)), cplx(s.uniform(-1, 1), s.uniform(-1, 1)));
    cplx c(s.uniform(-2, 2), s.uniform(-2, 2));
    Branch b = t % 2 ? Branch::interior : Branch::exterior;
    std::vector<double> samples;
    if (b == Branch::exterior)
      samples = linear_samples(-20.0, 300.0, 4.0);
    else {
      TortoiseInverter inv(p, b);
      samples = linear_samples(inv.rstar_mid(), 20.0 / horizon_alpha(p), 0.1);
    }
    auto a = integrate(mode, p, b, samples, X0, tol);
    auto bb = integrate(mode, p, b, samples, X1, tol);
    auto sum = integrate(mode, p, b, samples, X0 + c * X1, tol);
    for (size_t i = 0; i < samples.size(); ++i) {
      Vec2c ref = a.X[i] + c * bb.X[i];
      super = std::max(super, (sum.X[i] - ref).norm() / std::max(ref.norm(), a.X[i].norm()));
    }
  }
  return {"integrator",
          {below("exponential_error", expo, 10 * tol), below("exponential_error_rotating", expo_rot, 10 * tol),
           below("superposition_error", super, 10 * tol)}};
}

std::vector<SeededMode> infinity_modes(std::uint64_t seed, int count) {
  Sampler s(seed);
  std::vector<SeededMode> out;
  for (int i = 0; i < count; ++i) {
    SeededMode sm;
    sm.params.M = 1.0;
    do {
      sm.params.a = s.uniform(0.1, 0.8);
      sm.params.Q = s.uniform(0.0, 0.5);
    } while (sm.params.a * sm.params.a + sm.params.Q * sm.params.Q > 0.9);
    double w = s.uniform(0.35, 0.5);
    sm.mode.omega = s.integer(0, 1) ? w : -w;
    sm.mode.mass = s.uniform(0.1, 0.6 * w);
    sm.mode.k = s.integer(-2, 1) + 0.5;
    int n = s.integer(0, 1) ? 1 : -1;
    for (auto& e : angular_eigenpairs(sm.mode, sm.params, {48}, 2))
      if (e.n == n) sm.mode.xi = e.xi;
    sm.vec = Vec2c(1.0, cplx(s.uniform(-1, 1), s.uniform(-1, 1)));
    out.push_back(sm);
  }
  return out;
}

std::vector<SeededMode> horizon_modes(std::uint64_t seed, int count) {
  Sampler s(seed);
  std::vector<SeededMode> out;
  for (int i = 0; i < count; ++i) {
    SeededMode sm;
    sm.params.M = 1.0;
    do {
      sm.params.a = s.uniform(0.2, 0.8);
      sm.params.Q = s.uniform(0.1, 0.6);
    } while (sm.params.a * sm.params.a + sm.params.Q * sm.params.Q > 0.9);
    sm.mode.omega = s.uniform(-1.0, 1.0);
    sm.mode.mass = s.uniform(0.0, 1.0);
    sm.mode.k = s.integer(-2, 1) + 0.5;
    int n = s.integer(0, 1) ? 1 : -1;
    for (auto& e : angular_eigenpairs(sm.mode, sm.params, {48}, 2))
      if (e.n == n) sm.mode.xi = e.xi;
    sm.vec = Vec2c(cplx(s.uniform(-1, 1), s.uniform(-1, 1)), cplx(s.uniform(-1, 1), s.uniform(-1, 1)));
    out.push_back(sm);
  }
  return out;
}

}  // namespace kn::verify
