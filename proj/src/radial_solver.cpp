#include "kndirac/radial_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>

#include "kndirac/tortoise_inverter.hpp"

namespace kn {

WRoots w_roots(double omega, double m) {
  if (omega == 0.0 && m == 0.0) throw DomainError("w_roots: (omega, m) = (0, 0)");
  double d = omega * omega - m * m;
  WRoots w{};
  if (d > 0.0)
    w.w1 = std::sqrt(d);
  else if (d < 0.0)
    w.w1 = cplx(0.0, std::sqrt(-d));
  else
    w.threshold = true;
  w.w2 = -w.w1;
  return w;
}

BoostParam theta_boost(double omega, double m) {
  if (omega == m || omega == -m) throw DomainError("theta_boost: omega = +-m, log singular");
  double ratio = (omega - m) / (omega + m);
  BoostParam b;
  b.complex_log = ratio < 0.0;
  b.Theta = 0.25 * std::log(cplx(ratio, 0.0));
  cplx ch = std::cosh(b.Theta), sh = std::sinh(b.Theta);
  b.matrix << ch, sh, sh, ch;
  return b;
}

namespace {

WRoots nondegenerate_roots(const ModeParams& mode) {
  auto w = w_roots(mode.omega, mode.mass);
  if (w.threshold) throw DomainError("omega^2 = m^2: asymptotic phases undefined");
  return w;
}

}  // namespace

Phases asymptotic_phases(double u, const ModeParams& mode, const SpacetimeParams& p, bool with_log) {
  if (!(u > 0.0)) throw DomainError("asymptotic phases need u > 0");
  auto w = nondegenerate_roots(mode);
  double m2 = mode.mass * mode.mass, lu = with_log ? std::log(u) : 0.0;
  return {w.w1 * u + p.M * (2.0 * mode.omega + m2 / w.w1) * lu,
          w.w2 * u + p.M * (2.0 * mode.omega + m2 / w.w2) * lu};
}

Phases asymptotic_phase_derivatives(double u, const ModeParams& mode, const SpacetimeParams& p) {
  if (!(u > 0.0)) throw DomainError("asymptotic phases need u > 0");
  auto w = nondegenerate_roots(mode);
  double m2 = mode.mass * mode.mass;
  return {w.w1 + p.M * (2.0 * mode.omega + m2 / w.w1) / u, w.w2 + p.M * (2.0 * mode.omega + m2 / w.w2) / u};
}

EigenExpansion eigen_expansion(const ModeParams& mode, const SpacetimeParams& p) {
  auto w = nondegenerate_roots(mode);
  double m2 = mode.mass * mode.mass;
  EigenExpansion e;
  e.c0[0] = I * w.w1;
  e.c0[1] = I * w.w2;
  e.c1[0] = I * p.M * (2.0 * mode.omega + m2 / w.w1);
  e.c1[1] = I * p.M * (2.0 * mode.omega + m2 / w.w2);
  return e;
}

Mat2c u_infinity(const ModeParams& mode) {
  Mat2c U;
  U << I * mode.omega, -I * mode.mass, I * mode.mass, -I * mode.omega;
  return U;
}

namespace {

Vec2c gauge(Vec2c v) {
  v /= v.norm();
  int k = std::abs(v(1)) > std::abs(v(0)) ? 1 : 0;
  return v * (std::conj(v(k)) / std::abs(v(k)));
}

Vec2c eigvec(const Mat2c& U, cplx lam) {
  Vec2c v1(U(0, 1), lam - U(0, 0));
  Vec2c v2(lam - U(1, 1), U(1, 0));
  Vec2c v = v1.norm() >= v2.norm() ? v1 : v2;
  if (v.norm() == 0.0) throw NumericalError("diagonalize: no eigenvector (scalar matrix)");
  return gauge(v);
}

}  // namespace

Diagonalizer diagonalize(const Mat2c& U) {
  cplx half_tr = 0.5 * (U(0, 0) + U(1, 1));
  cplx det = U(0, 0) * U(1, 1) - U(0, 1) * U(1, 0);
  cplx disc = std::sqrt(half_tr * half_tr - det);
  Diagonalizer d;
  d.lambda(0) = half_tr + disc;
  // the product form avoids cancellation in the smaller root
  d.lambda(1) = std::abs(d.lambda(0)) > 0.0 ? det / d.lambda(0) : half_tr - disc;
  d.D.col(0) = eigvec(U, d.lambda(0));
  d.D.col(1) = eigvec(U, d.lambda(1));
  return d;
}

Diagonalizer diagonalize_tracking(const Mat2c& U, const Vec2c& prev) {
  auto d = diagonalize(U);
  double keep = std::abs(d.lambda(0) - prev(0)) + std::abs(d.lambda(1) - prev(1));
  double swap = std::abs(d.lambda(1) - prev(0)) + std::abs(d.lambda(0) - prev(1));
  if (swap < keep) {
    std::swap(d.lambda(0), d.lambda(1));
    d.D.col(0).swap(d.D.col(1));
  }
  return d;
}

namespace {

namespace ode = boost::numeric::odeint;

// e^{G t} for traceless 2x2 G: cosh(q t) + sinh(q t)/q G, q^2 = -det G
struct FramePropagator {
  Mat2c G;
  cplx q;
  // (cosh(q t), sinh(q t)/q)
  std::pair<cplx, cplx> coeffs(double t) const {
    if (q == 0.0) return {1.0, t};
    if (q.real() == 0.0) {
      double w = q.imag();
      return {std::cos(w * t), std::sin(w * t) / w};
    }
    return {std::cosh(q * t), std::sinh(q * t) / q};
  }
  Mat2c operator()(double t) const {
    auto [c, s] = coeffs(t);
    return c * Mat2c::Identity() + s * G;
  }
};

template <size_t N>
struct LinearRhs {
  const std::function<Mat2c(double)>* U;
  const FramePropagator* frame;  // null: plain
  double t0;
  void operator()(const std::array<cplx, N>& x, std::array<cplx, N>& dx, double t) const {
    Mat2c u = (*U)(t);
    cplx tr = u.trace();
    if (frame) {
      auto [c, sq] = frame->coeffs(t - t0);
      Mat2c fwd = c * Mat2c::Identity() + sq * frame->G;
      Mat2c back = c * Mat2c::Identity() - sq * frame->G;
      u = back * (u - frame->G) * fwd;
    }
    dx[0] = u(0, 0) * x[0] + u(0, 1) * x[1];
    dx[1] = u(1, 0) * x[0] + u(1, 1) * x[1];
    if constexpr (N == 5) {
      dx[2] = u(0, 0) * x[2] + u(0, 1) * x[3];
      dx[3] = u(1, 0) * x[2] + u(1, 1) * x[3];
      dx[4] = tr;
    }
  }
};

constexpr long max_steps = 200'000'000;

template <size_t N>
LinearSolution run_linear(const std::function<Mat2c(double)>& U, const std::vector<double>& samples,
                          const Mat2c& Y0, double tol, double max_step, const FramePropagator* frame) {
  using State = std::array<cplx, N>;
  State x{};
  x[0] = Y0(0, 0);
  x[1] = Y0(1, 0);
  if constexpr (N == 5) {
    x[2] = Y0(0, 1);
    x[3] = Y0(1, 1);
  }
  double t0 = samples[0];
  LinearSolution out;
  out.stats.tol = tol;
  out.stats.abs_tol = 1e-2 * tol;
  auto record = [&](double t) {
    Mat2c y = Mat2c::Zero();
    y(0, 0) = x[0];
    y(1, 0) = x[1];
    cplx s = 0.0;
    if constexpr (N == 5) {
      y(0, 1) = x[2];
      y(1, 1) = x[3];
      s = x[4];
    }
    if (frame) y = (*frame)(t - t0) * y;
    out.t.push_back(t);
    out.Y.push_back(y);
    out.S.push_back(s);
  };
  LinearRhs<N> rhs{&U, frame, t0};
  auto stepper = ode::make_controlled(out.stats.abs_tol, tol, ode::runge_kutta_fehlberg78<State>());
  double t = samples[0];
  double dir = samples.back() > samples.front() ? 1.0 : -1.0;
  double dt = dir * std::min(0.1, std::abs(samples[1] - samples[0]));
  record(t);
  for (size_t i = 1; i < samples.size(); ++i) {
    double ts = samples[i];
    while (dir * (ts - t) > 0.0) {
      if (max_step > 0.0 && std::abs(dt) > max_step) dt = dir * max_step;
      bool clipped = dir * (t + dt - ts) >= 0.0;
      double step = clipped ? ts - t : dt;
      auto res = stepper.try_step(rhs, x, t, step);
      if (res == ode::success) {
        ++out.stats.steps;
        if (clipped) {
          t = ts;
          if (std::abs(step) > std::abs(dt)) dt = step;
        } else {
          dt = step;
        }
      } else {
        ++out.stats.rejected;
        dt = step;
        if (std::abs(dt) < 1e-14 * std::max(1.0, std::abs(t)))
          throw NumericalError("step-size underflow at t = " + std::to_string(t));
      }
      if (out.stats.steps + out.stats.rejected > max_steps) throw NumericalError("integration exceeded the step budget");
    }
    record(t);
  }
  return out;
}

void check_samples(const std::vector<double>& s) {
  if (s.size() < 2) throw DomainError("need at least two samples");
  double dir = s[1] > s[0] ? 1.0 : -1.0;
  for (size_t i = 1; i < s.size(); ++i)
    if (!(dir * (s[i] - s[i - 1]) > 0.0)) throw DomainError("samples must be strictly monotone");
  for (double v : s)
    if (!std::isfinite(v)) throw DomainError("samples must be finite");
}

void check_tol(double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-6)) throw DomainError("tolerance must lie in [1e-13, 1e-6]");
}

}  // namespace

LinearSolution integrate_linear(const std::function<Mat2c(double)>& U, const std::vector<double>& samples,
                                const Mat2c& Y0, int columns, double tol, double max_step,
                                const std::optional<Mat2c>& frame) {
  check_samples(samples);
  check_tol(tol);
  FramePropagator fp;
  if (frame) {
    if (std::abs(frame->trace()) > 0.0) throw DomainError("frame generator must be traceless");
    fp.G = *frame;
    fp.q = std::sqrt(-frame->determinant());
  }
  const FramePropagator* f = frame ? &fp : nullptr;
  if (columns == 1) return run_linear<2>(U, samples, Y0, tol, max_step, f);
  if (columns == 2) return run_linear<5>(U, samples, Y0, tol, max_step, f);
  throw DomainError("columns must be 1 or 2");
}

namespace {

struct FrameChoice {
  std::optional<Mat2c> G;
  double max_step = 0.0;
};

FrameChoice choose_frame(Frame f, const ModeParams& mode, Branch b) {
  double w2 = mode.omega * mode.omega - mode.mass * mode.mass;
  bool applies = b == Branch::exterior && w2 > 0.0;
  if (f == Frame::rotating && !applies)
    throw DomainError("rotating frame needs the exterior branch and omega^2 > m^2");
  if (f == Frame::plain || !applies) return {};
  return {u_infinity(mode), 0.4 / std::sqrt(w2)};
}

std::vector<double> radii(TortoiseInverter& inv, const std::vector<double>& rs) {
  std::vector<double> out;
  for (double u : rs) out.push_back(inv(u).r);
  return out;
}

}  // namespace

RadialTrajectory integrate(const ModeParams& mode, const SpacetimeParams& p, Branch b,
                           const std::vector<double>& rstar_samples, const Vec2c& X0, double tol, Frame frame) {
  validate(mode);
  TortoiseInverter inv(p, b);
  std::function<Mat2c(double)> U = [&](double u) { return radial_potential(inv(u), mode, p); };
  Mat2c Y0 = Mat2c::Zero();
  Y0.col(0) = X0;
  auto fc = choose_frame(frame, mode, b);
  auto sol = integrate_linear(U, rstar_samples, Y0, 1, tol, fc.max_step, fc.G);
  RadialTrajectory tr;
  tr.rstar = sol.t;
  tr.r = radii(inv, sol.t);
  for (auto& y : sol.Y) {
    if (!y.col(0).allFinite()) throw NumericalError("radial solution became non-finite");
    tr.X.push_back(y.col(0));
  }
  tr.mode = mode;
  tr.params = p;
  tr.branch = b;
  tr.stats = sol.stats;
  tr.rotating = fc.G.has_value();
  return tr;
}

RadialTrajectory FundamentalTrajectory::column(int j) const {
  RadialTrajectory tr;
  tr.rstar = rstar;
  tr.r = r;
  for (auto& y : Y) tr.X.push_back(y.col(j));
  tr.mode = mode;
  tr.params = params;
  tr.branch = branch;
  tr.stats = stats;
  tr.rotating = rotating;
  return tr;
}

FundamentalTrajectory integrate_fundamental(const ModeParams& mode, const SpacetimeParams& p, Branch b,
                                            const std::vector<double>& rstar_samples, const Mat2c& Y0,
                                            double tol, Frame frame) {
  validate(mode);
  cplx det0 = Y0.determinant();
  if (std::abs(det0) == 0.0) throw DomainError("fundamental data must be invertible");
  TortoiseInverter inv(p, b);
  std::function<Mat2c(double)> U = [&](double u) { return radial_potential(inv(u), mode, p); };
  auto fc = choose_frame(frame, mode, b);
  auto sol = integrate_linear(U, rstar_samples, Y0, 2, tol, fc.max_step, fc.G);
  FundamentalTrajectory tr;
  tr.rstar = sol.t;
  tr.r = radii(inv, sol.t);
  tr.Y = sol.Y;
  tr.trace_integral = sol.S;
  for (size_t i = 0; i < sol.Y.size(); ++i) {
    if (!sol.Y[i].allFinite()) throw NumericalError("radial solution became non-finite");
    cplx ratio = sol.Y[i].determinant() * std::exp(-sol.S[i]) / det0;
    tr.abel_drift = std::max(tr.abel_drift, std::abs(ratio - 1.0));
  }
  tr.mode = mode;
  tr.params = p;
  tr.branch = b;
  tr.stats = sol.stats;
  tr.rotating = fc.G.has_value();
  return tr;
}

std::vector<double> log_samples(double from, double to, int per_decade) {
  if (!(from > 0.0 && to > 0.0) || from == to || per_decade < 1) throw DomainError("log_samples: bad range");
  double l0 = std::log10(from), l1 = std::log10(to);
  int n = std::max(1, static_cast<int>(std::ceil(std::abs(l1 - l0) * per_decade)));
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(i == 0 ? from : i == n ? to : std::pow(10.0, l0 + (l1 - l0) * i / n));
  return out;
}

std::vector<double> linear_samples(double from, double to, double step) {
  if (!(step > 0.0) || from == to) throw DomainError("linear_samples: bad range");
  int n = static_cast<int>(std::ceil(std::abs(to - from) / step - 1e-9));
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(i == n ? to : from + (to > from ? 1.0 : -1.0) * step * i);
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y, bool log_x) {
  if (x.size() != y.size() || x.size() < 2) throw NumericalError("slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double a = log_x ? std::log(x[i]) : x[i], b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

// least squares of g(u) ~ a + b/u, returns a
Vec2c limit_fit(const std::vector<double>& u, const std::vector<Vec2c>& g) {
  Eigen::MatrixXd A(u.size(), 2);
  Eigen::MatrixXcd rhs(u.size(), 2);
  for (size_t i = 0; i < u.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = 1.0 / u[i];
    rhs.row(i) = g[i].transpose();
  }
  Eigen::MatrixXcd sol = A.cast<cplx>().colPivHouseholderQr().solve(rhs);
  return sol.row(0).transpose();
}

Diagonalizer seeded_diagonalizer(const Mat2c& U, const EigenExpansion& e, double u) {
  return diagonalize_tracking(U, Vec2c(e.at(0, u), e.at(1, u)));
}

}  // namespace

Vec2c asymptotic_data(double u, const ModeParams& mode, const SpacetimeParams& p, const Vec2c& f) {
  auto e = eigen_expansion(mode, p);
  auto d = seeded_diagonalizer(radial_potential(u, Branch::exterior, mode, p), e, u);
  auto ph = asymptotic_phases(u, mode, p);
  return d.D * Vec2c(std::exp(I * ph.plus) * f(0), std::exp(I * ph.minus) * f(1));
}

InfinityFit fit_infinity(const RadialTrajectory& traj, const InfinityFitOptions& opt) {
  if (traj.branch != Branch::exterior) throw DomainError("fit_infinity needs an exterior trajectory");
  if (traj.X.size() < 4) throw DomainError("fit_infinity: trajectory too short");
  const auto& mode = traj.mode;
  const auto& p = traj.params;
  InfinityFit fit;
  fit.w = nondegenerate_roots(mode);
  if (std::abs(mode.omega) == mode.mass) throw DomainError("fit_infinity: |omega| = m");
  fit.boost = theta_boost(mode.omega, mode.mass);

  std::vector<size_t> order(traj.X.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return traj.rstar[a] > traj.rstar[b]; });
  double u_top = traj.rstar[order.front()];
  if (u_top < 1e4) throw DomainError("fit_infinity: trajectory must reach r* >= 1e4");
  if (traj.X[order.front()].norm() < 1e-14) throw DomainError("fit_infinity: trivial solution");

  auto e = eigen_expansion(mode, p);
  TortoiseInverter inv(p, Branch::exterior);
  Vec2c prev(e.at(0, u_top), e.at(1, u_top));
  std::vector<double> u;
  std::vector<Vec2c> f, fa;
  std::vector<Mat2c> Ds;
  for (size_t i : order) {
    double uu = traj.rstar[i];
    if (!(uu > 0.0)) break;
    auto d = diagonalize_tracking(radial_potential(inv(uu), mode, p), prev);
    prev = d.lambda;
    Vec2c g = d.D.lu().solve(traj.X[i]);
    auto ph = asymptotic_phases(uu, mode, p, true);
    auto pa = asymptotic_phases(uu, mode, p, false);
    u.push_back(uu);
    f.push_back(Vec2c(std::exp(-I * ph.plus) * g(0), std::exp(-I * ph.minus) * g(1)));
    fa.push_back(Vec2c(std::exp(-I * pa.plus) * g(0), std::exp(-I * pa.minus) * g(1)));
  }
  fit.f = f;

  double lim_lo = u_top * std::pow(10.0, -opt.limit_decades);
  std::vector<double> ut;
  std::vector<Vec2c> ft, fat;
  for (size_t j = 0; j < u.size(); ++j)
    if (u[j] >= lim_lo) {
      ut.push_back(u[j]);
      ft.push_back(f[j]);
      fat.push_back(fa[j]);
    }
  if (ut.size() < 3) throw DomainError("fit_infinity: too few samples in the top decade");
  fit.f_inf = limit_fit(ut, ft);
  fit.f_inf_ablated = limit_fit(ut, fat);
  double fmin = 1e300, fmax = 0, fsum = 0;
  for (auto& v : ft) {
    fmin = std::min(fmin, v.norm());
    fmax = std::max(fmax, v.norm());
    fsum += v.norm();
  }
  fit.f_tail_variation = (fmax - fmin) / (fsum / ft.size());

  auto dinf = diagonalize_tracking(u_infinity(mode), Vec2c(e.c0[0], e.c0[1]));
  fit.D_inf = dinf.D;
  fit.window_lo = opt.window_lo;
  fit.window_hi = opt.window_hi;
  for (size_t j = u.size(); j-- > 0;) {
    if (u[j] < opt.window_lo || u[j] > opt.window_hi) continue;
    size_t i = order[j];
    auto ph = asymptotic_phases(u[j], mode, p, true);
    auto pa = asymptotic_phases(u[j], mode, p, false);
    Vec2c xa = fit.D_inf * Vec2c(std::exp(I * ph.plus) * fit.f_inf(0), std::exp(I * ph.minus) * fit.f_inf(1));
    Vec2c xb = fit.D_inf *
               Vec2c(std::exp(I * pa.plus) * fit.f_inf_ablated(0), std::exp(I * pa.minus) * fit.f_inf_ablated(1));
    fit.u.push_back(u[j]);
    fit.residual.push_back((traj.X[i] - xa).norm());
    fit.residual_ablated.push_back((traj.X[i] - xb).norm());
    fit.c = std::max(fit.c, u[j] * fit.residual.back());
  }
  if (fit.u.size() < 3) throw DomainError("fit_infinity: too few samples in the slope window");
  fit.slope = fit_slope(fit.u, fit.residual);
  fit.slope_ablated = fit_slope(fit.u, fit.residual_ablated);
  return fit;
}

namespace {

HorizonData cauchy_horizon(const SpacetimeParams& p) {
  auto h = horizons(p);
  if (h.r_minus == 0.0) throw DomainError("no Cauchy horizon for a = Q = 0");
  return h;
}

}  // namespace

double horizon_alpha(const SpacetimeParams& p) {
  auto h = cauchy_horizon(p);
  return 0.5 * (h.r_plus - h.r_minus) / (h.r_minus * h.r_minus + p.a * p.a);
}

double horizon_span_end(const SpacetimeParams& p) {
  auto h = cauchy_horizon(p);
  double alpha = horizon_alpha(p);
  double near = tortoise(h.r_minus + 1e-2 * (h.r_plus - h.r_minus), p);
  return std::max(36.0 / alpha, near + 30.0 / alpha);
}

double horizon_omega_minus(const SpacetimeParams& p) {
  auto h = cauchy_horizon(p);
  return p.a / (h.r_minus * h.r_minus + p.a * p.a);
}

Mat2c horizon_B(const TortoiseRoot& root, double rstar, const ModeParams& mode, const SpacetimeParams& p) {
  if (root.eps != -1) throw DomainError("horizon_B: interior branch only");
  auto h = cauchy_horizon(p);
  double r = root.r, rho2 = r * r + p.a * p.a;
  double Delta = root.Delta();
  double sD = std::exp(0.5 * (root.log_from_minus + root.log_from_plus));
  double Om = p.a / (h.r_minus * h.r_minus + p.a * p.a);
  // Omega_- (r^2 + a^2) - a, factored so it vanishes with r - r_-
  double kterm = p.a * root.from_minus * (r + h.r_minus) / (h.r_minus * h.r_minus + p.a * p.a);
  double phi = 2.0 * (mode.omega + mode.k * Om);
  double w = mode.omega, m = mode.mass, xi = mode.xi;
  cplx pref = I / rho2;
  Mat2c B;
  B(0, 0) = pref * (-w * Delta - 2.0 * mode.k * kterm);
  B(0, 1) = pref * (-sD * (m * r + I * xi)) * std::exp(-I * phi * rstar);
  B(1, 0) = pref * (-sD * (m * r - I * xi)) * std::exp(I * phi * rstar);
  B(1, 1) = pref * (-w * Delta);
  return B;
}

Mat2c horizon_B(double rstar, const ModeParams& mode, const SpacetimeParams& p) {
  cauchy_horizon(p);
  return horizon_B(invert_tortoise(rstar, Branch::interior, p), rstar, mode, p);
}

HorizonFit fit_horizon(const RadialTrajectory& traj) {
  if (traj.branch != Branch::interior) throw DomainError("fit_horizon needs an interior trajectory");
  if (traj.X.size() < 8) throw DomainError("fit_horizon: trajectory too short");
  const auto& p = traj.params;
  const auto& mode = traj.mode;
  HorizonFit fit;
  fit.alpha = horizon_alpha(p);
  fit.omega_minus = horizon_omega_minus(p);
  fit.phase_rate = 2.0 * (mode.omega + mode.k * fit.omega_minus);

  std::vector<size_t> order(traj.X.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return traj.rstar[a] < traj.rstar[b]; });
  std::vector<double> u;
  std::vector<Vec2c> h;
  for (size_t i : order) {
    u.push_back(traj.rstar[i]);
    h.push_back(Vec2c(traj.X[i](0) * std::exp(-I * fit.phase_rate * traj.rstar[i]), traj.X[i](1)));
  }
  fit.h = h.back();
  double hn = fit.h.norm();
  if (hn < 1e-14) throw DomainError("fit_horizon: trivial solution");

  std::vector<double> wu, we;
  for (size_t j = 0; j + 1 < u.size(); ++j) {
    double err = (h[j] - fit.h).norm();
    fit.u.push_back(u[j]);
    fit.error.push_back(err);
    if (err > 1e-9 * hn && err < 1e-2 * hn) {
      wu.push_back(u[j]);
      we.push_back(err);
    }
  }
  if (wu.size() < 5) throw NumericalError("fit_horizon: fewer than 5 samples in the decay window");
  fit.window_lo = wu.front();
  fit.window_hi = wu.back();
  fit.rate = -fit_slope(wu, we, false);

  // successive differences h(u) - h(u + shift)
  fit.cauchy_shift = std::min(10.0, (u.back() - u.front()) / 3.0);
  std::vector<double> cu, cd;
  for (size_t j = 0; j < u.size(); ++j) {
    double target = u[j] + fit.cauchy_shift;
    auto it = std::lower_bound(u.begin(), u.end(), target);
    if (it == u.end()) break;
    size_t k = static_cast<size_t>(it - u.begin());
    if (k > 0 && target - u[k - 1] < u[k] - target) --k;
    double spacing = k + 1 < u.size() ? u[k + 1] - u[k] : u[k] - u[k - 1];
    if (std::abs(u[k] - target) > 0.5 * spacing + 1e-12) continue;
    double d = (h[j] - h[k]).norm();
    if (d > 1e-9 * hn && d < 1e-2 * hn) {
      cu.push_back(u[j]);
      cd.push_back(d);
    }
  }
  if (cu.size() >= 3) {
    fit.cauchy_rate = -fit_slope(cu, cd, false);
    fit.cauchy_ok = std::abs(fit.cauchy_rate - fit.alpha) < 0.1 * fit.alpha;
  }
  return fit;
}

GrowthCheck evanescent_growth(const ModeParams& mode, const SpacetimeParams& p, double u0, double tol) {
  if (!(mode.mass > std::abs(mode.omega))) throw DomainError("evanescent_growth needs m > |omega|");
  GrowthCheck g;
  g.kappa = std::sqrt(mode.mass * mode.mass - mode.omega * mode.omega);
  g.window = 20.0 / g.kappa;
  double u1 = u0 + g.window;
  auto e = eigen_expansion(mode, p);
  // branch 0 has lambda ~ -kappa (decays outward), branch 1 grows
  auto d0 = seeded_diagonalizer(radial_potential(u0, Branch::exterior, mode, p), e, u0);
  auto d1 = seeded_diagonalizer(radial_potential(u1, Branch::exterior, mode, p), e, u1);
  auto grow = integrate(mode, p, Branch::exterior, linear_samples(u0, u1, g.window / 20), d0.D.col(1), tol);
  auto decay = integrate(mode, p, Branch::exterior, linear_samples(u1, u0, g.window / 20), d1.D.col(0), tol);
  double expect = std::exp(g.kappa * g.window);
  g.growth_ratio = grow.X.back().norm() / grow.X.front().norm() / expect;
  g.decay_ratio = decay.X.front().norm() / decay.X.back().norm() * expect;
  return g;
}

}  // namespace kn
