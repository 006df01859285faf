#include "kndirac/np_tetrad.hpp"

#include <cmath>

#include "kndirac/detail/ef_frame.hpp"

namespace kn {

namespace {

constexpr double eta[4] = {1.0, -1.0, -1.0, -1.0};

void require_chart(Chart have, Chart want) {
  if (have != want)
    throw DomainError(std::string("chart mismatch: tetrad in ") + to_string(have) + ", metric in " +
                      to_string(want));
}

// contraction matrix for the given variance
Mat4 pairing_matrix(Variance v, const MetricComponents& g) {
  return v == Variance::vectors ? g.g : Mat4(g.g.inverse());
}

Vec4c v4(cplx a, cplx b, cplx c, cplx d) { return Vec4c(a, b, c, d); }

cplx pair(const Vec4c& x, const Mat4& G, const Vec4c& y) {
  return (x.transpose() * G.cast<cplx>() * y)(0, 0);
}

}  // namespace

const char* to_string(Variance v) { return v == Variance::vectors ? "vectors" : "forms"; }
const char* to_string(Chart c) { return c == Chart::BL ? "BL" : "EF"; }

OrthonormalTetrad gram_schmidt_tetrad(const std::array<Vec4, 4>& frame, const MetricComponents& g) {
  const Mat4& G = g.g;
  double scale = G.cwiseAbs().maxCoeff();
  OrthonormalTetrad out;
  out.variance = Variance::vectors;
  out.chart = g.chart;
  double n0 = frame[0].dot(G * frame[0]);
  if (!(n0 > 0.0)) throw DomainError("gram_schmidt_tetrad: first vector is not timelike");
  out.u[0] = frame[0] / std::sqrt(n0);
  for (int i = 1; i < 4; ++i) {
    Vec4 v = frame[i];
    double vn = std::sqrt(std::abs(v.dot(G * v))) + v.norm() * std::sqrt(scale);
    // two passes keep the result orthogonal to rounding level
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < i; ++j) v -= eta[j] * v.dot(G * out.u[j]) * out.u[j];
    double nn = v.dot(G * v);
    if (!(nn < 0.0) || std::sqrt(-nn) <= 1e-12 * vn)
      throw DomainError("gram_schmidt_tetrad: degenerate frame");
    out.u[i] = v / std::sqrt(-nn);
  }
  return out;
}

NullTetrad null_from_orthonormal(const OrthonormalTetrad& u) {
  const double s = 1.0 / std::sqrt(2.0);
  NullTetrad nt;
  Vec4c u0 = u.u[0].cast<cplx>(), u1 = u.u[1].cast<cplx>(), u2 = u.u[2].cast<cplx>(),
        u3 = u.u[3].cast<cplx>();
  nt.l = s * (u0 + u3);
  nt.n = s * (u0 - u3);
  nt.m = s * (u1 + I * u2);
  nt.mbar = nt.m.conjugate();
  nt.variance = u.variance;
  nt.chart = u.chart;
  return nt;
}

OrthonormalTetrad orthonormal_from_null(const NullTetrad& nt) {
  double tol = 1e-12 * std::max({1.0, nt.l.norm(), nt.n.norm()});
  if (nt.l.imag().norm() > tol || nt.n.imag().norm() > tol)
    throw DomainError("orthonormal_from_null: l or n not real");
  const double s = 1.0 / std::sqrt(2.0);
  OrthonormalTetrad u;
  u.u[0] = s * (nt.l + nt.n).real();
  u.u[3] = s * (nt.l - nt.n).real();
  u.u[1] = s * (nt.m + nt.mbar).real();
  u.u[2] = (s * (nt.m - nt.mbar) / I).real();
  u.variance = nt.variance;
  u.chart = nt.chart;
  return u;
}

NullTetrad class3_rotation(const NullTetrad& nt, cplx C) {
  if (C == 0.0) throw DomainError("class3_rotation: C must be nonzero");
  double a = std::abs(C);
  NullTetrad out = nt;
  out.l = C * nt.l;
  out.n = nt.n / C;
  out.m = (C / a) * nt.m;
  out.mbar = (std::conj(C) / a) * nt.mbar;
  return out;
}

NullTetrad symmetric_bl_tetrad(const BLPoint& x, const SpacetimeParams& p) {
  auto [Delta, Sigma] = delta_sigma(x, p);
  int eps = eps_delta(Delta);
  double s = std::sin(x.theta);
  double rho2 = x.r * x.r + p.a * p.a;
  double nl = 1.0 / std::sqrt(2.0 * Sigma * std::abs(Delta));
  double nm = 1.0 / std::sqrt(2.0 * Sigma);
  NullTetrad nt;
  nt.l = nl * v4(rho2, Delta, 0.0, p.a);
  nt.n = double(eps) * nl * v4(rho2, -Delta, 0.0, p.a);
  nt.m = nm * v4(I * p.a * s, 0.0, 1.0, I / s);
  nt.mbar = nt.m.conjugate();
  nt.variance = Variance::vectors;
  nt.chart = Chart::BL;
  return nt;
}

NullTetrad push_forward(const NullTetrad& nt, const Mat4& J, Chart to) {
  if (nt.variance != Variance::vectors) throw DomainError("push_forward: needs vectors");
  Eigen::Matrix4cd Jc = J.cast<cplx>();
  NullTetrad out{Jc * nt.l, Jc * nt.n, Jc * nt.m, Jc * nt.mbar, Variance::vectors, to};
  return out;
}

EFNullTetrad ef_null_tetrad(const BLPoint& x, const SpacetimeParams& p) {
  auto h = horizons(p);
  if (!(x.r > h.r_minus)) throw DomainError("ef_null_tetrad: need r > r_-");
  auto [Delta, Sigma] = delta_sigma(x, p);
  double s = std::sin(x.theta), s2 = s * s;
  double rho2 = x.r * x.r + p.a * p.a;
  double rp = h.r_plus;
  double k = 1.0 / std::sqrt(2.0 * Sigma);
  double a = p.a;

  EFNullTetrad out;
  NullTetrad& v = out.vectors;
  v.l = (k / rp) * v4(2 * rho2 - Delta, Delta, 0.0, 2 * a);
  v.n = (k * rp) * v4(1.0, -1.0, 0.0, 0.0);
  v.m = k * v4(I * a * s, 0.0, 1.0, I / s);
  v.mbar = v.m.conjugate();
  v.variance = Variance::vectors;
  v.chart = Chart::EF;

  NullTetrad& f = out.forms;
  f.l = (k / rp) * v4(Delta, Delta - 2 * Sigma, 0.0, -a * Delta * s2);
  f.n = (k * rp) * v4(1.0, 1.0, 0.0, -a * s2);
  f.m = k * v4(I * a * s, I * a * s, -Sigma, -I * rho2 * s);
  f.mbar = f.m.conjugate();
  f.variance = Variance::forms;
  f.chart = Chart::EF;
  return out;
}

EFOrthonormal orthonormal_u_ef(const BLPoint& x, const SpacetimeParams& p) {
  auto h = horizons(p);
  if (!(x.r > h.r_minus)) throw DomainError("orthonormal_u_ef: need r > r_-");
  auto fr = detail::ef_frame<double>(x.r, x.theta, p.M, p.a, p.Q);
  EFOrthonormal out;
  for (int a = 0; a < 4; ++a) {
    out.vectors.u[a] = Vec4(fr.vec[a].data());
    out.forms.u[a] = Vec4(fr.form[a].data());
  }
  out.vectors.variance = Variance::vectors;
  out.forms.variance = Variance::forms;
  out.vectors.chart = out.forms.chart = Chart::EF;
  return out;
}

NullTetrad lower(const NullTetrad& nt, const MetricComponents& g) {
  if (nt.variance != Variance::vectors) throw DomainError("lower: tetrad already holds forms");
  require_chart(nt.chart, g.chart);
  Eigen::Matrix4cd G = g.g.cast<cplx>();
  return {G * nt.l, G * nt.n, G * nt.m, G * nt.mbar, Variance::forms, nt.chart};
}

OrthonormalTetrad lower(const OrthonormalTetrad& u, const MetricComponents& g) {
  if (u.variance != Variance::vectors) throw DomainError("lower: tetrad already holds forms");
  require_chart(u.chart, g.chart);
  OrthonormalTetrad out;
  for (int i = 0; i < 4; ++i) out.u[i] = g.g * u.u[i];
  out.variance = Variance::forms;
  out.chart = u.chart;
  return out;
}

double np_residual(const NullTetrad& nt, const MetricComponents& g) {
  require_chart(nt.chart, g.chart);
  Mat4 G = pairing_matrix(nt.variance, g);
  const Vec4c* e[4] = {&nt.l, &nt.n, &nt.m, &nt.mbar};
  // target pairings in the order (l, n, m, mbar)
  double target[4][4] = {{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, -1, 0}};
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) worst = std::max(worst, std::abs(pair(*e[i], G, *e[j]) - target[i][j]));
  double conj_dev = (nt.mbar - nt.m.conjugate()).cwiseAbs().maxCoeff();
  return std::max(worst, conj_dev);
}

double dyad_residual(const OrthonormalTetrad& u, const MetricComponents& g) {
  require_chart(u.chart, g.chart);
  Mat4 G = pairing_matrix(u.variance, g);
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double want = i == j ? eta[i] : 0.0;
      worst = std::max(worst, std::abs(u.u[i].dot(G * u.u[j]) - want));
    }
  return worst;
}

}  // namespace kn
