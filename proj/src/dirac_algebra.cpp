#include "kndirac/dirac_algebra.hpp"

#include <algorithm>
#include <cmath>

#include "kndirac/detail/ef_frame.hpp"

namespace kn {

namespace {

constexpr double eta[4] = {1.0, -1.0, -1.0, -1.0};

GammaSet build_gammas() {
  Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd sx, sy, sz;
  sx << 0.0, 1.0, 1.0, 0.0;
  sy << 0.0, -I, I, 0.0;
  sz << 1.0, 0.0, 0.0, -1.0;
  auto block = [](const Eigen::Matrix2cd& ur, const Eigen::Matrix2cd& ll) {
    Mat4c m = Mat4c::Zero();
    m.topRightCorner<2, 2>() = ur;
    m.bottomLeftCorner<2, 2>() = ll;
    return m;
  };
  GammaSet gs;
  gs.g[0] = block(id, id);
  gs.g[1] = block(sx, -sx);
  gs.g[2] = block(sy, -sy);
  gs.g[3] = block(sz, -sz);
  gs.g5 = I * gs.g[0] * gs.g[1] * gs.g[2] * gs.g[3];
  return gs;
}

int perm_sign(const std::array<int, 4>& p) {
  int s = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

Mat4c mat(const DiracStencil& st, int mu) { return mu < 4 ? st.A[mu] : st.A0; }

// one operator entry: coefficients of (d_tau, d_r, d_theta, d_phi, 1)
using Entry = std::array<cplx, 5>;

void put(DiracStencil& st, int i, int j, const Entry& e) {
  for (int mu = 0; mu < 4; ++mu) st.A[mu](i, j) = e[mu];
  st.A0(i, j) = e[4];
}

Entry scaled(cplx f, Entry e) {
  for (auto& v : e) v *= f;
  return e;
}

DiracStencil empty_stencil(const BLPoint& x, const SpacetimeParams& p) {
  DiracStencil st;
  for (auto& a : st.A) a.setZero();
  st.A0.setZero();
  st.x = x;
  st.p = p;
  return st;
}

}  // namespace

const GammaSet& gamma_weyl() {
  static const GammaSet gs = build_gammas();
  return gs;
}

std::array<Mat4c, 4> general_dirac_matrices(const OrthonormalTetrad& u) {
  if (u.variance != Variance::vectors) throw DomainError("general_dirac_matrices: needs tetrad vectors");
  const auto& gs = gamma_weyl();
  std::array<Mat4c, 4> G;
  for (int mu = 0; mu < 4; ++mu) {
    G[mu].setZero();
    for (int a = 0; a < 4; ++a) G[mu] += u.u[a](mu) * gs.g[a];
  }
  return G;
}

double clifford_residual(const std::array<Mat4c, 4>& G, const MetricComponents& g) {
  Mat4 ginv = g.g.inverse();
  double worst = 0.0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu; nu < 4; ++nu) {
      Mat4c ac = 0.5 * (G[mu] * G[nu] + G[nu] * G[mu]);
      ac -= ginv(mu, nu) * Mat4c::Identity();
      worst = std::max(worst, max_abs(ac));
    }
  return worst;
}

Mat4c chirality_from(const std::array<Mat4c, 4>& G, double sqrt_abs_g) {
  std::array<int, 4> p = {0, 1, 2, 3};
  Mat4c sum = Mat4c::Zero();
  do {
    sum += double(perm_sign(p)) * G[p[0]] * G[p[1]] * G[p[2]] * G[p[3]];
  } while (std::next_permutation(p.begin(), p.end()));
  return I * sqrt_abs_g / 24.0 * sum;
}

Mat4c b_term_closed(const BLPoint& x, const SpacetimeParams& p) {
  const auto& gs = gamma_weyl();
  const auto& g = gs.g;
  auto h = horizons(p);
  if (!(x.r > h.r_minus)) throw DomainError("b_term_closed: need r > r_-");
  auto [Delta, Sigma] = delta_sigma(x, p);
  double rp = h.r_plus, rp2 = rp * rp;
  double s = std::sin(x.theta), c = std::cos(x.theta), cot = c / s;
  double sq = std::sqrt(Sigma), s32 = Sigma * sq;
  double r = x.r, a = p.a;
  Mat4c B = I * (r - p.M) / (2 * sq * rp) * (g[0] + g[3]);
  B += I * cot / (2 * sq) * g[1];
  B -= I * a * a * c * s / (2 * s32) * g[1];
  B += I * r / (4 * s32 * rp) * ((Delta - rp2) * g[0] + (Delta + rp2) * g[3]);
  B += a * (Delta - rp2) * c / (4 * s32 * rp) * g[0] * gs.g5;
  B += a * (Delta + rp2) * c / (4 * s32 * rp) * g[3] * gs.g5;
  B += r * a * s / (2 * s32) * g[1] * gs.g5;
  return B;
}

Mat4c b_term_numeric(const BLPoint& x, const SpacetimeParams& p, double h) {
  auto hz = horizons(p);
  if (!(x.r - h > hz.r_minus)) throw DomainError("b_term_numeric: r - h must stay above r_-");
  if (!(x.theta - h > 0.0 && x.theta + h < M_PI)) throw DomainError("b_term_numeric: theta +- h leaves (0, pi)");
  // extended precision keeps rounding well below the O(h^2) truncation down to h ~ 1e-5
  using T = long double;
  const auto& gs = gamma_weyl();
  const T r0 = x.r, t0 = x.theta, H = h, M = p.M, a = p.a, Q = p.Q;
  auto sqg = [&](T r, T th) { return (r * r + a * a * std::cos(th) * std::cos(th)) * std::sin(th); };
  auto frame = [&](T r, T th) { return detail::ef_frame<T>(r, th, M, a, Q); };
  const auto at = frame(r0, t0);
  const decltype(at) sh[2][2] = {{frame(r0 + H, t0), frame(r0 - H, t0)}, {frame(r0, t0 + H), frame(r0, t0 - H)}};
  const T g0 = sqg(r0, t0);

  // divergence term
  Mat4c T1 = Mat4c::Zero();
  for (int a_ = 0; a_ < 4; ++a_) {
    T div = (sqg(r0 + H, t0) * sh[0][0].vec[a_][idx::r] - sqg(r0 - H, t0) * sh[0][1].vec[a_][idx::r]) / (2 * H);
    div += (sqg(r0, t0 + H) * sh[1][0].vec[a_][idx::th] - sqg(r0, t0 - H) * sh[1][1].vec[a_][idx::th]) / (2 * H);
    T1 += I * double(div / (2 * g0)) * gs.g[a_];
  }

  // Levi-Civita term; only r and theta derivatives survive
  T du[4][4][4] = {};  // du[mu][a][beta] = d_mu u_(a) beta
  const int dir_index[2] = {idx::r, idx::th};
  for (int d = 0; d < 2; ++d)
    for (int a_ = 0; a_ < 4; ++a_)
      for (int b = 0; b < 4; ++b)
        du[dir_index[d]][a_][b] = (sh[d][0].form[a_][b] - sh[d][1].form[a_][b]) / (2 * H);
  const auto& f = at.form;
  T coef_dl[4] = {};  // coefficient multiplying u_(c) delta gamma^(c) gamma5
  std::array<int, 4> perm = {0, 1, 2, 3};
  do {
    int mu = perm[0], al = perm[1], be = perm[2], dl = perm[3];
    if (mu != idx::r && mu != idx::th) continue;
    T coef = 0;
    for (int a_ = 0; a_ < 4; ++a_) coef += eta[a_] * f[a_][al] * du[mu][a_][be];
    coef_dl[dl] += -T(0.25) * perm_sign(perm) / g0 * coef;
  } while (std::next_permutation(perm.begin(), perm.end()));
  Mat4c T2 = Mat4c::Zero();
  for (int c = 0; c < 4; ++c) {
    T w = 0;
    for (int dl = 0; dl < 4; ++dl) w += coef_dl[dl] * f[c][dl];
    T2 += double(w) * gs.g[c] * gs.g5;
  }
  return T1 + T2;
}

DiracStencil dirac_stencil(const BLPoint& x, const SpacetimeParams& p, double mass) {
  auto u = orthonormal_u_ef(x, p);
  auto G = general_dirac_matrices(u.vectors);
  DiracStencil st = empty_stencil(x, p);
  for (int mu = 0; mu < 4; ++mu) st.A[mu] = I * G[mu];
  st.A0 = b_term_closed(x, p) - mass * Mat4c::Identity();
  return st;
}

DiracStencil alpha_beta_stencil(const BLPoint& x, const SpacetimeParams& p) {
  auto h = horizons(p);
  if (!(x.r > h.r_minus)) throw DomainError("alpha_beta_stencil: need r > r_-");
  auto [Delta, Sigma] = delta_sigma(x, p);
  double rp = h.r_plus;
  double r = x.r, a = p.a;
  double s = std::sin(x.theta), c = std::cos(x.theta), cot = c / s, csc = 1.0 / s;
  double sq = std::sqrt(Sigma), s32 = Sigma * sq;
  double rho2 = r * r + a * a;
  cplx dl(r, a * c), dlb(r, -a * c);

  Entry al1 = {-I * (2 * rho2 - Delta) / (sq * rp), -I * Delta / (sq * rp), 0.0, -2.0 * I * a / (sq * rp),
               -I * (r - p.M) / (sq * rp) - I * Delta * dlb / (2 * s32 * rp)};
  Entry al1b = al1;
  al1b[4] = -I * (r - p.M) / (sq * rp) - I * Delta * dl / (2 * s32 * rp);
  Entry al0 = {-I * rp / sq, I * rp / sq, 0.0, 0.0, I * rp * dlb / (2 * s32)};
  Entry al0b = al0;
  al0b[4] = I * rp * dl / (2 * s32);
  // beta_-+ share the theta part and differ in the sign of the tau/phi part
  Entry bm = {-a * s / sq, 0.0, -I / sq, -csc / sq, -(I * cot / 2.0 + a * s * dlb / (2 * Sigma)) / sq};
  Entry bp = bm;
  bp[0] = -bm[0];
  bp[3] = -bm[3];
  Entry bmb = {-a * s / sq, 0.0, I / sq, -csc / sq, (I * cot / 2.0 - a * s * dl / (2 * Sigma)) / sq};
  Entry bpb = bmb;
  bpb[0] = -bmb[0];
  bpb[3] = -bmb[3];

  DiracStencil st = empty_stencil(x, p);
  put(st, 0, 2, al1);
  put(st, 0, 3, bm);
  put(st, 1, 2, bp);
  put(st, 1, 3, al0);
  put(st, 2, 0, al0b);
  put(st, 2, 1, bpb);
  put(st, 3, 0, bmb);
  put(st, 3, 1, al1b);
  return st;
}

DtransformData d_transform(const BLPoint& x, const SpacetimeParams& p) {
  auto [Delta, Sigma] = delta_sigma(x, p);
  (void)Sigma;
  int eps = eps_delta(Delta);
  double aD = std::abs(Delta);
  double s = std::sin(x.theta), c = std::cos(x.theta);
  cplx dl(x.r, p.a * c), dlb(x.r, -p.a * c);
  cplx ddl_th = -I * p.a * s, ddlb_th = I * p.a * s;
  double daD_r = eps * 2.0 * (x.r - p.M);
  cplx sdl = std::sqrt(dl), sdlb = std::sqrt(dlb);
  double saD = std::sqrt(aD);

  DtransformData d;
  d.D << sdlb, sdlb * saD, sdl * saD, sdl;
  d.Gam << -I * dl, I * dl, I * dlb, -I * dlb;
  // d(f^-1/2) = -f^-3/2 df / 2
  auto dinv = [](cplx f, cplx df) { return -0.5 * df / (f * std::sqrt(f)); };
  cplx idl_r = dinv(dl, 1.0), idlb_r = dinv(dlb, 1.0);
  cplx idl_th = dinv(dl, ddl_th), idlb_th = dinv(dlb, ddlb_th);
  double iaD = 1.0 / saD, iaD_r = -0.5 * daD_r / (aD * saD);
  d.dDinv_r << idlb_r, idlb_r * iaD + iaD_r / sdlb, idl_r * iaD + iaD_r / sdl, idl_r;
  d.dDinv_th << idlb_th, idlb_th * iaD, idl_th * iaD, idl_th;
  return d;
}

DiracStencil transform_stencil(const DiracStencil& st) {
  auto d = d_transform(st.x, st.p);
  Vec4c Dinv = d.D.cwiseInverse();
  Mat4c left = (d.Gam.cwiseProduct(d.D)).asDiagonal();
  DiracStencil out = st;
  for (int mu = 0; mu < 4; ++mu) out.A[mu] = left * st.A[mu] * Dinv.asDiagonal();
  out.A0 = left * (st.A0 * Dinv.asDiagonal() + st.A[idx::r] * d.dDinv_r.asDiagonal() +
                   st.A[idx::th] * d.dDinv_th.asDiagonal());
  return out;
}

DiracStencil transformed_closed(const BLPoint& x, const SpacetimeParams& p, double mass) {
  auto h = horizons(p);
  auto [Delta, Sigma] = delta_sigma(x, p);
  (void)Sigma;
  if (Delta == 0.0) throw DomainError("transformed_closed: singular on a horizon");
  double rp = h.r_plus;
  double r = x.r, a = p.a;
  double s = std::sin(x.theta), c = std::cos(x.theta);
  double rho2 = r * r + a * a;
  double sD = std::sqrt(std::abs(Delta));
  cplx dl(r, a * c), dlb(r, -a * c);

  Entry D1 = {(2 * rho2 - Delta) / rp, Delta / rp, 0.0, 2 * a / rp, 0.0};
  Entry D0 = {-rp, rp, 0.0, 0.0, 0.0};
  Entry Lp = {-I * a * s, 0.0, 1.0, -I / s, 0.5 * c / s};
  Entry Lm = {I * a * s, 0.0, 1.0, I / s, 0.5 * c / s};
  auto diag = [](cplx v) { return Entry{0.0, 0.0, 0.0, 0.0, v}; };

  DiracStencil st = empty_stencil(x, p);
  put(st, 0, 0, diag(I * dl * mass));
  put(st, 0, 2, scaled(1.0 / sD, D1));
  put(st, 0, 3, Lp);
  put(st, 1, 1, diag(-I * dl * mass));
  put(st, 1, 2, scaled(-1.0, Lm));
  put(st, 1, 3, scaled(sD, D0));
  put(st, 2, 0, scaled(sD, D0));
  put(st, 2, 1, Lp);
  put(st, 2, 2, diag(-I * dlb * mass));
  put(st, 3, 0, scaled(-1.0, Lm));
  put(st, 3, 1, scaled(1.0 / sD, D1));
  put(st, 3, 3, diag(I * dlb * mass));
  return st;
}

ModeOperator mode_evaluate(const DiracStencil& st, double omega, double k) {
  return {st.A[idx::r], st.A[idx::th], st.A0 - I * omega * st.A[idx::t] - I * k * st.A[idx::ph]};
}

double max_abs(const Mat4c& m) { return m.cwiseAbs().maxCoeff(); }

double stencil_distance(const DiracStencil& a, const DiracStencil& b) {
  double w = 0.0;
  for (int mu = 0; mu < 5; ++mu) w = std::max(w, max_abs(mat(a, mu) - mat(b, mu)));
  return w;
}

cplx spin_inner(const Vec4c& psi, const Vec4c& phi) {
  Vec4c swapped;
  swapped << phi(2), phi(3), phi(0), phi(1);
  return psi.dot(swapped);
}

}  // namespace kn
