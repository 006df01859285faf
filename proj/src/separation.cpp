#include "kndirac/separation.hpp"

#include <cmath>

#include "kndirac/tortoise_inverter.hpp"

namespace kn {

void validate(const ModeParams& m) {
  if (!std::isfinite(m.omega) || !std::isfinite(m.k) || !std::isfinite(m.mass) || !std::isfinite(m.xi))
    throw DomainError("mode parameters must be finite");
  double twice = 2.0 * m.k;
  if (twice != std::round(twice) || std::fmod(std::abs(twice), 2.0) != 1.0)
    throw DomainError("k must be a half-integer, got " + std::to_string(m.k));
  if (m.mass < 0.0) throw DomainError("fermion mass must be >= 0");
}

Stencil1D radial_operator(double r, const ModeParams& mode, const SpacetimeParams& p) {
  auto h = horizons(p);
  double Delta = delta_of(r, p);
  if (Delta == 0.0) throw DomainError("radial_operator: singular on a horizon");
  double rp = h.r_plus, a = p.a, w = mode.omega, k = mode.k, m = mode.mass;
  double sD = std::sqrt(std::abs(Delta));
  double rho2 = r * r + a * a;
  // D1 = (Delta/r_+) d_r - (i/r_+)(w(2 rho^2 - Delta) + 2ak), D0 = r_+ d_r + i w r_+
  double D1_d = Delta / rp;
  cplx D1_z = -I * (w * (2 * rho2 - Delta) + 2 * a * k) / rp;
  double D0_d = rp;
  cplx D0_z = I * w * rp;
  Stencil1D s{Mat4c::Zero(), Mat4c::Zero()};
  s.Z(0, 0) = I * m * r;
  s.Z(1, 1) = -I * m * r;
  s.Z(2, 2) = -I * m * r;
  s.Z(3, 3) = I * m * r;
  s.D(0, 2) = s.D(3, 1) = D1_d / sD;
  s.Z(0, 2) = s.Z(3, 1) = D1_z / sD;
  s.D(1, 3) = s.D(2, 0) = sD * D0_d;
  s.Z(1, 3) = s.Z(2, 0) = sD * D0_z;
  return s;
}

Stencil1D angular_operator(double theta, const ModeParams& mode, const SpacetimeParams& p) {
  if (!(theta > 0.0 && theta < M_PI)) throw DomainError("angular_operator: theta must lie in (0, pi)");
  double s = std::sin(theta), c = std::cos(theta);
  double am = p.a * mode.mass;
  double f = p.a * mode.omega * s + mode.k / s;
  double half_cot = 0.5 * c / s;
  Stencil1D st{Mat4c::Zero(), Mat4c::Zero()};
  st.Z(0, 0) = -am * c;
  st.Z(1, 1) = am * c;
  st.Z(2, 2) = -am * c;
  st.Z(3, 3) = am * c;
  // L+ at (0,3) and (2,1); -L- at (1,2) and (3,0)
  st.D(0, 3) = st.D(2, 1) = 1.0;
  st.Z(0, 3) = st.Z(2, 1) = half_cot - f;
  st.D(1, 2) = st.D(3, 0) = -1.0;
  st.Z(1, 2) = st.Z(3, 0) = -(half_cot + f);
  return st;
}

SeparatedSpinor assemble_separated(const RadialSample& X, const AngularSample& Y, double r_plus) {
  cplx x1 = X.X(0), x2 = X.X(1) / r_plus;
  cplx dx1 = X.dX(0), dx2 = X.dX(1) / r_plus;
  SeparatedSpinor s;
  s.Phi << x2 * Y.Y(1), x1 * Y.Y(0), x1 * Y.Y(1), x2 * Y.Y(0);
  s.dPhi_r << dx2 * Y.Y(1), dx1 * Y.Y(0), dx1 * Y.Y(1), dx2 * Y.Y(0);
  s.dPhi_th << x2 * Y.dY(1), x1 * Y.dY(0), x1 * Y.dY(1), x2 * Y.dY(0);
  return s;
}

SeparationResidual separation_residual(const ModeParams& mode, const RadialSample& X, const AngularSample& Y,
                                       const BLPoint& x, const SpacetimeParams& p) {
  auto h = horizons(p);
  auto sp = assemble_separated(X, Y, h.r_plus);
  auto R = radial_operator(x.r, mode, p);
  auto A = angular_operator(x.theta, mode, p);
  Vec4c rad = R.D * sp.dPhi_r + R.Z * sp.Phi - mode.xi * sp.Phi;
  Vec4c ang = A.D * sp.dPhi_th + A.Z * sp.Phi + mode.xi * sp.Phi;
  SeparationResidual out;
  out.radial = rad.norm();
  out.angular = ang.norm();
  out.total = std::max(out.radial, out.angular);
  return out;
}

Mat2c radial_system(double r, const ModeParams& mode, const SpacetimeParams& p) {
  double Delta = delta_of(r, p);
  if (Delta == 0.0) throw DomainError("radial_system: singular on a horizon");
  double a = p.a, w = mode.omega, k = mode.k, m = mode.mass, xi = mode.xi;
  double rho2 = r * r + a * a;
  double sD = std::sqrt(std::abs(Delta));
  int eps = eps_delta(Delta);
  Mat2c U;
  U(0, 0) = I * (w * (2 * rho2 - Delta) + 2 * k * a);
  U(0, 1) = sD * (-I * m * r + xi);
  U(1, 0) = double(eps) * sD * (I * m * r + xi);
  U(1, 1) = -I * Delta * w;
  return U / Delta;
}

Mat2c radial_potential(const TortoiseRoot& root, const ModeParams& mode, const SpacetimeParams& p) {
  double r = root.r, a = p.a, w = mode.omega, k = mode.k, m = mode.mass, xi = mode.xi;
  double rho2 = r * r + a * a;
  // |Delta| from the logs of the offsets, exact even when r rounds onto a horizon
  double half_log = 0.5 * (root.log_from_minus + root.log_from_plus);
  double sD = std::exp(half_log);
  double Delta = root.eps * sD * sD;
  Mat2c U;
  U(0, 0) = I * (w * (2 * rho2 - Delta) + 2 * k * a);
  U(0, 1) = sD * (xi - I * m * r);
  U(1, 0) = double(root.eps) * sD * (xi + I * m * r);
  U(1, 1) = -I * w * Delta;
  return U / rho2;
}

Mat2c radial_potential(double rstar, Branch b, const ModeParams& mode, const SpacetimeParams& p) {
  return radial_potential(invert_tortoise(rstar, b, p), mode, p);
}

Mat2c angular_system(double theta, const ModeParams& mode, const SpacetimeParams& p) {
  if (!(theta > 0.0 && theta < M_PI)) throw DomainError("angular_system: theta must lie in (0, pi)");
  double s = std::sin(theta), c = std::cos(theta);
  double am = p.a * mode.mass;
  double f = p.a * mode.omega * s + mode.k / s;
  double half_cot = 0.5 * c / s;
  // L+ Y1 + (xi - am c) Y2 = 0,  (am c + xi) Y1 - L- Y2 = 0
  Mat2c V;
  V(0, 0) = -(half_cot - f);
  V(0, 1) = -(mode.xi - am * c);
  V(1, 0) = am * c + mode.xi;
  V(1, 1) = -(half_cot + f);
  return V;
}

}  // namespace kn
