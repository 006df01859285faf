#pragma once

#include <array>
#include <cmath>

namespace kn::detail {

// EF orthonormal frame components at (r, theta), generic in the scalar type so
// the finite-difference spin-connection check can run in extended precision.
// vec[a][mu] = u^mu_(a), form[a][mu] = u_(a) mu, mu in (tau, r, theta, phi)
template <class T>
struct EFFrame {
  std::array<std::array<T, 4>, 4> vec;
  std::array<std::array<T, 4>, 4> form;
};

template <class T>
EFFrame<T> ef_frame(T r, T th, T M, T a, T Q) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  T rp = M + sqrt(M * M - a * a - Q * Q);
  T Delta = r * r - 2 * M * r + a * a + Q * Q;
  T c = cos(th), s = sin(th), s2 = s * s;
  T Sigma = r * r + a * a * c * c;
  T rho2 = r * r + a * a;
  T rp2 = rp * rp;
  T sq = sqrt(Sigma);
  T k = 1 / (2 * sq * rp);
  EFFrame<T> f;
  f.vec[0] = {k * (2 * rho2 - Delta + rp2), k * (Delta - rp2), T(0), k * 2 * a};
  f.vec[1] = {T(0), T(0), 1 / sq, T(0)};
  f.vec[2] = {a * s / sq, T(0), T(0), 1 / (s * sq)};
  f.vec[3] = {k * (2 * rho2 - Delta - rp2), k * (Delta + rp2), T(0), k * 2 * a};
  f.form[0] = {k * (Delta + rp2), k * (Delta - 2 * Sigma + rp2), T(0), -k * a * s2 * (Delta + rp2)};
  f.form[1] = {T(0), T(0), -sq, T(0)};
  f.form[2] = {a * s / sq, a * s / sq, T(0), -rho2 * s / sq};
  f.form[3] = {k * (Delta - rp2), k * (Delta - 2 * Sigma - rp2), T(0), -k * a * s2 * (Delta - rp2)};
  return f;
}

}  // namespace kn::detail
