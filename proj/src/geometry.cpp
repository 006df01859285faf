#include "kndirac/geometry.hpp"

#include <cmath>
#include <limits>

#include "kndirac/tortoise_inverter.hpp"

namespace kn {

void validate(const SpacetimeParams& p) {
  if (!std::isfinite(p.M) || !std::isfinite(p.a) || !std::isfinite(p.Q))
    throw DomainError("spacetime parameters must be finite");
  if (p.M <= 0.0) throw DomainError("mass M must be positive");
  if (p.a * p.a + p.Q * p.Q >= p.M * p.M)
    throw DomainError("need a^2 + Q^2 < M^2 (two distinct horizons)");
}

HorizonData horizons(const SpacetimeParams& p) {
  validate(p);
  double s = std::sqrt(p.M * p.M - p.a * p.a - p.Q * p.Q);
  double rp = p.M + s;
  // r_+ r_- = a^2 + Q^2 avoids cancellation in M - s
  double rm = (p.a * p.a + p.Q * p.Q) / rp;
  return {rp, rm};
}

double delta_of(double r, const SpacetimeParams& p) {
  return r * r - 2.0 * p.M * r + p.a * p.a + p.Q * p.Q;
}

DeltaSigma delta_sigma(const BLPoint& x, const SpacetimeParams& p) {
  double c = std::cos(x.theta);
  return {delta_of(x.r, p), x.r * x.r + p.a * p.a * c * c};
}

int eps_delta(double Delta) {
  if (Delta > 0.0) return 1;
  if (Delta < 0.0) return -1;
  throw DomainError("sign of Delta undefined on a horizon");
}

double tortoise(double r, const SpacetimeParams& p) {
  auto h = horizons(p);
  if (!(r > h.r_minus)) throw DomainError("tortoise: need r > r_-");
  if (r == h.r_plus) throw DomainError("tortoise: singular at r_+");
  double w = h.r_plus - h.r_minus;
  double cp = (h.r_plus * h.r_plus + p.a * p.a) / w;
  double cm = (h.r_minus * h.r_minus + p.a * p.a) / w;
  double out = r + cp * std::log(std::abs(r - h.r_plus));
  if (cm != 0.0) out -= cm * std::log(r - h.r_minus);
  return out;
}

double tortoise_derivative(double r, const SpacetimeParams& p) {
  return (r * r + p.a * p.a) / delta_of(r, p);
}

const char* to_string(Branch b) { return b == Branch::exterior ? "exterior" : "interior"; }

Branch branch_from_string(const std::string& s) {
  if (s == "exterior") return Branch::exterior;
  if (s == "interior") return Branch::interior;
  throw DomainError("branch must be exterior or interior, got '" + s + "'");
}

TortoiseRoot invert_tortoise(double rstar, Branch b, const SpacetimeParams& p) {
  TortoiseInverter inv(p, b);
  return inv(rstar);
}

double tortoise_inverse(double rstar, Branch b, const SpacetimeParams& p) {
  return invert_tortoise(rstar, b, p).r;
}

double azimuthal_shift(double r, const SpacetimeParams& p) {
  auto h = horizons(p);
  if (!(r > h.r_minus)) throw DomainError("azimuthal_shift: need r > r_-");
  if (r == h.r_plus) throw DomainError("azimuthal_shift: singular at r_+");
  if (p.a == 0.0) return 0.0;
  return p.a / (h.r_plus - h.r_minus) * std::log(std::abs((r - h.r_plus) / (r - h.r_minus)));
}

MetricComponents metric(const BLPoint& x, Chart chart, const SpacetimeParams& p) {
  auto [Delta, Sigma] = delta_sigma(x, p);
  double s = std::sin(x.theta);
  double s2 = s * s;
  double P = p.Q * p.Q - 2.0 * p.M * x.r;
  double q = P / Sigma;
  Mat4 g = Mat4::Zero();
  using namespace idx;
  if (chart == Chart::BL) {
    if (Delta == 0.0) throw DomainError("BL metric singular on a horizon");
    g(t, t) = 1.0 + q;
    g(t, ph) = g(ph, t) = -p.a * s2 * q;
    g(r, r) = -Sigma / Delta;
    g(th, th) = -Sigma;
    g(ph, ph) = -s2 * (x.r * x.r + p.a * p.a - p.a * p.a * s2 * q);
  } else {
    // w = dr - a sin^2 dphi
    Vec4 w(0.0, 1.0, 0.0, -p.a * s2);
    Vec4 dt(1.0, 0.0, 0.0, 0.0);
    g = (1.0 + q) * dt * dt.transpose() + q * (w * dt.transpose() + dt * w.transpose()) -
        (1.0 - q) * w * w.transpose();
    g(th, th) -= Sigma;
    g(ph, ph) -= Sigma * s2;
  }
  return {chart, g};
}

Mat4 bl_to_ef_jacobian(double r, const SpacetimeParams& p) {
  double Delta = delta_of(r, p);
  if (Delta == 0.0) throw DomainError("BL -> EF Jacobian singular on a horizon");
  Mat4 J = Mat4::Identity();
  J(idx::t, idx::r) = (r * r + p.a * p.a) / Delta - 1.0;
  J(idx::ph, idx::r) = p.a / Delta;
  return J;
}

TemporalMinors temporal_minors(const BLPoint& x, const SpacetimeParams& p) {
  Mat4 g = metric(x, Chart::EF, p).g;
  const int ord[3] = {idx::r, idx::ph, idx::th};
  Eigen::Matrix3d A;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A(i, j) = -g(ord[i], ord[j]);
  double d1 = A(0, 0);
  double d2 = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  return {d1, d2, A.determinant()};
}

}  // namespace kn
