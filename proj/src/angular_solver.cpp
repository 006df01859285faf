#include "kndirac/angular_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include <boost/math/special_functions/legendre.hpp>

namespace kn {

void validate(const DiscretizationSpec& spec) {
  if (spec.N < 8) throw DomainError("angular discretization needs N >= 8");
}

ThetaQuadrature theta_quadrature(int n) {
  auto pos = boost::math::legendre_p_zeros<double>(n);
  std::vector<double> t;
  for (double z : pos)
    if (z != 0.0) t.push_back(-z);
  for (double z : pos) t.push_back(z);
  std::sort(t.begin(), t.end());
  ThetaQuadrature q;
  for (double z : t) {
    double d = boost::math::legendre_p_prime(n, z);
    double w = 2.0 / ((1.0 - z * z) * d * d);
    double th = 0.5 * M_PI * (z + 1.0);
    q.theta.push_back(th);
    q.weight.push_back(0.5 * M_PI * w * std::sin(th));
  }
  return q;
}

AngularBasis::AngularBasis(double alpha, double beta, int N) : alpha_(alpha), beta_(beta), N_(N) {
  double ab = alpha + beta;
  a_.assign(N + 1, 0.0);
  b_.assign(N + 1, 0.0);
  b_[0] = (beta - alpha) / (ab + 2.0);
  for (int n = 1; n <= N; ++n) {
    double t = 2.0 * n + ab;
    b_[n] = (beta * beta - alpha * alpha) / (t * (t + 2.0));
    a_[n] = std::sqrt(4.0 * n * (n + alpha) * (n + beta) * (n + ab) / (t * t * (t + 1.0) * (t - 1.0)));
  }
  double lmu0 = (ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                std::lgamma(ab + 2.0);
  p0_ = std::exp(-0.5 * lmu0);
}

AngularBasis AngularBasis::for_component(int component, double k, int N) {
  double lo = std::abs(k - 0.5), hi = std::abs(k + 0.5);
  return component == 1 ? AngularBasis(lo, hi, N) : AngularBasis(hi, lo, N);
}

void AngularBasis::eval(double theta, Eigen::VectorXd& v, Eigen::VectorXd& dv) const {
  double x = std::cos(theta), s = std::sin(theta);
  double A = 0.5 * alpha_, B = 0.5 * beta_;
  double w = std::pow(1.0 - x, A) * std::pow(1.0 + x, B);
  double dlogw = (A * (1.0 + x) - B * (1.0 - x)) / s;
  v.resize(N_);
  dv.resize(N_);
  double pm = 0.0, p = p0_, dpm = 0.0, dp = 0.0;
  for (int n = 0; n < N_; ++n) {
    v(n) = w * p;
    dv(n) = w * (dlogw * p - s * dp);
    double pn = ((x - b_[n]) * p - a_[n] * pm) / a_[n + 1];
    double dpn = ((x - b_[n]) * dp + p - a_[n] * dpm) / a_[n + 1];
    pm = p;
    p = pn;
    dpm = dp;
    dp = dpn;
  }
}

AngularDiscretization discretize_angular(const ModeParams& mode, const SpacetimeParams& p,
                                         const DiscretizationSpec& spec) {
  validate(spec);
  validate(mode);
  validate(p);
  int N = spec.N;
  AngularDiscretization out;
  out.basis1 = AngularBasis::for_component(1, mode.k, N);
  out.basis2 = AngularBasis::for_component(2, mode.k, N);
  // integrands are trigonometric polynomials of degree below 2N + 2|k| + 4
  int nq = 2 * N + static_cast<int>(2.0 * std::abs(mode.k)) + 4 + 32;
  out.quad = theta_quadrature(nq);

  Eigen::MatrixXd B1(nq, N), B2(nq, N), Lp1(nq, N), Lm2(nq, N);
  Eigen::VectorXd W(nq), X(nq);
  Eigen::VectorXd v, dv;
  double am = p.a * mode.mass;
  for (int q = 0; q < nq; ++q) {
    double th = out.quad.theta[q];
    double s = std::sin(th), c = std::cos(th);
    double f = p.a * mode.omega * s + mode.k / s;
    double hc = 0.5 * c / s;
    W(q) = out.quad.weight[q];
    X(q) = c;
    out.basis1.eval(th, v, dv);
    B1.row(q) = v;
    Lp1.row(q) = dv + (hc - f) * v;
    out.basis2.eval(th, v, dv);
    B2.row(q) = v;
    Lm2.row(q) = dv + (hc + f) * v;
  }
  Eigen::MatrixXd WB1 = W.asDiagonal() * B1, WB2 = W.asDiagonal() * B2;
  out.H.resize(2 * N, 2 * N);
  out.H.topLeftCorner(N, N) = -am * (WB1.transpose() * X.asDiagonal() * B1);
  out.H.bottomRightCorner(N, N) = am * (WB2.transpose() * X.asDiagonal() * B2);
  out.H.topRightCorner(N, N) = WB1.transpose() * Lm2;
  out.H.bottomLeftCorner(N, N) = -(WB2.transpose() * Lp1);
  return out;
}

namespace {

double imag_residual_of(const Eigen::MatrixXd& H) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(H, false);
  if (es.info() != Eigen::Success) throw NumericalError("angular eigensolver (general) failed");
  return es.eigenvalues().imag().cwiseAbs().maxCoeff();
}

}  // namespace

AngularSpectrum angular_spectrum(const ModeParams& mode, const SpacetimeParams& p, const DiscretizationSpec& spec) {
  auto d = discretize_angular(mode, p, spec);
  Eigen::MatrixXd Hs = 0.5 * (d.H + d.H.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hs, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("angular eigensolver failed");
  AngularSpectrum out;
  out.xi.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  out.imag_residual = imag_residual_of(d.H);
  return out;
}

AngularSample AngularEigenpair::at(double theta) const {
  if (!(theta > 0.0 && theta < M_PI)) throw DomainError("angular eigenfunction: theta must lie in (0, pi)");
  Eigen::VectorXd v, dv;
  AngularSample s;
  basis1.eval(theta, v, dv);
  s.Y(0) = v.dot(c1);
  s.dY(0) = dv.dot(c1);
  basis2.eval(theta, v, dv);
  s.Y(1) = v.dot(c2);
  s.dY(1) = dv.dot(c2);
  return s;
}

std::vector<AngularEigenpair> angular_eigenpairs(const ModeParams& mode, const SpacetimeParams& p,
                                                 const DiscretizationSpec& spec, int count) {
  if (count < 1 || count > spec.N) throw DomainError("eigenpair count must lie in [1, N]");
  auto d = discretize_angular(mode, p, spec);
  int N = spec.N;
  Eigen::MatrixXd Hs = 0.5 * (d.H + d.H.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hs);
  if (es.info() != Eigen::Success) throw NumericalError("angular eigensolver failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  int dim = 2 * N;

  Eigen::EigenSolver<Eigen::MatrixXd> gen(d.H, false);
  if (gen.info() != Eigen::Success) throw NumericalError("angular eigensolver (general) failed");
  Eigen::VectorXcd gev = gen.eigenvalues();

  // labels counted outward from the gap at 0
  int first_pos = 0;
  while (first_pos < dim && ev(first_pos) <= 0.0) ++first_pos;
  std::vector<int> idx(dim);
  for (int i = 0; i < dim; ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return std::abs(ev(i)) < std::abs(ev(j)); });
  idx.resize(count);
  std::sort(idx.begin(), idx.end());

  for (int i : idx) {
    double gap = std::numeric_limits<double>::infinity();
    if (i > 0) gap = std::min(gap, ev(i) - ev(i - 1));
    if (i + 1 < dim) gap = std::min(gap, ev(i + 1) - ev(i));
    if (gap < 1e-10)
      throw NumericalError("degenerate angular eigenvalue near xi = " + std::to_string(ev(i)));
  }

  std::vector<AngularEigenpair> out;
  for (int i : idx) {
    AngularEigenpair e;
    e.xi = ev(i);
    e.n = i >= first_pos ? i - first_pos + 1 : i - first_pos;
    e.N = N;
    int best = 0;
    for (int j = 1; j < gev.size(); ++j)
      if (std::abs(gev(j) - e.xi) < std::abs(gev(best) - e.xi)) best = j;
    e.imag_residual = std::abs(gev(best).imag());
    Eigen::VectorXd vec = es.eigenvectors().col(i);
    Eigen::Index imax;
    vec.cwiseAbs().maxCoeff(&imax);
    if (vec(imax) < 0.0) vec = -vec;
    e.c1 = vec.head(N);
    e.c2 = vec.tail(N);
    e.basis1 = d.basis1;
    e.basis2 = d.basis2;
    e.theta = d.quad.theta;
    Eigen::VectorXd v, dv;
    for (double th : e.theta) {
      Vec2c y;
      e.basis1.eval(th, v, dv);
      y(0) = v.dot(e.c1);
      e.basis2.eval(th, v, dv);
      y(1) = v.dot(e.c2);
      e.Y.push_back(y);
    }
    out.push_back(std::move(e));
  }
  return out;
}

ContinuationResult xi_continuation(const ModeParams& base, const std::vector<double>& omegas,
                                   const SpacetimeParams& p, const DiscretizationSpec& spec, int n,
                                   unsigned threads) {
  if (omegas.empty()) throw DomainError("continuation needs at least one omega sample");
  if (n == 0) throw DomainError("branch label must be nonzero");
  validate(spec);
  size_t M = omegas.size();
  std::vector<std::vector<double>> spectra(M);
  std::vector<std::exception_ptr> errors(M);
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i; (i = next.fetch_add(1)) < M;) {
      try {
        ModeParams m = base;
        m.omega = omegas[i];
        spectra[i] = angular_spectrum(m, p, spec).xi;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned nt = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  nt = static_cast<unsigned>(std::min<size_t>(nt, M));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  ContinuationResult out;
  out.omega = omegas;
  const auto& s0 = spectra[0];
  int first_pos = 0;
  while (first_pos < static_cast<int>(s0.size()) && s0[first_pos] <= 0.0) ++first_pos;
  int i0 = n > 0 ? first_pos + n - 1 : first_pos + n;
  if (i0 < 0 || i0 >= static_cast<int>(s0.size())) throw DomainError("branch label outside the spectrum");
  out.xi.push_back(s0[i0]);
  for (size_t j = 1; j < M; ++j) {
    const auto& s = spectra[j];
    double prev = out.xi.back();
    auto it = std::lower_bound(s.begin(), s.end(), prev);
    size_t best = it == s.end() ? s.size() - 1 : static_cast<size_t>(it - s.begin());
    if (best > 0 && std::abs(s[best - 1] - prev) < std::abs(s[best] - prev)) --best;
    double gap = std::numeric_limits<double>::infinity();
    if (best > 0) gap = std::min(gap, s[best] - s[best - 1]);
    if (best + 1 < s.size()) gap = std::min(gap, s[best + 1] - s[best]);
    double jump = std::abs(s[best] - prev);
    out.max_jump_over_half_gap = std::max(out.max_jump_over_half_gap, jump / (0.5 * gap));
    if (jump >= 0.5 * gap)
      throw NumericalError("branch-crossing ambiguity at omega = " + std::to_string(omegas[j]) +
                           ": step exceeds half the local gap");
    out.xi.push_back(s[best]);
  }
  for (size_t j = 1; j + 1 < M; ++j) {
    double h1 = omegas[j] - omegas[j - 1], h2 = omegas[j + 1] - omegas[j];
    double d2 = 2.0 * ((out.xi[j + 1] - out.xi[j]) / h2 - (out.xi[j] - out.xi[j - 1]) / h1) / (h1 + h2);
    out.max_second_difference = std::max(out.max_second_difference, std::abs(d2));
  }
  return out;
}

}  // namespace kn
