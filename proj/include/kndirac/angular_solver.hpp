#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kndirac/separation.hpp"

namespace kn {

// N basis functions per component; the matrix is 2N x 2N
struct DiscretizationSpec {
  int N = 64;
};

void validate(const DiscretizationSpec& spec);

// Gauss-Legendre rule in theta on (0, pi); weight already carries sin(theta)
struct ThetaQuadrature {
  std::vector<double> theta;
  std::vector<double> weight;
};

ThetaQuadrature theta_quadrature(int n);

// (1-x)^{alpha/2} (1+x)^{beta/2} p_n(x), x = cos(theta), p_n orthonormal Jacobi;
// orthonormal in L2(sin(theta) dtheta)
class AngularBasis {
 public:
  AngularBasis() = default;
  AngularBasis(double alpha, double beta, int N);

  // basis for component 1 or 2 of the angular system at half-integer k
  static AngularBasis for_component(int component, double k, int N);

  int size() const { return N_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  // values and theta-derivatives of all basis functions
  void eval(double theta, Eigen::VectorXd& v, Eigen::VectorXd& dv) const;

 private:
  double alpha_ = 0.0, beta_ = 0.0;
  int N_ = 0;
  std::vector<double> a_, b_;  // recurrence x p_n = a_{n+1} p_{n+1} + b_n p_n + a_n p_{n-1}
  double p0_ = 0.0;
};

// Galerkin matrix of H = [[-am cos, L-], [-L+, am cos]], whose eigenvalues are xi
struct AngularDiscretization {
  Eigen::MatrixXd H;  // ordering (Y1 coefficients, Y2 coefficients)
  AngularBasis basis1, basis2;
  ThetaQuadrature quad;
};

AngularDiscretization discretize_angular(const ModeParams& mode, const SpacetimeParams& p,
                                         const DiscretizationSpec& spec);

struct AngularEigenpair {
  int n = 0;  // 1, 2, ... above the gap at 0; -1, -2, ... below
  double xi = 0.0;
  double imag_residual = 0.0;  // |Im| of the matching eigenvalue of the unsymmetrized matrix
  int N = 0;
  std::vector<double> theta;  // sample grid (quadrature nodes)
  std::vector<Vec2c> Y;
  Eigen::VectorXd c1, c2;
  AngularBasis basis1, basis2;

  AngularSample at(double theta) const;
};

struct AngularSpectrum {
  std::vector<double> xi;  // all 2N eigenvalues, ascending
  double imag_residual = 0.0;
};

// eigenvalues only
AngularSpectrum angular_spectrum(const ModeParams& mode, const SpacetimeParams& p, const DiscretizationSpec& spec);

// the `count` eigenvalues of smallest modulus, ascending by value
std::vector<AngularEigenpair> angular_eigenpairs(const ModeParams& mode, const SpacetimeParams& p,
                                                 const DiscretizationSpec& spec, int count);

struct ContinuationResult {
  std::vector<double> omega;
  std::vector<double> xi;
  double max_jump_over_half_gap = 0.0;
  double max_second_difference = 0.0;  // max |xi''| by central differences
};

// tracks branch n (label at omegas.front()) across the omega samples by nearest value
ContinuationResult xi_continuation(const ModeParams& base, const std::vector<double>& omegas,
                                   const SpacetimeParams& p, const DiscretizationSpec& spec, int n,
                                   unsigned threads = 0);

}  // namespace kn
