#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "kndirac/separation.hpp"

namespace kn {

struct WRoots {
  cplx w1, w2;
  bool threshold;  // omega^2 == m^2, w1 = 0
};

// w1 = sqrt(w^2 - m^2) >= 0, or i sqrt(m^2 - w^2); w2 = -w1
WRoots w_roots(double omega, double m);

struct BoostParam {
  cplx Theta;
  bool complex_log;  // (w - m)/(w + m) < 0
  Mat2c matrix;      // [[cosh, sinh], [sinh, cosh]]
};

BoostParam theta_boost(double omega, double m);

// Phi_j = w_j u + M (2 w + m^2/w_j) ln u; solution branch j carries e^{i Phi_j}
struct Phases {
  cplx plus, minus;
};

Phases asymptotic_phases(double u, const ModeParams& mode, const SpacetimeParams& p, bool with_log = true);
Phases asymptotic_phase_derivatives(double u, const ModeParams& mode, const SpacetimeParams& p);

// lambda_j(u) ~ c0_j + c1_j / u for the eigenvalues of U at large u
struct EigenExpansion {
  cplx c0[2], c1[2];
  cplx at(int j, double u) const { return c0[j] + c1[j] / u; }
};

EigenExpansion eigen_expansion(const ModeParams& mode, const SpacetimeParams& p);

// limit of U at infinity
Mat2c u_infinity(const ModeParams& mode);

// eigenvectors as columns, unit norm, largest component real positive
struct Diagonalizer {
  Vec2c lambda;
  Mat2c D;
};

Diagonalizer diagonalize(const Mat2c& U);
// columns reordered so lambda is closest to `prev` (continuity tracking)
Diagonalizer diagonalize_tracking(const Mat2c& U, const Vec2c& prev);

struct IntegratorStats {
  long steps = 0;
  long rejected = 0;
  double tol = 0.0;      // relative
  double abs_tol = 0.0;  // absolute
};

// generic Y' = U(t) Y, 2x2; `columns` 1 integrates Y0.col(0) only, 2 also carries
// S = int tr U for the Abel check. With a (traceless, constant) frame generator G the
// stepper advances Z = e^{-G (t - t0)} Y, which only carries the slow part of the motion.
struct LinearSolution {
  std::vector<double> t;
  std::vector<Mat2c> Y;
  std::vector<cplx> S;
  IntegratorStats stats;
};

LinearSolution integrate_linear(const std::function<Mat2c(double)>& U, const std::vector<double>& samples,
                                const Mat2c& Y0, int columns, double tol, double max_step = 0.0,
                                const std::optional<Mat2c>& frame = std::nullopt);

// how the radial integrators advance the solution: `rotating` factors out e^{U_inf u}
// (exterior, w^2 > m^2) and caps the step at 0.8 rad of the beat frequency 2w;
// `automatic` picks rotating whenever it applies
enum class Frame { plain, rotating, automatic };

struct RadialTrajectory {
  std::vector<double> rstar, r;
  std::vector<Vec2c> X;
  ModeParams mode;
  SpacetimeParams params;
  Branch branch = Branch::exterior;
  IntegratorStats stats;
  bool rotating = false;
};

// X(samples) for dX/dr* = U(r*) X, X(samples[0]) = X0; samples strictly monotone
RadialTrajectory integrate(const ModeParams& mode, const SpacetimeParams& p, Branch b,
                           const std::vector<double>& rstar_samples, const Vec2c& X0, double tol = 1e-10,
                           Frame frame = Frame::automatic);

struct FundamentalTrajectory {
  std::vector<double> rstar, r;
  std::vector<Mat2c> Y;
  std::vector<cplx> trace_integral;
  double abel_drift = 0.0;  // max |det Y e^{-S} / det Y0 - 1|
  ModeParams mode;
  SpacetimeParams params;
  Branch branch = Branch::exterior;
  IntegratorStats stats;
  bool rotating = false;

  RadialTrajectory column(int j) const;
};

FundamentalTrajectory integrate_fundamental(const ModeParams& mode, const SpacetimeParams& p, Branch b,
                                            const std::vector<double>& rstar_samples, const Mat2c& Y0,
                                            double tol = 1e-10, Frame frame = Frame::automatic);

std::vector<double> log_samples(double from, double to, int per_decade);
std::vector<double> linear_samples(double from, double to, double step);

// least-squares slope of log y against log x (or against x with log_x = false)
double fit_slope(const std::vector<double>& x, const std::vector<double>& y, bool log_x = true);

struct InfinityFitOptions {
  double window_lo = 1e3, window_hi = 1e6;  // slope window in u
  double limit_decades = 1.0;               // f_inf from the top decade of the trajectory
};

struct InfinityFit {
  WRoots w;
  BoostParam boost;
  Mat2c D_inf;
  Vec2c f_inf;
  Vec2c f_inf_ablated;
  double slope = 0.0;
  double slope_ablated = 0.0;
  double c = 0.0;                   // max of u * residual over the window
  double f_tail_variation = 0.0;    // (max - min)/mean of |f| over the top decade
  double window_lo = 0.0, window_hi = 0.0;
  std::vector<double> u, residual, residual_ablated;
  std::vector<Vec2c> f;
};

InfinityFit fit_infinity(const RadialTrajectory& traj, const InfinityFitOptions& opt = {});

// asymptotic data at u: D(u) diag(e^{i Phi(u)}) f
Vec2c asymptotic_data(double u, const ModeParams& mode, const SpacetimeParams& p, const Vec2c& f);

double horizon_alpha(const SpacetimeParams& p);
// end of the interior integration span: 36/alpha, later when the Cauchy horizon is tiny
double horizon_span_end(const SpacetimeParams& p);
double horizon_omega_minus(const SpacetimeParams& p);

// h' = B h with X1 = h1 e^{2 i (w + k Omega_-) u}, X2 = h2
Mat2c horizon_B(double rstar, const ModeParams& mode, const SpacetimeParams& p);
Mat2c horizon_B(const TortoiseRoot& root, double rstar, const ModeParams& mode, const SpacetimeParams& p);

struct HorizonFit {
  Vec2c h;
  double alpha = 0.0;
  double omega_minus = 0.0;
  double phase_rate = 0.0;  // 2 (w + k Omega_-)
  double rate = 0.0;        // fitted decay rate of |h(u) - h|
  double window_lo = 0.0, window_hi = 0.0;
  double cauchy_shift = 0.0;
  double cauchy_rate = 0.0;  // fitted decay rate of |h(u) - h(u + shift)|
  bool cauchy_ok = false;
  std::vector<double> u, error;
};

HorizonFit fit_horizon(const RadialTrajectory& traj);

// m > |w|: growth of the two fundamental solutions over 20/|w1| from u0
struct GrowthCheck {
  double kappa = 0.0;
  double window = 0.0;
  double growth_ratio = 0.0;  // measured growth / e^{kappa L}
  double decay_ratio = 0.0;   // measured decay / e^{-kappa L}
};

GrowthCheck evanescent_growth(const ModeParams& mode, const SpacetimeParams& p, double u0, double tol = 1e-10);

}  // namespace kn
