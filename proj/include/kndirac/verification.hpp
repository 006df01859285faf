#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "kndirac/angular_solver.hpp"
#include "kndirac/dirac_algebra.hpp"
#include "kndirac/radial_solver.hpp"

namespace kn::verify {

inline constexpr double unbounded = std::numeric_limits<double>::infinity();

// one measured quantity against its admissible interval [lo, hi]
struct Check {
  std::string name;
  double value = 0.0;
  double lo = -unbounded, hi = unbounded;
  bool pass = false;
};

Check below(std::string name, double value, double hi);
Check above(std::string name, double value, double lo);
Check within(std::string name, double value, double lo, double hi);

struct Report {
  std::string name;
  std::vector<Check> checks;
  bool pass() const;
  void add(const Report& other);
};

// seeded draws shared by the property suites
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  // M in [0.5, 1.5], a^2 + Q^2 < bound M^2
  SpacetimeParams params(double bound = 0.9);
  // interior points sit between the horizons, exterior ones within 10 of r_+
  BLPoint point(const SpacetimeParams& p, bool inside);
  ModeParams mode();
  double uniform(double lo, double hi);
  int integer(int lo, int hi);

 private:
  std::mt19937_64 rng_;
};

// Clifford relation, EF and BL charts
Report clifford(std::uint64_t seed, int points);

// NP/dyad normalisation and the BL -> EF -> class-3 construction chain
Report tetrad(std::uint64_t seed, int points);

// spin-connection term: definition vs closed form at step h, and the observed order
Report spin_connection(std::uint64_t seed, int points, double h = 1e-5);

// transformed operator: closed assembly vs transform of the stencil, and the
// conjugation with finite-difference derivatives of D
Report transformed_operator(std::uint64_t seed, int points);

// three temporal-function minors on an nr x nth grid over r in (r_- + 1e-6, 100 M)
Report temporal(std::uint64_t seed, int param_sets, int nr = 200, int nth = 50);

// residual of the transformed stencil on manufactured separated solutions
Report separation(std::uint64_t seed, int modes);

struct AngularSuiteOptions {
  int modes = 20;
  int N = 128;
  int sweep_points = 41;
};

// realness, Gram matrix, N -> 2N convergence, gap, sweep reversal
Report angular(std::uint64_t seed, const AngularSuiteOptions& opt = {});

// Gram matrix deviation of eigenpairs on an independent theta rule
double gram_deviation(const std::vector<AngularEigenpair>& pairs);

// large-u behaviour of one exterior mode with |w| > m > 0
struct InfinityCheck {
  InfinityFit fit;
  FundamentalTrajectory fundamental;
  RadialTrajectory combined;
  Vec2c f0;
  Report report;
};

struct InfinityCheckOptions {
  double u_start = 2e6;
  double u_end = 1e3;
  int per_decade = 40;
  double tol = 1e-10;
  InfinityFitOptions fit;
};

InfinityCheck infinity_check(const ModeParams& mode, const SpacetimeParams& p, const Vec2c& f0,
                             const InfinityCheckOptions& opt = {});

// approach to the Cauchy horizon for one interior mode
struct HorizonCheck {
  HorizonFit fit;
  FundamentalTrajectory fundamental;
  RadialTrajectory combined;
  Report report;
};

HorizonCheck horizon_check(const ModeParams& mode, const SpacetimeParams& p, const Vec2c& x0, double tol = 1e-10);

// constant-coefficient exponential and superposition tests
Report integrator_health(std::uint64_t seed, double tol = 1e-10);

// Y f for a fundamental trajectory
RadialTrajectory combine(const FundamentalTrajectory& ft, const Vec2c& f);

// seeded modes for the large-u and horizon checks
struct SeededMode {
  SpacetimeParams params;
  ModeParams mode;
  Vec2c vec;
};

std::vector<SeededMode> infinity_modes(std::uint64_t seed, int count);
std::vector<SeededMode> horizon_modes(std::uint64_t seed, int count);

}  // namespace kn::verify
