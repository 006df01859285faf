#pragma once

#include "kndirac/geometry.hpp"

namespace kn {

// Safeguarded Newton inversion of r*(r) on one branch. Works in the log of
// the distance to the nearer horizon; remembers the last root as the next
// starting guess, so one instance must not be shared between threads.
class TortoiseInverter {
 public:
  TortoiseInverter(const SpacetimeParams& p, Branch b);

  TortoiseRoot operator()(double rstar);

  Branch branch() const { return branch_; }
  const HorizonData& horizon() const { return h_; }
  // interior only: r* at the midpoint between the horizons
  double rstar_mid() const { return rstar_mid_; }

  static constexpr int max_iterations = 200;

 private:
  enum class Var { ext_plus, int_minus, int_plus };
  double residual(Var v, double s, double rstar, double* deriv) const;
  TortoiseRoot solve(Var v, double rstar, double guess, double upper);
  TortoiseRoot make_root(Var v, double s, int iters) const;

  SpacetimeParams p_;
  Branch branch_;
  HorizonData h_;
  double w_, cp_, cm_;
  double rstar_mid_ = 0.0;
  double upper_ = 0.0;
  bool have_last_ = false;
  Var last_var_ = Var::ext_plus;
  double last_s_ = 0.0;
};

}  // namespace kn
