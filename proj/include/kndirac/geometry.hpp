#pragma once

#include "kndirac/types.hpp"

namespace kn {

struct SpacetimeParams {
  double M = 1.0;
  double a = 0.0;
  double Q = 0.0;
};

// throws DomainError unless M > 0 and a^2 + Q^2 < M^2
void validate(const SpacetimeParams& p);

struct HorizonData {
  double r_plus;
  double r_minus;
};

HorizonData horizons(const SpacetimeParams& p);

struct BLPoint {
  double r;
  double theta;
};

struct DeltaSigma {
  double Delta;
  double Sigma;
};

double delta_of(double r, const SpacetimeParams& p);
DeltaSigma delta_sigma(const BLPoint& x, const SpacetimeParams& p);

// +1 for Delta > 0, -1 for Delta < 0; DomainError on Delta == 0
int eps_delta(double Delta);

// tortoise coordinate; r > r_-, r != r_+
double tortoise(double r, const SpacetimeParams& p);
// dr*/dr = (r^2 + a^2)/Delta
double tortoise_derivative(double r, const SpacetimeParams& p);

enum class Branch { exterior, interior };

const char* to_string(Branch b);
Branch branch_from_string(const std::string& s);

// inversion result with horizon offsets kept separately, so Delta stays
// accurate when r sits within rounding distance of a horizon
struct TortoiseRoot {
  double r;
  double from_minus;  // r - r_-
  double from_plus;   // r - r_+
  double log_from_minus;  // ln|r - r_-|, survives underflow of the offsets
  double log_from_plus;   // ln|r - r_+|
  int eps;                // sign of Delta on the branch
  int iterations;
  double Delta() const { return from_minus * from_plus; }
};

TortoiseRoot invert_tortoise(double rstar, Branch b, const SpacetimeParams& p);
double tortoise_inverse(double rstar, Branch b, const SpacetimeParams& p);

double azimuthal_shift(double r, const SpacetimeParams& p);

enum class Chart { BL, EF };

struct MetricComponents {
  Chart chart;
  Mat4 g;  // order (t|tau, r, theta, phi|phi_hat)
};

MetricComponents metric(const BLPoint& x, Chart chart, const SpacetimeParams& p);

// J(i,j) = d x_EF^i / d x_BL^j
Mat4 bl_to_ef_jacobian(double r, const SpacetimeParams& p);

// leading principal minors of -g_EF restricted to tau = const,
// basis order (r, phi, theta)
struct TemporalMinors {
  double d1, d2, d3;
};

TemporalMinors temporal_minors(const BLPoint& x, const SpacetimeParams& p);

}  // namespace kn
