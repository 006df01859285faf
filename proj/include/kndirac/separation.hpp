#pragma once

#include "kndirac/geometry.hpp"

namespace kn {

struct ModeParams {
  double omega = 0.0;
  double k = 0.5;  // half-integer
  double mass = 0.0;
  double xi = 0.0;
};

// DomainError unless k is in Z + 1/2, mass >= 0, all finite
void validate(const ModeParams& m);

// first-order 4x4 operator in one variable: D d/dvar + Z
struct Stencil1D {
  Mat4c D;
  Mat4c Z;
};

// mode-evaluated radial matrix operator (in d/dr)
Stencil1D radial_operator(double r, const ModeParams& mode, const SpacetimeParams& p);
// mode-evaluated angular matrix operator (in d/dtheta)
Stencil1D angular_operator(double theta, const ModeParams& mode, const SpacetimeParams& p);

// radial amplitudes X = (X1~, r_+ X2~) and their r-derivatives
struct RadialSample {
  Vec2c X, dX;
};
// angular amplitudes and theta-derivatives
struct AngularSample {
  Vec2c Y, dY;
};

// separated spinor (X2~Y2, X1~Y1, X1~Y2, X2~Y1) and its r and theta derivatives
struct SeparatedSpinor {
  Vec4c Phi, dPhi_r, dPhi_th;
};

SeparatedSpinor assemble_separated(const RadialSample& X, const AngularSample& Y, double r_plus);

struct SeparationResidual {
  double radial;   // |(R - xi) Phi|
  double angular;  // |(A + xi) Phi|
  double total;    // max of the two
};

SeparationResidual separation_residual(const ModeParams& mode, const RadialSample& X, const AngularSample& Y,
                                       const BLPoint& x, const SpacetimeParams& p);

// U~(r): d_r X = U~ X
Mat2c radial_system(double r, const ModeParams& mode, const SpacetimeParams& p);

// U = Delta/(r^2+a^2) U~, built from the horizon offsets so it stays finite at r_-+
Mat2c radial_potential(const TortoiseRoot& root, const ModeParams& mode, const SpacetimeParams& p);
Mat2c radial_potential(double rstar, Branch b, const ModeParams& mode, const SpacetimeParams& p);

// angular system as d_theta Y = V(theta) Y
Mat2c angular_system(double theta, const ModeParams& mode, const SpacetimeParams& p);

}  // namespace kn
