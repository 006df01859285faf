#pragma once

#include <array>

#include "kndirac/geometry.hpp"

namespace kn {

enum class Variance { vectors, forms };

const char* to_string(Variance v);
const char* to_string(Chart c);

// l and n are stored complex so that class-3 rotations with non-real C stay
// representable; every tetrad built from a metric has real l, n
struct NullTetrad {
  Vec4c l, n, m, mbar;
  Variance variance = Variance::vectors;
  Chart chart = Chart::BL;
};

struct OrthonormalTetrad {
  std::array<Vec4, 4> u;
  Variance variance = Variance::vectors;
  Chart chart = Chart::BL;
};

// first frame vector must be timelike; DomainError on a degenerate frame
OrthonormalTetrad gram_schmidt_tetrad(const std::array<Vec4, 4>& frame, const MetricComponents& g);

NullTetrad null_from_orthonormal(const OrthonormalTetrad& u);
// DomainError if l, n carry an imaginary part (non-real class-3 factor)
OrthonormalTetrad orthonormal_from_null(const NullTetrad& nt);

// (l, n, m, mbar) -> (C l, n / C, (C/|C|) m, (conj C/|C|) mbar)
NullTetrad class3_rotation(const NullTetrad& nt, cplx C);

// BL frame with the eps(Delta) sign on n; DomainError on a horizon
NullTetrad symmetric_bl_tetrad(const BLPoint& x, const SpacetimeParams& p);

// push vectors through a Jacobian dx'/dx into another chart
NullTetrad push_forward(const NullTetrad& nt, const Mat4& J, Chart to);

struct EFNullTetrad {
  NullTetrad vectors;
  NullTetrad forms;
};

// regular across r_+; needs r > r_-
EFNullTetrad ef_null_tetrad(const BLPoint& x, const SpacetimeParams& p);

struct EFOrthonormal {
  OrthonormalTetrad vectors;
  OrthonormalTetrad forms;
};

EFOrthonormal orthonormal_u_ef(const BLPoint& x, const SpacetimeParams& p);

// lower indices with g (vectors -> forms); chart must match
NullTetrad lower(const NullTetrad& nt, const MetricComponents& g);
OrthonormalTetrad lower(const OrthonormalTetrad& u, const MetricComponents& g);

// max deviation of the eight pairings from (l.n = 1, m.mbar = -1, rest 0);
// vectors contract with g, forms with g^-1
double np_residual(const NullTetrad& nt, const MetricComponents& g);
// max |g(u_a, u_b) - eta_ab|
double dyad_residual(const OrthonormalTetrad& u, const MetricComponents& g);

}  // namespace kn
