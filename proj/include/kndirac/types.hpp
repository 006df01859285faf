#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kn {

using cplx = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;
using Vec2c = Eigen::Vector2cd;
using Mat4 = Eigen::Matrix4d;
using Mat4c = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4d;
using Vec4c = Eigen::Vector4cd;

inline constexpr cplx I{0.0, 1.0};

// bad input: parameters outside the admissible domain
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// iteration failed to converge, step underflow, eigensolver failure
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// coordinate index layout used everywhere: (tau or t, r, theta, phi)
namespace idx {
inline constexpr int t = 0;
inline constexpr int r = 1;
inline constexpr int th = 2;
inline constexpr int ph = 3;
}  // namespace idx

}  // namespace kn
